#pragma once

#include "meshband/config.hpp"
#include "meshband/fsg.hpp"
#include "meshband/graph_metrics.hpp"
#include "meshband/mesh.hpp"
#include "meshband/types.hpp"
#include "meshband/wavelet.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace meshband {

extern const char* const kToolVersion;

/// Parses the config's subband selection ("all", explicit labels, or the
/// default set without D_1).
std::vector<SubbandIndex> resolve_subbands(const PipelineConfig& config);

Dataset load_configured_dataset(const PipelineConfig& config);

/// One stack per subject, config order. Parallel over subjects.
std::vector<SubbandStack> compute_stacks(const Dataset& dataset, const PipelineConfig& config);

/// One table per requested subband, session rows aligned across tables.
/// Mesh networks and correlation/raw features are built per (session, band).
std::vector<FeatureTable> build_feature_tables(const Dataset& dataset,
                                               const std::vector<SubbandStack>& stacks,
                                               const std::vector<SubbandIndex>& bands,
                                               const PipelineConfig& config);

/// Cache-aware variant: loads from <out>/cache when the content hash of
/// (dataset, stage parameters) matches, otherwise computes and stores.
std::vector<FeatureTable> feature_tables_cached(const Dataset& dataset,
                                                const PipelineConfig& config,
                                                bool* cache_hit = nullptr);

// Stage entry points used by the CLI. Each writes its artifacts under
// config.out_dir and reports progress to `log`.
void run_synth_stage(const SynthConfig& synth, const std::filesystem::path& out,
                     const std::string& format, std::ostream& log);
void run_decompose_stage(const PipelineConfig& config, std::ostream& log);
void run_mesh_stage(const PipelineConfig& config, std::ostream& log);
void run_metrics_stage(const PipelineConfig& config, std::ostream& log);
void run_train_stage(const PipelineConfig& config, std::ostream& log);
void run_diversity_stage(const PipelineConfig& config, std::ostream& log);
void run_significance_stage(const PipelineConfig& config, bool as_printed, std::ostream& log);
void run_report_stage(const PipelineConfig& config, std::ostream& out);
bool run_verify_stage(std::ostream& log);

/// Minimal structural JSON-schema check (type / required / properties /
/// items); returns human-readable violations, empty when valid.
std::vector<std::string> validate_against_schema(const std::string& document_json,
                                                 const std::string& schema_json);

/// The results.json schema shipped next to every train run.
std::string results_schema_text();

}  // namespace meshband
