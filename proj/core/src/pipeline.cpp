#include "meshband/pipeline.hpp"

#include "meshband/dataset.hpp"
#include "meshband/dataset_io.hpp"
#include "meshband/diversity.hpp"
#include "meshband/memberships.hpp"
#include "meshband/oracles.hpp"
#include "meshband/parallel.hpp"
#include "meshband/significance.hpp"
#include "meshband/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace meshband {

using ordered_json = nlohmann::ordered_json;

const char* const kToolVersion = "0.1.0";

namespace {

std::string hex64(std::uint64_t v) {
    std::stringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << v;
    return out.str();
}

std::uint64_t fnv_combine(std::uint64_t hash, const std::string& text) {
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t dataset_content_hash(const PipelineConfig& config) {
    const std::filesystem::path path = config.data_path;
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            hash = fnv_combine(hash, file.filename().string());
            hash ^= hash_file(file);
            hash *= 0x100000001b3ULL;
        }
    } else {
        hash ^= hash_file(path);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

int effective_threads(const PipelineConfig& config) {
    return config.threads > 0 ? config.threads : default_thread_count();
}

std::int64_t effective_t_fix(const PipelineConfig& config, const Dataset& dataset) {
    if (config.t_fix > 0) return config.t_fix;
    std::int64_t longest = 1;
    for (const auto& subject : dataset.subjects) {
        for (const auto& session : subject.sessions) {
            longest = std::max(longest, session.n_scans);
        }
    }
    return longest;
}

struct SessionRef {
    std::size_t subject = 0;
    std::size_t session = 0;
};

std::vector<SessionRef> session_order(const Dataset& dataset) {
    std::vector<SessionRef> refs;
    for (std::size_t u = 0; u < dataset.subjects.size(); ++u) {
        for (std::size_t q = 0; q < dataset.subjects[u].sessions.size(); ++q) {
            refs.push_back({u, q});
        }
    }
    return refs;
}

ordered_json config_json(const PipelineConfig& config) {
    ordered_json j;
    j["data"] = config.data_path;
    j["format"] = config.data_format;
    j["family"] = config.family;
    j["levels"] = config.levels;
    ordered_json bands = ordered_json::array();
    for (const auto& b : config.subbands) bands.push_back(b);
    j["subbands"] = bands;
    j["p"] = config.p;
    j["lambda"] = config.lambda;
    j["standardize"] = config.standardize;
    j["features"] = config.feature_kind;
    j["t_fix"] = config.t_fix;
    j["base"] = config.base;
    j["meta"] = config.meta;
    j["k"] = config.k;
    j["reg"] = config.reg;
    j["seed"] = config.seed;
    return j;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

std::vector<SubbandIndex> resolve_subbands(const PipelineConfig& config) {
    if (config.subbands.empty()) return default_subbands(config.levels);
    if (config.subbands.size() == 1 && config.subbands.front() == "all") {
        std::vector<SubbandIndex> all;
        for (int j = 0; j <= 2 * config.levels; ++j) all.emplace_back(j, config.levels);
        return all;
    }
    std::vector<SubbandIndex> bands;
    bands.reserve(config.subbands.size());
    for (const auto& label : config.subbands) {
        bands.push_back(SubbandIndex::parse(label, config.levels));
    }
    return bands;
}

Dataset load_configured_dataset(const PipelineConfig& config) {
    if (config.data_path.empty()) {
        throw std::invalid_argument("no dataset given (use --data or the config file)");
    }
    return load_dataset(config.data_path, data_format_from_name(config.data_format));
}

std::vector<SubbandStack> compute_stacks(const Dataset& dataset, const PipelineConfig& config) {
    const WaveletFamily family = WaveletFamily::from_name(config.family);
    std::vector<SubbandStack> stacks(dataset.subjects.size());
    parallel_for(static_cast<int>(dataset.subjects.size()), effective_threads(config),
                 [&](int u) {
                     stacks[static_cast<std::size_t>(u)] = subband_stack(
                         dataset.subjects[static_cast<std::size_t>(u)], family, config.levels);
                 });
    return stacks;
}

std::vector<FeatureTable> build_feature_tables(const Dataset& dataset,
                                               const std::vector<SubbandStack>& stacks,
                                               const std::vector<SubbandIndex>& bands,
                                               const PipelineConfig& config) {
    const FeatureKind kind = feature_kind_from_name(config.feature_kind);
    const std::vector<SessionRef> refs = session_order(dataset);
    const Index n = static_cast<Index>(refs.size());
    const Index r_count = dataset.n_regions();
    const std::int64_t t_fix = effective_t_fix(config, dataset);

    Index width = 0;
    switch (kind) {
        case FeatureKind::mesh_arcs:
        case FeatureKind::pairwise_corr: width = r_count * r_count; break;
        case FeatureKind::raw_series: width = r_count * t_fix; break;
    }

    std::vector<FeatureTable> tables(bands.size());
    for (std::size_t b = 0; b < bands.size(); ++b) {
        tables[b].kind = kind;
        tables[b].subband = bands[b];
        tables[b].features.resize(n, width);
        tables[b].labels.reserve(refs.size());
        tables[b].subject_ids.reserve(refs.size());
        for (const SessionRef& ref : refs) {
            const auto& subject = dataset.subjects[ref.subject];
            tables[b].labels.push_back(subject.sessions[ref.session].task_label);
            tables[b].subject_ids.push_back(subject.subject_id);
        }
    }

    const int n_jobs = static_cast<int>(refs.size() * bands.size());
    parallel_for(n_jobs, effective_threads(config), [&](int job) {
        const std::size_t b = static_cast<std::size_t>(job) % bands.size();
        const SessionRef ref = refs[static_cast<std::size_t>(job) / bands.size()];
        const auto& subject = dataset.subjects[ref.subject];
        const SessionSpec& spec = subject.sessions[ref.session];
        const Matrix window = slice_session(stacks[ref.subject].band(bands[b]), spec);
        const Index row = static_cast<Index>(job) / static_cast<Index>(bands.size());

        switch (kind) {
            case FeatureKind::mesh_arcs: {
                const MeshNetwork network = build_mesh_network(
                    window, config.p, config.lambda, config.standardize, bands[b],
                    {subject.subject_id, static_cast<int>(ref.session), spec.task_label});
                tables[b].features.row(row) = embed_mesh(network).transpose();
                break;
            }
            case FeatureKind::pairwise_corr:
                tables[b].features.row(row) = pairwise_correlation_features(window).transpose();
                break;
            case FeatureKind::raw_series:
                tables[b].features.row(row) = raw_series_features(window, t_fix).transpose();
                break;
        }
    });
    return tables;
}

namespace {

std::filesystem::path feature_cache_dir(const PipelineConfig& config,
                                        const std::vector<SubbandIndex>& bands) {
    std::uint64_t hash = dataset_content_hash(config);
    std::stringstream params;
    params << config.family << '|' << config.levels << '|' << config.p << '|' << config.lambda
           << '|' << config.standardize << '|' << config.feature_kind << '|' << config.t_fix;
    for (const auto& band : bands) params << '|' << band.label();
    hash = fnv_combine(hash, params.str());
    return std::filesystem::path(config.out_dir) / "cache" /
           ("features_" + config.feature_kind + "_" + hex64(hash));
}

}  // namespace

std::vector<FeatureTable> feature_tables_cached(const Dataset& dataset,
                                                const PipelineConfig& config, bool* cache_hit) {
    const std::vector<SubbandIndex> bands = resolve_subbands(config);
    const std::filesystem::path dir = feature_cache_dir(config, bands);

    bool complete = std::filesystem::is_directory(dir);
    if (complete) {
        for (const auto& band : bands) {
            if (!std::filesystem::exists(dir / ("band_" + band.label() + ".bin"))) {
                complete = false;
                break;
            }
        }
    }
    if (complete) {
        if (cache_hit) *cache_hit = true;
        std::vector<FeatureTable> tables;
        tables.reserve(bands.size());
        for (const auto& band : bands) {
            tables.push_back(load_feature_table(dir / ("band_" + band.label() + ".bin")));
        }
        return tables;
    }

    if (cache_hit) *cache_hit = false;
    const std::vector<SubbandStack> stacks = compute_stacks(dataset, config);
    std::vector<FeatureTable> tables = build_feature_tables(dataset, stacks, bands, config);
    std::filesystem::create_directories(dir);
    for (const auto& table : tables) {
        save_feature_table(table, dir / ("band_" + table.subband.label() + ".bin"));
    }
    return tables;
}

void run_synth_stage(const SynthConfig& synth, const std::filesystem::path& out,
                     const std::string& format, std::ostream& log) {
    const Dataset dataset = generate(synth);
    save_dataset(dataset, out, data_format_from_name(format));
    log << "synth: wrote " << dataset.subjects.size() << " subjects ("
        << dataset.n_sessions() << " sessions, R=" << dataset.n_regions() << ") to " << out
        << "\n";
}

void run_decompose_stage(const PipelineConfig& config, std::ostream& log) {
    const Dataset dataset = load_configured_dataset(config);
    const std::vector<SubbandStack> stacks = compute_stacks(dataset, config);
    const std::filesystem::path dir = std::filesystem::path(config.out_dir) / "stacks";
    std::filesystem::create_directories(dir);
    for (const auto& stack : stacks) {
        save_subband_stack(stack, dir / ("stack_" + stack.subject_id + ".bin"));
    }
    log << "decompose: wrote " << stacks.size() << " subband stacks (" << config.family
        << ", L=" << config.levels << ") to " << dir << "\n";
}

void run_mesh_stage(const PipelineConfig& config, std::ostream& log) {
    const Dataset dataset = load_configured_dataset(config);
    bool cache_hit = false;
    const std::vector<FeatureTable> tables = feature_tables_cached(dataset, config, &cache_hit);
    const std::filesystem::path dir = std::filesystem::path(config.out_dir) / "features";
    std::filesystem::create_directories(dir);
    for (const auto& table : tables) {
        const std::string stem = "features_" + config.feature_kind + "_" + table.subband.label();
        save_feature_table(table, dir / (stem + ".bin"));
        export_feature_table_csv(table, dir / (stem + ".csv"));
    }
    log << "mesh: " << (cache_hit ? "cache hit, " : "") << tables.size()
        << " feature tables (kind=" << config.feature_kind << ") in " << dir << "\n";
}

void run_metrics_stage(const PipelineConfig& config, std::ostream& log) {
    const Dataset dataset = load_configured_dataset(config);
    const std::vector<SubbandIndex> bands = resolve_subbands(config);
    const std::vector<SubbandStack> stacks = compute_stacks(dataset, config);
    const std::vector<SessionRef> refs = session_order(dataset);

    const std::filesystem::path dir = std::filesystem::path(config.out_dir) / "metrics";
    std::filesystem::create_directories(dir);

    // metrics[b][ref] computed in parallel, then grouped by task.
    std::vector<std::vector<NetworkMetrics>> metrics(
        bands.size(), std::vector<NetworkMetrics>(refs.size()));
    const int n_jobs = static_cast<int>(refs.size() * bands.size());
    parallel_for(n_jobs, effective_threads(config), [&](int job) {
        const std::size_t b = static_cast<std::size_t>(job) % bands.size();
        const SessionRef ref = refs[static_cast<std::size_t>(job) / bands.size()];
        const auto& subject = dataset.subjects[ref.subject];
        const SessionSpec& spec = subject.sessions[ref.session];
        const Matrix window = slice_session(stacks[ref.subject].band(bands[b]), spec);
        const MeshNetwork network = build_mesh_network(
            window, config.p, config.lambda, config.standardize, bands[b],
            {subject.subject_id, static_cast<int>(ref.session), spec.task_label});
        metrics[b][static_cast<std::size_t>(job) / bands.size()] =
            compute_network_metrics(network.adjacency);
    });

    ordered_json summary = ordered_json::array();
    std::ofstream summary_csv(dir / "summary.csv");
    summary_csv << "subband,task,n_networks,mean_std_out_degree,std_std_out_degree,"
                   "mean_total_strength,std_total_strength,mean_global_efficiency,"
                   "std_global_efficiency\n"
                << std::setprecision(17);

    for (std::size_t b = 0; b < bands.size(); ++b) {
        for (int task = 1; task <= dataset.n_classes; ++task) {
            std::vector<NetworkMetrics> group;
            for (std::size_t i = 0; i < refs.size(); ++i) {
                const auto& subject = dataset.subjects[refs[i].subject];
                if (subject.sessions[refs[i].session].task_label == task) {
                    group.push_back(metrics[b][i]);
                }
            }
            if (group.empty()) continue;
            const GroupSummary gs = subband_summary(group);

            const std::string band_label = bands[b].label();
            std::ofstream csv(dir / ("band_" + band_label + "_task_" + std::to_string(task) +
                                     ".csv"));
            csv << "region,mean_out_degree,std_out_degree,mean_in_degree,mean_out_strength,"
                   "std_out_strength,mean_betweenness,std_betweenness\n"
                << std::setprecision(17);
            for (Index r = 0; r < gs.mean_out_degree.size(); ++r) {
                const std::string name =
                    dataset.region_names.empty() ? "r" + std::to_string(r)
                                                 : dataset.region_names[static_cast<std::size_t>(r)];
                csv << name << ',' << gs.mean_out_degree[r] << ','
                    << gs.std_out_degree_nodewise[r] << ',' << gs.mean_in_degree[r] << ','
                    << gs.mean_out_strength[r] << ',' << gs.std_out_strength[r] << ','
                    << gs.mean_betweenness[r] << ',' << gs.std_betweenness[r] << '\n';
            }

            summary_csv << band_label << ',' << task << ',' << gs.n_networks << ','
                        << gs.mean_std_out_degree << ',' << gs.std_std_out_degree << ','
                        << gs.mean_total_strength << ',' << gs.std_total_strength << ','
                        << gs.mean_global_efficiency << ',' << gs.std_global_efficiency << '\n';

            ordered_json cell;
            cell["subband"] = band_label;
            cell["task"] = task;
            cell["n_networks"] = gs.n_networks;
            cell["mean_std_out_degree"] = gs.mean_std_out_degree;
            cell["std_std_out_degree"] = gs.std_std_out_degree;
            cell["mean_total_strength"] = gs.mean_total_strength;
            cell["std_total_strength"] = gs.std_total_strength;
            cell["mean_global_efficiency"] = gs.mean_global_efficiency;
            cell["std_global_efficiency"] = gs.std_global_efficiency;
            summary.push_back(cell);
        }
    }
    ordered_json doc;
    doc["tool"] = "meshband";
    doc["version"] = kToolVersion;
    doc["config_hash"] = hex64(config.config_hash());
    doc["groups"] = summary;
    write_text(dir / "summary.json", doc.dump(2) + "\n");
    log << "metrics: wrote per-subband tables for " << bands.size() << " subbands to " << dir
        << "\n";
}

std::string results_schema_text() {
    return R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "meshband train results",
  "type": "object",
  "required": ["tool", "version", "config_hash", "config", "dataset", "subbands", "base", "fsg"],
  "properties": {
    "tool": {"type": "string"},
    "version": {"type": "string"},
    "config_hash": {"type": "string"},
    "config": {"type": "object"},
    "dataset": {
      "type": "object",
      "required": ["subjects", "regions", "classes", "sessions"],
      "properties": {
        "subjects": {"type": "integer"},
        "regions": {"type": "integer"},
        "classes": {"type": "integer"},
        "sessions": {"type": "integer"}
      }
    },
    "subbands": {"type": "array", "items": {"type": "string"}},
    "base": {
      "type": "object",
      "required": ["kind", "mean_accuracy", "std_accuracy", "train_accuracy"],
      "properties": {
        "kind": {"type": "string"},
        "mean_accuracy": {"type": "array", "items": {"type": "number"}},
        "std_accuracy": {"type": "array", "items": {"type": "number"}},
        "train_accuracy": {"type": "array", "items": {"type": "number"}}
      }
    },
    "fsg": {
      "type": "object",
      "required": ["meta", "fold_accuracies", "mean_accuracy", "std_accuracy", "confusion"],
      "properties": {
        "meta": {"type": "string"},
        "fold_accuracies": {"type": "array", "items": {"type": "number"}},
        "mean_accuracy": {"type": "number"},
        "std_accuracy": {"type": "number"},
        "confusion": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
      }
    }
  }
})";
}

void run_train_stage(const PipelineConfig& config, std::ostream& log) {
    const Dataset dataset = load_configured_dataset(config);
    bool cache_hit = false;
    const std::vector<FeatureTable> tables = feature_tables_cached(dataset, config, &cache_hit);
    if (cache_hit) log << "train: feature cache hit\n";

    std::vector<std::string> subject_ids;
    subject_ids.reserve(dataset.subjects.size());
    for (const auto& subject : dataset.subjects) subject_ids.push_back(subject.subject_id);

    const FoldPlan plan = make_fold_plan(subject_ids, config.k, config.seed);
    const ClassifierKind base_kind = classifier_kind_from_name(config.base);
    const MetaKind meta_kind = meta_kind_from_name(config.meta);
    const FsgRunResult result = run_fsg(tables, plan, base_kind, meta_kind, config.reg,
                                        config.seed, effective_threads(config));

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out_dir(config.out_dir);

    ordered_json doc;
    doc["tool"] = "meshband";
    doc["version"] = kToolVersion;
    doc["config_hash"] = hex64(config.config_hash());
    doc["config"] = config_json(config);
    doc["dataset"] = {{"subjects", dataset.subjects.size()},
                      {"regions", dataset.n_regions()},
                      {"classes", dataset.n_classes},
                      {"sessions", dataset.n_sessions()}};
    ordered_json bands = ordered_json::array();
    for (const auto& band : result.base_order) bands.push_back(band.label());
    doc["subbands"] = bands;
    ordered_json base;
    base["kind"] = config.base;
    base["mean_accuracy"] = result.base_mean_accuracy;
    base["std_accuracy"] = result.base_std_accuracy;
    base["train_accuracy"] = result.base_train_accuracy;  // nested-CV, also the WMV weights
    doc["base"] = base;
    ordered_json fsg;
    fsg["meta"] = config.meta;
    fsg["fold_accuracies"] = result.fold_accuracies;
    fsg["mean_accuracy"] = result.mean_accuracy;
    fsg["std_accuracy"] = result.std_accuracy;
    ordered_json confusion = ordered_json::array();
    for (Index r = 0; r < result.confusion.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < result.confusion.cols(); ++c) row.push_back(result.confusion(r, c));
        confusion.push_back(row);
    }
    fsg["confusion"] = confusion;
    doc["fsg"] = fsg;

    write_text(out_dir / "results.json", doc.dump(2) + "\n");
    write_text(out_dir / "results.schema.json", results_schema_text() + std::string("\n"));

    MembershipMatrix memberships;
    memberships.memberships = result.memberships;
    memberships.labels = result.labels;
    memberships.subject_ids = result.subject_ids;
    memberships.n_classes = dataset.n_classes;
    for (const auto& band : result.base_order) memberships.base_labels.push_back(band.label());
    save_memberships(memberships, out_dir / "memberships.bin");

    log << "train: FSG-" << (config.meta == "logistic" ? "L" : config.meta)
        << " accuracy " << result.mean_accuracy << " +/- " << result.std_accuracy << " ("
        << config.k << " folds); report in " << (out_dir / "results.json") << "\n";
}

void run_diversity_stage(const PipelineConfig& config, std::ostream& log) {
    const std::filesystem::path out_dir(config.out_dir);
    const MembershipMatrix m = load_memberships(out_dir / "memberships.bin");
    std::filesystem::create_directories(out_dir / "diversity");

    std::ofstream csv(out_dir / "diversity" / "diversity.csv");
    csv << "level,bases,disagreement,mean_q,mean_rho,entropy,kappa,kw,theta\n"
        << std::setprecision(17);
    ordered_json rows = ordered_json::array();

    const auto level_of = [](const std::string& label) {
        return std::stoi(label.substr(1));
    };
    const auto emit_row = [&](const std::string& name, const std::vector<std::size_t>& blocks) {
        if (blocks.empty()) return;
        Matrix selected(m.memberships.rows(),
                        static_cast<Index>(blocks.size()) * m.n_classes);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            selected.middleCols(static_cast<Index>(i) * m.n_classes, m.n_classes) =
                m.memberships.middleCols(static_cast<Index>(blocks[i]) * m.n_classes,
                                         m.n_classes);
        }
        const OracleMatrix oracle = oracle_outputs(selected, m.labels, m.n_classes);
        const DiversityReport report = diversity_report(oracle);
        csv << name << ',' << blocks.size() << ',' << report.pairwise.disagreement << ','
            << report.pairwise.mean_q << ',' << report.pairwise.mean_rho << ','
            << report.nonpairwise.entropy << ',' << report.nonpairwise.kappa << ','
            << report.nonpairwise.kw_variance << ',' << report.nonpairwise.theta << '\n';
        ordered_json row;
        row["level"] = name;
        row["bases"] = blocks.size();
        row["disagreement"] = report.pairwise.disagreement;
        row["mean_q"] = report.pairwise.mean_q;
        row["mean_rho"] = report.pairwise.mean_rho;
        row["entropy"] = report.nonpairwise.entropy;
        row["kappa"] = report.nonpairwise.kappa;
        row["kw"] = report.nonpairwise.kw_variance;
        row["theta"] = report.nonpairwise.theta;
        row["degenerate"] =
            report.pairwise.degenerate || report.nonpairwise.degenerate;
        rows.push_back(row);
    };

    int max_level = 0;
    for (const auto& label : m.base_labels) max_level = std::max(max_level, level_of(label));
    for (int level = 2; level <= max_level; ++level) {
        std::vector<std::size_t> blocks;
        for (std::size_t e = 0; e < m.base_labels.size(); ++e) {
            const int l = level_of(m.base_labels[e]);
            if (l >= 1 && l <= level) blocks.push_back(e);
        }
        emit_row(std::to_string(level), blocks);
    }
    std::vector<std::size_t> all(m.base_labels.size());
    for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;
    emit_row("all", all);

    ordered_json doc;
    doc["tool"] = "meshband";
    doc["version"] = kToolVersion;
    doc["config_hash"] = hex64(config.config_hash());
    doc["rows"] = rows;
    write_text(out_dir / "diversity" / "diversity.json", doc.dump(2) + "\n");
    log << "diversity: wrote " << rows.size() << " ensemble rows to "
        << (out_dir / "diversity") << "\n";
}

void run_significance_stage(const PipelineConfig& config, bool as_printed, std::ostream& log) {
    const std::filesystem::path out_dir(config.out_dir);
    const MembershipMatrix m = load_memberships(out_dir / "memberships.bin");
    std::filesystem::create_directories(out_dir / "significance");

    const SignificanceTable table =
        membership_significance(m.memberships, m.labels, m.n_classes, as_printed);

    std::ofstream max_csv(out_dir / "significance" / "max_z.csv");
    max_csv << "class";
    for (const auto& label : m.base_labels) max_csv << ',' << label;
    max_csv << '\n' << std::setprecision(17);
    for (int c = 1; c <= m.n_classes; ++c) {
        max_csv << c;
        for (Index b = 0; b < table.max_z_per_block.cols(); ++b) {
            max_csv << ',' << table.max_z_per_block(c - 1, b);
        }
        max_csv << '\n';
    }
    for (int c = 1; c <= m.n_classes; ++c) {
        std::ofstream csv(out_dir / "significance" / ("z_class" + std::to_string(c) + ".csv"));
        csv << "feature,z\n" << std::setprecision(17);
        const Vector& z = table.z_per_class[static_cast<std::size_t>(c - 1)];
        for (Index f = 0; f < z.size(); ++f) csv << f << ',' << z[f] << '\n';
    }

    ordered_json doc;
    doc["tool"] = "meshband";
    doc["version"] = kToolVersion;
    doc["config_hash"] = hex64(config.config_hash());
    doc["as_printed"] = as_printed;
    ordered_json max_z = ordered_json::array();
    for (int c = 1; c <= m.n_classes; ++c) {
        ordered_json row = ordered_json::array();
        for (Index b = 0; b < table.max_z_per_block.cols(); ++b) {
            row.push_back(table.max_z_per_block(c - 1, b));
        }
        max_z.push_back(row);
    }
    doc["base_labels"] = m.base_labels;
    doc["max_z"] = max_z;
    write_text(out_dir / "significance" / "significance.json", doc.dump(2) + "\n");
    log << "significance: wrote z tables for " << m.n_classes << " classes to "
        << (out_dir / "significance") << "\n";
}

void run_report_stage(const PipelineConfig& config, std::ostream& out) {
    const std::filesystem::path results = std::filesystem::path(config.out_dir) / "results.json";
    const ordered_json doc = ordered_json::parse(read_text(results));

    out << "meshband " << doc["version"].get<std::string>() << "  (config "
        << doc["config_hash"].get<std::string>() << ")\n";
    const auto& ds = doc["dataset"];
    out << "dataset: " << ds["subjects"] << " subjects, " << ds["regions"] << " regions, "
        << ds["classes"] << " classes, " << ds["sessions"] << " sessions\n\n";

    out << "single-subband base accuracy (" << doc["base"]["kind"].get<std::string>() << ", "
        << doc["config"]["features"].get<std::string>() << " features):\n";
    out << "  band    mean     std\n";
    const auto& bands = doc["subbands"];
    const auto& mean = doc["base"]["mean_accuracy"];
    const auto& std_dev = doc["base"]["std_accuracy"];
    for (std::size_t i = 0; i < bands.size(); ++i) {
        out << "  " << std::left << std::setw(6) << bands[i].get<std::string>() << std::right
            << std::fixed << std::setprecision(4) << std::setw(8) << mean[i].get<double>()
            << std::setw(8) << std_dev[i].get<double>() << "\n";
    }
    out << "\nfusion (" << doc["fsg"]["meta"].get<std::string>() << " meta): "
        << std::setprecision(4) << doc["fsg"]["mean_accuracy"].get<double>() << " +/- "
        << doc["fsg"]["std_accuracy"].get<double>() << " over "
        << doc["fsg"]["fold_accuracies"].size() << " folds\n";

    out << "\nconfusion (rows = truth):\n";
    for (const auto& row : doc["fsg"]["confusion"]) {
        out << "  ";
        for (const auto& cell : row) out << std::setw(6) << cell.get<double>();
        out << "\n";
    }
    out.unsetf(std::ios::fixed);
}

namespace {

void schema_check(const ordered_json& value, const ordered_json& schema, const std::string& path,
                  std::vector<std::string>& violations) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        bool ok = true;
        if (type == "object") ok = value.is_object();
        else if (type == "array") ok = value.is_array();
        else if (type == "string") ok = value.is_string();
        else if (type == "integer") ok = value.is_number_integer() || value.is_number_unsigned();
        else if (type == "number") ok = value.is_number();
        else if (type == "boolean") ok = value.is_boolean();
        if (!ok) {
            violations.push_back(path + ": expected " + type);
            return;
        }
    }
    if (schema.contains("required") && value.is_object()) {
        for (const auto& name : schema["required"]) {
            if (!value.contains(name.get<std::string>())) {
                violations.push_back(path + ": missing required key '" +
                                     name.get<std::string>() + "'");
            }
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [name, subschema] : schema["properties"].items()) {
            if (value.contains(name)) {
                schema_check(value.at(name), subschema, path + "/" + name, violations);
            }
        }
    }
    if (schema.contains("items") && value.is_array()) {
        std::size_t i = 0;
        for (const auto& element : value) {
            schema_check(element, schema["items"], path + "[" + std::to_string(i) + "]",
                         violations);
            ++i;
        }
    }
}

}  // namespace

std::vector<std::string> validate_against_schema(const std::string& document_json,
                                                 const std::string& schema_json) {
    std::vector<std::string> violations;
    const ordered_json document = ordered_json::parse(document_json);
    const ordered_json schema = ordered_json::parse(schema_json);
    schema_check(document, schema, "$", violations);
    return violations;
}

bool run_verify_stage(std::ostream& log) {
    bool all_ok = true;
    const auto report = [&](const std::string& name, bool ok) {
        log << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        all_ok = all_ok && ok;
    };
    std::mt19937_64 rng(20260809);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.05, 1.0);

    // Analysis pyramid against the explicit transform-matrix route.
    {
        bool ok = true;
        for (const char* name : {"haar", "daubechies4", "battle_lemarie_cubic"}) {
            const WaveletFamily family = WaveletFamily::from_name(name);
            Vector signal(256);
            for (Index i = 0; i < signal.size(); ++i) signal[i] = normal(rng);
            const WaveletCoefficients fast = decompose(signal, family, 5);
            const WaveletCoefficients slow = oracles::matrix_dwt(signal, family, 5);
            for (int l = 0; l < 5; ++l) {
                for (std::size_t i = 0; i < fast.approx[l].size(); ++i) {
                    ok = ok && std::abs(fast.approx[l][i] - slow.approx[l][i]) < 1e-10;
                    ok = ok && std::abs(fast.detail[l][i] - slow.detail[l][i]) < 1e-10;
                }
            }
        }
        report("wavelet pyramid matches transform-matrix oracle", ok);
    }
    // Ridge solver against Gaussian elimination.
    {
        bool ok = true;
        for (int trial = 0; trial < 10; ++trial) {
            Matrix session(8, 40);
            for (Index r = 0; r < session.rows(); ++r) {
                for (Index c = 0; c < session.cols(); ++c) session(r, c) = normal(rng);
            }
            const Neighborhood hood = functional_neighbors(session, 0, 3);
            const RidgeFit fit = ridge_mesh(session, hood, 32.0);
            Matrix design(session.cols(), 3);
            for (Index i = 0; i < 3; ++i) {
                design.col(i) =
                    session.row(hood.neighbors[static_cast<std::size_t>(i)]).transpose();
            }
            const Vector w =
                oracles::dense_ridge_solve(design, session.row(0).transpose(), 32.0);
            ok = ok && (fit.weights - w).cwiseAbs().maxCoeff() < 1e-9;
        }
        report("ridge weights match dense normal-equations oracle", ok);
    }
    // Graph metrics against exhaustive enumeration.
    {
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            const Index n = 5 + static_cast<Index>(rng() % 3);
            Matrix adjacency = Matrix::Zero(n, n);
            for (Index r = 0; r < n; ++r) {
                for (Index s = 0; s < n; ++s) {
                    if (r != s && rng() % 3 != 0) adjacency(r, s) = unit(rng);
                }
            }
            const Vector fast = betweenness_centrality(adjacency);
            const Vector slow = oracles::brute_betweenness(adjacency);
            ok = ok && (fast - slow).cwiseAbs().maxCoeff() < 1e-9;
            ok = ok && std::abs(global_efficiency(adjacency) -
                                oracles::brute_global_efficiency(adjacency)) < 1e-10;
        }
        report("graph metrics match brute-force path enumeration", ok);
    }
    // Diversity identity KW = Disagr (E-1) / (2E).
    {
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            OracleMatrix oracle(12, 5);
            for (Index r = 0; r < oracle.rows(); ++r) {
                for (Index c = 0; c < oracle.cols(); ++c) {
                    oracle(r, c) = static_cast<int>(rng() % 2);
                }
            }
            const DiversityReport report_values = diversity_report(oracle);
            const double expected =
                report_values.pairwise.disagreement * (5.0 - 1.0) / (2.0 * 5.0);
            ok = ok && std::abs(report_values.nonpairwise.kw_variance - expected) < 1e-12;
        }
        report("Kohavi-Wolpert variance ties out against disagreement", ok);
    }
    return all_ok;
}

}  // namespace meshband
