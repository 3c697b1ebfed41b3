#pragma once

#include "meshband/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meshband {

/// Flat `key = value` configuration text: one pair per line, `#` comments,
/// values may be quoted; list values are comma-separated.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::filesystem::path& file);
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

/// Builds a SynthConfig from configuration text. Planted structure uses keys
/// `plant.<class> = <band>: <sink><-<source>:<weight>, ...`; classes without
/// a plant key fall back to the default benchmark plan when `default_plan`
/// is set, otherwise to noise only.
SynthConfig synth_config_from(const KeyValueConfig& config);

/// Everything a pipeline run needs; flag values override file values which
/// override these defaults.
struct PipelineConfig {
    std::string data_path;
    std::string data_format = "csv";
    std::string out_dir = "out";
    std::string family = "daubechies4";
    int levels = 11;
    std::vector<std::string> subbands;  // empty = all except D1
    int p = 40;
    double lambda = 32.0;
    bool standardize = true;
    std::string feature_kind = "mesh";
    std::int64_t t_fix = 0;  // 0 = longest session in the dataset
    std::string base = "logistic";
    std::string meta = "logistic";
    int k = 5;
    double reg = 1.0;
    std::uint64_t seed = 7;
    int threads = 0;  // 0 = hardware concurrency

    void apply(const KeyValueConfig& file_config);
    void validate() const;

    /// FNV-1a over the canonical serialization; identifies cached artifacts.
    std::uint64_t config_hash() const;
    std::string canonical_text() const;
};

}  // namespace meshband
