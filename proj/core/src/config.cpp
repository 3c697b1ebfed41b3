#include "meshband/config.hpp"

#include "meshband/dataset_io.hpp"
#include "meshband/fsg.hpp"
#include "meshband/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace meshband {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), file.string());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
    KeyValueConfig config;
    config.origin_ = origin;
    std::stringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = strip_quotes(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        config.values_[key] = value;
    }
    return config;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::int64_t v = 0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
        throw std::runtime_error(origin_ + ": key '" + key + "': expected integer, got '" +
                                 it->second + "'");
    }
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
        throw std::runtime_error(origin_ + ": key '" + key + "': expected number, got '" +
                                 it->second + "'");
    }
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw std::runtime_error(origin_ + ": key '" + key + "': expected boolean, got '" +
                             it->second + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    std::vector<std::string> items;
    const auto it = values_.find(key);
    if (it == values_.end()) return items;
    std::stringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

namespace {

std::vector<PlantedArc> parse_arcs(const std::string& text, const std::string& key) {
    std::vector<PlantedArc> arcs;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        // sink<-source:weight
        const auto arrow = item.find("<-");
        const auto colon = item.find(':', arrow == std::string::npos ? 0 : arrow + 2);
        if (arrow == std::string::npos || colon == std::string::npos) {
            throw std::runtime_error("synth config key '" + key + "': expected sink<-source:weight, got '" +
                                     item + "'");
        }
        PlantedArc arc;
        arc.sink = std::stoi(trim(item.substr(0, arrow)));
        arc.source = std::stoi(trim(item.substr(arrow + 2, colon - arrow - 2)));
        arc.weight = std::stod(trim(item.substr(colon + 1)));
        arcs.push_back(arc);
    }
    return arcs;
}

}  // namespace

SynthConfig synth_config_from(const KeyValueConfig& config) {
    const bool default_plan = config.get_bool("default_plan", true);
    SynthConfig base = default_plan ? default_benchmark_config() : SynthConfig{};

    base.regions = static_cast<int>(config.get_int("regions", base.regions));
    base.n_classes = static_cast<int>(config.get_int("classes", base.n_classes));
    base.levels = static_cast<int>(config.get_int("levels", base.levels));
    base.n_subjects = static_cast<int>(config.get_int("subjects", base.n_subjects));
    base.scans_per_session = config.get_int("scans", base.scans_per_session);
    base.noise_level = config.get_double("noise", base.noise_level);
    base.latent_scale = config.get_double("latent_scale", base.latent_scale);
    base.seed = static_cast<std::uint64_t>(config.get_int("seed", static_cast<std::int64_t>(base.seed)));
    base.family = config.get_string("family", base.family);

    const bool shape_changed = static_cast<int>(base.classes.size()) != base.n_classes;
    bool any_plant = false;
    for (int c = 1; c <= base.n_classes; ++c) {
        if (config.has("plant." + std::to_string(c))) any_plant = true;
    }
    if (shape_changed || any_plant) {
        if (!default_plan || shape_changed) base.classes.assign(static_cast<std::size_t>(base.n_classes), ClassPlan{});
    }
    for (int c = 1; c <= base.n_classes; ++c) {
        const std::string key = "plant." + std::to_string(c);
        if (!config.has(key)) continue;
        const std::string value = config.get_string(key, "");
        const auto colon = value.find(':');
        if (colon == std::string::npos) {
            throw std::runtime_error("synth config key '" + key + "': expected <band>: <arcs>");
        }
        ClassPlan plan;
        plan.subband_j = SubbandIndex::parse(trim(value.substr(0, colon)), base.levels).j;
        plan.arcs = parse_arcs(value.substr(colon + 1), key);
        base.classes[static_cast<std::size_t>(c - 1)] = std::move(plan);
    }
    base.validate();
    return base;
}

void PipelineConfig::apply(const KeyValueConfig& file_config) {
    data_path = file_config.get_string("data", data_path);
    data_format = file_config.get_string("format", data_format);
    out_dir = file_config.get_string("out", out_dir);
    family = file_config.get_string("family", family);
    levels = static_cast<int>(file_config.get_int("levels", levels));
    if (file_config.has("subbands")) subbands = file_config.get_list("subbands");
    p = static_cast<int>(file_config.get_int("p", p));
    lambda = file_config.get_double("lambda", lambda);
    standardize = file_config.get_bool("standardize", standardize);
    feature_kind = file_config.get_string("features", feature_kind);
    t_fix = file_config.get_int("t_fix", t_fix);
    base = file_config.get_string("base", base);
    meta = file_config.get_string("meta", meta);
    k = static_cast<int>(file_config.get_int("k", k));
    reg = file_config.get_double("reg", reg);
    seed = static_cast<std::uint64_t>(file_config.get_int("seed", static_cast<std::int64_t>(seed)));
    threads = static_cast<int>(file_config.get_int("threads", threads));
}

void PipelineConfig::validate() const {
    data_format_from_name(data_format);
    WaveletFamily::from_name(family);
    feature_kind_from_name(feature_kind);
    if (levels < 1) throw std::invalid_argument("config: levels must be >= 1");
    if (p < 1) throw std::invalid_argument("config: p must be >= 1");
    if (lambda < 0) throw std::invalid_argument("config: lambda must be >= 0");
    if (k < 2) throw std::invalid_argument("config: k must be >= 2");
    if (t_fix < 0) throw std::invalid_argument("config: t_fix must be >= 0");
    for (const auto& label : subbands) SubbandIndex::parse(label, levels);
    if (base != "logistic" && base != "maxmargin") {
        throw std::invalid_argument("config: base must be logistic or maxmargin");
    }
    meta_kind_from_name(meta);
}

std::string PipelineConfig::canonical_text() const {
    std::stringstream out;
    out << "data=" << data_path << "\nformat=" << data_format << "\nfamily=" << family
        << "\nlevels=" << levels << "\nsubbands=";
    for (std::size_t i = 0; i < subbands.size(); ++i) out << (i ? "," : "") << subbands[i];
    out << "\np=" << p << "\nlambda=" << lambda << "\nstandardize=" << standardize
        << "\nfeatures=" << feature_kind << "\nt_fix=" << t_fix << "\nbase=" << base
        << "\nmeta=" << meta << "\nk=" << k << "\nreg=" << reg << "\nseed=" << seed << "\n";
    return out.str();
}

std::uint64_t PipelineConfig::config_hash() const {
    const std::string text = canonical_text();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace meshband
