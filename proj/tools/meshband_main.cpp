#include "meshband/config.hpp"
#include "meshband/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

namespace {

struct CommonOptions {
    std::string config_file;
    meshband::PipelineConfig pipeline;
    std::string subbands_csv;
};

void add_pipeline_flags(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_file, "key = value configuration file");
    cmd->add_option("--data", opts.pipeline.data_path, "dataset path (csv dir or bin file)");
    cmd->add_option("--format", opts.pipeline.data_format, "dataset format: csv|bin");
    cmd->add_option("--out", opts.pipeline.out_dir, "output directory");
    cmd->add_option("--family", opts.pipeline.family,
                    "wavelet family: haar|daubechies4|battle_lemarie_cubic");
    cmd->add_option("--levels", opts.pipeline.levels, "decomposition levels L");
    cmd->add_option("--subbands", opts.subbands_csv,
                    "subband selection: 'all' or labels like A0,A2,D3 (default: all but D1)");
    cmd->add_option("--p", opts.pipeline.p, "mesh neighborhood size");
    cmd->add_option("--lambda", opts.pipeline.lambda, "ridge regularization");
    cmd->add_flag("!--no-standardize", opts.pipeline.standardize,
                  "skip per-session z-scoring of region series");
    cmd->add_option("--features", opts.pipeline.feature_kind, "feature kind: mesh|corr|raw");
    cmd->add_option("--t-fix", opts.pipeline.t_fix,
                    "fixed length for raw features (0 = longest session)");
    cmd->add_option("--base", opts.pipeline.base, "base classifier: logistic|maxmargin");
    cmd->add_option("--meta", opts.pipeline.meta, "meta layer: logistic|maxmargin|mv|wmv");
    cmd->add_option("--k", opts.pipeline.k, "cross-validation folds");
    cmd->add_option("--reg", opts.pipeline.reg, "classifier L2 strength");
    cmd->add_option("--seed", opts.pipeline.seed, "seed for folds and optimizers");
    cmd->add_option("--threads", opts.pipeline.threads, "worker threads (0 = hardware)");
}

// Flags win over the file, the file over defaults: parse the file first,
// then re-apply any flag the user passed.
meshband::PipelineConfig resolve_config(const CLI::App* cmd, CommonOptions& opts) {
    meshband::PipelineConfig config = opts.pipeline;
    if (!opts.config_file.empty()) {
        meshband::PipelineConfig from_file;
        from_file.apply(meshband::KeyValueConfig::parse_file(opts.config_file));
        const auto keep = [&](const std::string& flag) { return cmd->count(flag) > 0; };
        if (!keep("--data")) config.data_path = from_file.data_path;
        if (!keep("--format")) config.data_format = from_file.data_format;
        if (!keep("--out")) config.out_dir = from_file.out_dir;
        if (!keep("--family")) config.family = from_file.family;
        if (!keep("--levels")) config.levels = from_file.levels;
        if (!keep("--subbands") && opts.subbands_csv.empty()) config.subbands = from_file.subbands;
        if (!keep("--p")) config.p = from_file.p;
        if (!keep("--lambda")) config.lambda = from_file.lambda;
        if (!keep("--no-standardize")) config.standardize = from_file.standardize;
        if (!keep("--features")) config.feature_kind = from_file.feature_kind;
        if (!keep("--t-fix")) config.t_fix = from_file.t_fix;
        if (!keep("--base")) config.base = from_file.base;
        if (!keep("--meta")) config.meta = from_file.meta;
        if (!keep("--k")) config.k = from_file.k;
        if (!keep("--reg")) config.reg = from_file.reg;
        if (!keep("--seed")) config.seed = from_file.seed;
        if (!keep("--threads")) config.threads = from_file.threads;
    }
    if (!opts.subbands_csv.empty()) {
        config.subbands.clear();
        std::string item;
        std::stringstream stream(opts.subbands_csv);
        while (std::getline(stream, item, ',')) {
            if (!item.empty()) config.subbands.push_back(item);
        }
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshband: multi-resolution mesh-network decoding pipeline"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string synth_config_file;
    std::string synth_out = "synth_data";
    std::string synth_format = "csv";
    bool as_printed = false;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", synth_config_file, "synth configuration file");
    synth->add_option("--out", synth_out, "output path (csv dir or bin file)");
    synth->add_option("--format", synth_format, "output format: csv|bin");

    CLI::App* decompose = app.add_subcommand("decompose", "write per-subject subband stacks");
    CLI::App* mesh = app.add_subcommand("mesh", "build per-subband feature tables");
    CLI::App* metrics = app.add_subcommand("metrics", "network topology tables per subband");
    CLI::App* train = app.add_subcommand("train", "train base + meta layers, write results.json");
    CLI::App* diversity = app.add_subcommand("diversity", "ensemble diversity tables");
    CLI::App* significance =
        app.add_subcommand("significance", "class-membership significance tables");
    significance->add_flag("--as-printed", as_printed,
                           "use the unpooled difference-of-variances statistic");
    CLI::App* report = app.add_subcommand("report", "print the human-readable results summary");
    CLI::App* verify = app.add_subcommand("verify", "run oracle cross-checks");

    for (CLI::App* cmd : {decompose, mesh, metrics, train, diversity, significance, report}) {
        add_pipeline_flags(cmd, opts);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        if (synth->parsed()) {
            meshband::SynthConfig config =
                synth_config_file.empty()
                    ? meshband::default_benchmark_config()
                    : meshband::synth_config_from(
                          meshband::KeyValueConfig::parse_file(synth_config_file));
            meshband::run_synth_stage(config, synth_out, synth_format, std::cout);
            return 0;
        }
        if (verify->parsed()) {
            return meshband::run_verify_stage(std::cout) ? 0 : 1;
        }

        CLI::App* active = app.get_subcommands().front();
        const meshband::PipelineConfig config = resolve_config(active, opts);
        if (decompose->parsed()) meshband::run_decompose_stage(config, std::cout);
        else if (mesh->parsed()) meshband::run_mesh_stage(config, std::cout);
        else if (metrics->parsed()) meshband::run_metrics_stage(config, std::cout);
        else if (train->parsed()) meshband::run_train_stage(config, std::cout);
        else if (diversity->parsed()) meshband::run_diversity_stage(config, std::cout);
        else if (significance->parsed())
            meshband::run_significance_stage(config, as_printed, std::cout);
        else if (report->parsed()) meshband::run_report_stage(config, std::cout);
        return 0;
    } catch (const std::exception& error) {
        std::cerr << "error in stage '" << stage << "': " << error.what() << "\n";
        return 1;
    }
}
