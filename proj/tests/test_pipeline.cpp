#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshband/config.hpp"
#include "meshband/dataset_io.hpp"
#include "meshband/memberships.hpp"
#include "meshband/pipeline.hpp"
#include "meshband/synth.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace meshband;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("meshband_pipe_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Small two-class corpus shared by the stage tests.
SynthConfig small_synth() {
    SynthConfig config;
    config.regions = 8;
    config.n_classes = 2;
    config.levels = 3;
    config.n_subjects = 6;
    config.scans_per_session = 64;
    config.noise_level = 0.3;
    config.seed = 11;
    config.classes = {
        {config.levels + 2, {{1, 0, 1.6}, {2, 0, 1.4}}},
        {config.levels + 3, {{4, 3, 1.6}, {5, 3, 1.4}}},
    };
    return config;
}

PipelineConfig small_pipeline(const std::filesystem::path& data,
                              const std::filesystem::path& out) {
    PipelineConfig config;
    config.data_path = data.string();
    config.data_format = "csv";
    config.out_dir = out.string();
    config.family = "daubechies4";
    config.levels = 3;
    config.p = 3;
    config.lambda = 4.0;
    config.k = 3;
    config.seed = 5;
    config.reg = 1.0;
    return config;
}

}  // namespace

TEST_CASE("key-value config parsing") {
    const auto parsed = KeyValueConfig::parse_text(
        "# comment\n"
        "regions = 12\n"
        "family = \"haar\"   # trailing comment\n"
        "noise = 0.25\n"
        "standardize = false\n"
        "subbands = A1, D2 ,D3\n",
        "inline");
    CHECK(parsed.get_int("regions", 0) == 12);
    CHECK(parsed.get_string("family", "") == "haar");
    CHECK(parsed.get_double("noise", 0.0) == doctest::Approx(0.25));
    CHECK(parsed.get_bool("standardize", true) == false);
    CHECK(parsed.get_list("subbands") == std::vector<std::string>{"A1", "D2", "D3"});
    CHECK(parsed.get_int("missing", 9) == 9);
    CHECK_THROWS(KeyValueConfig::parse_text("key value\n", "inline"));
    CHECK_THROWS(parsed.get_int("family", 0));
}

TEST_CASE("synth config text round-trips planted structure") {
    const auto parsed = KeyValueConfig::parse_text(
        "default_plan = false\n"
        "regions = 9\n"
        "classes = 2\n"
        "levels = 3\n"
        "subjects = 4\n"
        "scans = 32\n"
        "noise = 0.1\n"
        "seed = 21\n"
        "plant.1 = D2: 1<-0:1.5, 2<-0:1.25\n"
        "plant.2 = A3: 5<-4:2.0\n",
        "inline");
    const SynthConfig config = synth_config_from(parsed);
    CHECK(config.regions == 9);
    CHECK(config.n_classes == 2);
    REQUIRE(config.classes.size() == 2);
    CHECK(config.classes[0].subband_j == 5);  // D2 with L=3
    REQUIRE(config.classes[0].arcs.size() == 2);
    CHECK(config.classes[0].arcs[1].sink == 2);
    CHECK(config.classes[0].arcs[1].weight == doctest::Approx(1.25));
    CHECK(config.classes[1].subband_j == 3);  // A3
}

TEST_CASE("pipeline config: file apply, validation, hashing") {
    PipelineConfig config;
    config.apply(KeyValueConfig::parse_text("p = 12\nlambda = 8\nmeta = wmv\nk = 4\n", "inline"));
    CHECK(config.p == 12);
    CHECK(config.lambda == doctest::Approx(8.0));
    CHECK(config.meta == "wmv");
    CHECK(config.k == 4);
    CHECK_NOTHROW(config.validate());

    const std::uint64_t hash = config.config_hash();
    CHECK(hash == config.config_hash());  // stable
    PipelineConfig other = config;
    other.p = 13;
    CHECK(other.config_hash() != hash);
    other = config;
    other.out_dir = "elsewhere";  // output location does not change identity
    CHECK(other.config_hash() == hash);

    PipelineConfig bad = config;
    bad.base = "forest";
    CHECK_THROWS(bad.validate());
    bad = config;
    bad.subbands = {"D13"};  // beyond the default L = 11
    CHECK_THROWS(bad.validate());
}

TEST_CASE("subband resolution") {
    PipelineConfig config;
    config.levels = 3;
    CHECK(resolve_subbands(config).size() == 6);  // 2L+1 minus D1
    for (const auto& band : resolve_subbands(config)) CHECK(band.label() != "D1");

    config.subbands = {"all"};
    CHECK(resolve_subbands(config).size() == 7);

    config.subbands = {"A0", "D2"};
    const auto bands = resolve_subbands(config);
    REQUIRE(bands.size() == 2);
    CHECK(bands[0].label() == "A0");
    CHECK(bands[1].label() == "D2");
}

TEST_CASE("train stage end to end: report, schema, caching, determinism") {
    const auto data_dir = temp_dir("data");
    const auto out_a = temp_dir("out_a");
    const auto out_b = temp_dir("out_b");
    std::ostringstream log;

    run_synth_stage(small_synth(), data_dir, "csv", log);
    PipelineConfig config = small_pipeline(data_dir, out_a);

    run_train_stage(config, log);
    const std::string report = slurp(out_a / "results.json");
    const std::string schema = slurp(out_a / "results.schema.json");
    CHECK(validate_against_schema(report, schema).empty());

    // Determinism: a second cold run produces byte-identical JSON.
    PipelineConfig config_b = config;
    config_b.out_dir = out_b.string();
    run_train_stage(config_b, log);
    CHECK(slurp(out_b / "results.json") == report);

    // Cache: rerunning in the same out dir reuses the feature tables and
    // reproduces the identical report.
    const Dataset dataset = load_configured_dataset(config);
    bool cache_hit = false;
    const auto tables = feature_tables_cached(dataset, config, &cache_hit);
    CHECK(cache_hit);
    CHECK(tables.size() == resolve_subbands(config).size());
    run_train_stage(config, log);
    CHECK(slurp(out_a / "results.json") == report);

    // Broken schema document is caught.
    CHECK(!validate_against_schema("{\"tool\": \"meshband\"}", schema).empty());
    CHECK(!validate_against_schema("{\"tool\": 3}", schema).empty());

    std::filesystem::remove_all(data_dir);
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
}

TEST_CASE("decompose, mesh, metrics, diversity, significance stages write artifacts") {
    const auto data_dir = temp_dir("stage_data");
    const auto out = temp_dir("stage_out");
    std::ostringstream log;

    run_synth_stage(small_synth(), data_dir, "csv", log);
    PipelineConfig config = small_pipeline(data_dir, out);
    config.subbands = {"A0", "D2", "D3"};  // keep the stage tests quick

    run_decompose_stage(config, log);
    CHECK(std::filesystem::exists(out / "stacks" / "stack_synth0.bin"));
    const SubbandStack stack = load_subband_stack(out / "stacks" / "stack_synth0.bin");
    CHECK(stack.levels == 3);
    CHECK(stack.bands.size() == 7);

    run_mesh_stage(config, log);
    CHECK(std::filesystem::exists(out / "features" / "features_mesh_D2.bin"));
    CHECK(std::filesystem::exists(out / "features" / "features_mesh_D2.csv"));
    const FeatureTable table = load_feature_table(out / "features" / "features_mesh_D2.bin");
    CHECK(table.features.rows() == 12);
    CHECK(table.features.cols() == 64);

    run_metrics_stage(config, log);
    CHECK(std::filesystem::exists(out / "metrics" / "summary.json"));
    CHECK(std::filesystem::exists(out / "metrics" / "summary.csv"));
    CHECK(std::filesystem::exists(out / "metrics" / "band_D2_task_1.csv"));

    run_train_stage(config, log);
    run_diversity_stage(config, log);
    CHECK(std::filesystem::exists(out / "diversity" / "diversity.csv"));
    CHECK(std::filesystem::exists(out / "diversity" / "diversity.json"));

    run_significance_stage(config, false, log);
    CHECK(std::filesystem::exists(out / "significance" / "max_z.csv"));
    CHECK(std::filesystem::exists(out / "significance" / "z_class1.csv"));

    const MembershipMatrix m = load_memberships(out / "memberships.bin");
    CHECK(m.memberships.rows() == 12);
    CHECK(m.base_labels == std::vector<std::string>{"A0", "D2", "D3"});
    for (Index i = 0; i < m.memberships.rows(); ++i) {
        for (int e = 0; e < 3; ++e) {
            CHECK(m.memberships.row(i).segment(2 * e, 2).sum() == doctest::Approx(1.0));
        }
    }

    std::ostringstream report;
    run_report_stage(config, report);
    CHECK(report.str().find("fusion") != std::string::npos);
    CHECK(report.str().find("single-subband base accuracy") != std::string::npos);

    std::filesystem::remove_all(data_dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("verify stage passes its oracle cross-checks") {
    std::ostringstream log;
    CHECK(run_verify_stage(log));
    CHECK(log.str().find("PASS") != std::string::npos);
    CHECK(log.str().find("FAIL") == std::string::npos);
}

TEST_CASE("binary dataset path works through the pipeline loader") {
    const auto dir = temp_dir("binpath");
    const Dataset dataset = generate(small_synth());
    save_dataset(dataset, dir / "data.bin", DataFormat::bin);

    PipelineConfig config = small_pipeline(dir / "data.bin", dir / "out");
    config.data_format = "bin";
    const Dataset loaded = load_configured_dataset(config);
    CHECK(loaded.subjects.size() == dataset.subjects.size());
    CHECK(loaded.subjects[0].series == dataset.subjects[0].series);
    std::filesystem::remove_all(dir);
}
