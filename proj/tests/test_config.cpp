#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "gp/config.hpp"
#include "gp/errors.hpp"

using namespace gp;

namespace {

// Minimal valid config; tests patch individual fields.
std::string valid_json() {
    return R"({
        "individual_class": "RegressorLS",
        "lowlevel": ["ADD", "SUB", "MUL", "DIV"],
        "ind_params": {"input_vector_size": 2, "complexity": 5},
        "operations": ["mutation", "protected_crossover", "numeric_mutation"],
        "operations_prob": [0.4, 0.4, 0.2],
        "operations_arity": [1, 2, 1],
        "pop_size": 20,
        "generations": 3,
        "pop_dynamics": "Steady_State",
        "online": false,
        "minimization": true,
        "seed": 5,
        "repetitions": 2,
        "dataset": {"type": "keijzer12", "train": 50, "test": 10}
    })";
}

std::string with_field(const std::string& json, const std::string& key,
                       const std::string& value) {
    std::string text = json;
    text.insert(text.rfind('}'), ", \"" + key + "\": " + value);
    return text;
}

std::string patched(const std::string& key, const std::string& replacement) {
    std::string text = valid_json();
    const std::size_t at = text.find("\"" + key + "\"");
    REQUIRE(at != std::string::npos);
    const std::size_t colon = text.find(':', at);
    std::size_t end = colon + 1;
    int depth = 0;
    for (;; ++end) {
        const char c = text[end];
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') {
            if (depth == 0) break;
            --depth;
        }
        if ((c == ',' || c == '\n') && depth == 0) break;
    }
    text.replace(colon + 1, end - colon - 1, " " + replacement);
    return text;
}

} // namespace

TEST_CASE("a valid config parses with documented defaults") {
    const ExperimentConfig cfg = parse_config(valid_json(), "test");
    CHECK(cfg.learner == LearnerKind::RegressorLS);
    CHECK(cfg.lowlevel.size() == 4);
    CHECK(cfg.mezzanine.empty());
    CHECK(cfg.input_vector_size == 2);
    CHECK(cfg.max_depth == 5);
    CHECK(cfg.operators.size() == 3);
    CHECK(cfg.operators[1].op == VariationOp::ProtectedCrossover);
    CHECK(cfg.numeric_sigma == 0.1);     // default
    CHECK(cfg.tournament_size == 3);     // default
    CHECK(cfg.elitism);                  // default
    CHECK(cfg.n_jobs == 0);              // default: hardware
    CHECK(cfg.dynamics == ExperimentConfig::Dynamics::SteadyState);
    CHECK(cfg.pop_size == 20);
    CHECK(cfg.seed == 5);
    CHECK(cfg.repetitions == 2);
    CHECK(cfg.dataset.type == DatasetSpec::Type::Keijzer12);
    CHECK(cfg.dataset.lo == -3.0);
    CHECK(cfg.dataset.hi == 3.0);
    CHECK(cfg.dataset.seed == 1);
}

TEST_CASE("field-level diagnostics on invalid configs") {
    auto throws_mentioning = [](const std::string& json, const std::string& needle) {
        try {
            parse_config(json, "test");
            FAIL("expected ConfigError for: " << needle);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                          "message was: ", e.what());
        }
    };

    throws_mentioning("{", "not valid JSON");
    throws_mentioning(R"({"zzz": 1})", "zzz");
    throws_mentioning(patched("individual_class", "\"Nope\""), "individual_class");
    throws_mentioning(patched("operations_prob", "[0.4, 0.4, 0.4]"), "probabilities");
    throws_mentioning(patched("operations_arity", "[1, 1, 1]"), "arity");
    throws_mentioning(patched("pop_size", "1"), "pop_size");
    throws_mentioning(patched("pop_dynamics", "\"Butterfly\""), "pop_dynamics");
    throws_mentioning(patched("minimization", "false"), "minimization");
    throws_mentioning(patched("lowlevel", "[\"ADD\", \"FOO\"]"), "lowlevel");
    throws_mentioning(patched("lowlevel", "[\"ADD\", \"ADD\"]"), "duplicate");
    throws_mentioning(patched("online", "true"), "batch_size");
    throws_mentioning(patched("generations", "-1"), "generations");
    throws_mentioning(patched("repetitions", "0"), "repetitions");
    throws_mentioning(with_field(valid_json(), "tournament_size", "21"), "tournament_size");
    throws_mentioning(patched("dataset", R"({"type": "nope", "train": 5})"), "dataset.type");
    throws_mentioning(patched("dataset", R"({"type": "keijzer12", "train": 5})"), "test");
    throws_mentioning(patched("dataset", R"({"type": "csv", "train": 5})"), "path");
    throws_mentioning(patched("dataset",
                              R"({"type": "noisy_patches", "train": 5, "test": 2, "patch_side": 8, "sigma": 0.1})"),
                      "patch_side");
}

TEST_CASE("cellular config is cross-checked against grid and neighborhood") {
    std::string text = patched("pop_dynamics", "\"Cellular\"");
    // missing cellular block
    CHECK_THROWS_AS(parse_config(text, "test"), ConfigError);

    text.insert(text.rfind('}'), R"(, "cellular": {"grid_w": 5, "grid_h": 4})");
    const ExperimentConfig cfg = parse_config(text, "test");
    CHECK(cfg.cellular.grid_w == 5);
    CHECK(cfg.cellular.neighborhood == Neighborhood::VonNeumann);
    CHECK(cfg.cellular.radius == 1);

    std::string bad = patched("pop_dynamics", "\"Cellular\"");
    bad.insert(bad.rfind('}'), R"(, "cellular": {"grid_w": 4, "grid_h": 4})");
    CHECK_THROWS_AS(parse_config(bad, "test"), ConfigError); // 16 != pop_size 20

    // tournament 6 exceeds the von Neumann radius-1 neighborhood of 5
    std::string cell = patched("pop_dynamics", "\"Cellular\"");
    cell.insert(cell.rfind('}'),
                R"(, "cellular": {"grid_w": 5, "grid_h": 4}, "tournament_size": 6)");
    CHECK_THROWS_AS(parse_config(cell, "test"), ConfigError);
}

TEST_CASE("island config defaults and divisibility") {
    std::string text = patched("pop_dynamics", "\"Island\"");
    text.insert(text.rfind('}'), R"(, "islands": {"n_islands": 4})");
    const ExperimentConfig cfg = parse_config(text, "test");
    CHECK(cfg.islands.n_islands == 4);
    CHECK(cfg.islands.island_pop == 5);
    CHECK(cfg.islands.migration_interval == 10);
    CHECK(cfg.islands.n_migrants == 1); // max(1, 5/20)

    std::string bad = patched("pop_dynamics", "\"Island\"");
    bad.insert(bad.rfind('}'), R"(, "islands": {"n_islands": 3})");
    CHECK_THROWS_AS(parse_config(bad, "test"), ConfigError); // 3 does not divide 20

    std::string migrants = patched("pop_dynamics", "\"Island\"");
    migrants.insert(migrants.rfind('}'), R"(, "islands": {"n_islands": 4, "n_migrants": 5})");
    CHECK_THROWS_AS(parse_config(migrants, "test"), ConfigError); // 5 >= island_pop
}

TEST_CASE("dataset construction validates the input width") {
    ExperimentConfig cfg = parse_config(valid_json(), "test");
    const Dataset ds = build_dataset(cfg);
    CHECK(ds.input_size == 2);
    CHECK(ds.train_idx.size() == 50);
    CHECK(ds.test_idx.size() == 10);

    cfg.input_vector_size = 3;
    CHECK_THROWS_AS(build_dataset(cfg), ConfigError);
}

TEST_CASE("patch_csv dataset spec flows through build_dataset") {
    const std::string csv_path =
        (std::filesystem::temp_directory_path() / "gp_test_cfg_patches.csv").string();
    {
        std::ofstream out(csv_path);
        out << "p0,p1,p2,p3,target\n";
        for (int i = 0; i < 6; ++i) {
            out << "0.1,0.2,0.3,0.4,0.25\n";
        }
    }
    const std::string json = R"({
        "individual_class": "Denoiser",
        "lowlevel": ["ADD", "SUB", "MUL", "DIV"],
        "ind_params": {"input_vector_size": 4, "complexity": 5},
        "operations": ["mutation", "protected_crossover"],
        "operations_prob": [0.5, 0.5],
        "operations_arity": [1, 2],
        "pop_size": 10,
        "generations": 1,
        "pop_dynamics": "Steady_State",
        "online": false,
        "minimization": true,
        "dataset": {"type": "patch_csv", "path": ")" +
                             csv_path + R"(", "label": "target", "train": 4}
    })";

    const ExperimentConfig cfg = parse_config(json, "test");
    CHECK(cfg.dataset.type == DatasetSpec::Type::PatchCsv);
    CHECK_FALSE(cfg.dataset.standardize); // patch csv never standardizes
    const Dataset ds = build_dataset(cfg);
    CHECK(ds.input_size == 4);
    CHECK(ds.task == TaskKind::Denoising);
    for (const Sample& s : ds.samples) {
        CHECK(s.x == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    }
}

TEST_CASE("engine config derives one run seed per repetition") {
    const ExperimentConfig cfg = parse_config(valid_json(), "test");
    const auto prims = make_primitives(cfg);
    const EngineConfig e0 = engine_config(cfg, 0, prims);
    const EngineConfig e1 = engine_config(cfg, 1, prims);
    CHECK(e0.run_seed == derive_seed(5, 0));
    CHECK(e1.run_seed == derive_seed(5, 1));
    CHECK(e0.run_seed != e1.run_seed);
    CHECK(e0.generations == 3);
    CHECK(std::get<SteadyStateConfig>(e0.dynamics).pop_size == 20);
}

TEST_CASE("bundled configs load and validate") {
    for (const char* name :
         {"classification_batched", "classification_online", "keijzer12_panmictic",
          "keijzer12_multipop", "denoising_low", "denoising_mezzanine", "desk_smoke",
          "desk_classification_batched", "desk_classification_online",
          "desk_keijzer12_panmictic", "desk_keijzer12_island", "desk_denoising_low",
          "desk_denoising_mezzanine", "desk_cellular"}) {
        const std::string path = std::string(GP_SOURCE_DIR) + "/configs/" + name + ".json";
        CHECK_NOTHROW(load_config(path));
    }
    CHECK_THROWS_AS(load_config("/no/such/config.json"), ConfigError);
}
