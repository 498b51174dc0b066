#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gp/errors.hpp"
#include "gp/experiment.hpp"

using namespace gp;

namespace {

ExperimentConfig tiny_config() {
    return parse_config(R"({
        "individual_class": "RegressorLS",
        "lowlevel": ["ADD", "SUB", "MUL", "DIV", "RELU", "MAX", "MEAN", "MIN", "X2", "SQRT"],
        "ind_params": {"input_vector_size": 2, "complexity": 5},
        "operations": ["mutation", "protected_crossover", "numeric_mutation"],
        "operations_prob": [0.4, 0.4, 0.2],
        "operations_arity": [1, 2, 1],
        "pop_size": 16,
        "generations": 4,
        "pop_dynamics": "Steady_State",
        "online": true,
        "batch_size": 20,
        "minimization": true,
        "n_jobs": 2,
        "seed": 11,
        "repetitions": 3,
        "dataset": {"type": "keijzer12", "train": 60, "test": 20}
    })",
                        "tiny");
}

bool same_ignoring_time(const RunLog& a, const RunLog& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].generation != b[i].generation || a[i].best_train != b[i].best_train ||
            a[i].best_test != b[i].best_test || a[i].mean_fitness != b[i].mean_fitness ||
            a[i].evaluations != b[i].evaluations)
            return false;
    }
    return true;
}

std::string temp_dir(const char* name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    return path.string();
}

} // namespace

TEST_CASE("experiments run one log per repetition") {
    const ExperimentResult result = run_experiment(tiny_config(), {});
    REQUIRE(result.runs.size() == 3);
    for (const RunLog& log : result.runs) {
        REQUIRE(log.size() == 5);
    }
    // repetitions use distinct streams
    CHECK_FALSE(same_ignoring_time(result.runs[0], result.runs[1]));
}

TEST_CASE("repetition logs are reproducible and parallel-rep invariant") {
    const ExperimentResult a = run_experiment(tiny_config(), {});
    const ExperimentResult b = run_experiment(tiny_config(), {});
    RunOptions parallel;
    parallel.parallel_reps = true;
    const ExperimentResult c = run_experiment(tiny_config(), parallel);
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
        REQUIRE(same_ignoring_time(a.runs[r], b.runs[r]));
        REQUIRE(same_ignoring_time(a.runs[r], c.runs[r]));
    }
}

TEST_CASE("overrides replace seed, jobs and repetition count") {
    RunOptions options;
    options.seed = 99;
    options.reps = 1;
    options.jobs = 1;
    const ExperimentResult result = run_experiment(tiny_config(), options);
    REQUIRE(result.runs.size() == 1);

    RunOptions same_seed;
    same_seed.seed = 99;
    same_seed.reps = 1;
    const ExperimentResult again = run_experiment(tiny_config(), same_seed);
    REQUIRE(same_ignoring_time(result.runs[0], again.runs[0]));
}

TEST_CASE("output files round-trip through the summary reader") {
    const std::string dir = temp_dir("gp_test_outputs");
    const ExperimentResult result = run_experiment(tiny_config(), {});
    write_experiment_outputs(result, dir);

    CHECK(std::filesystem::exists(dir + "/run_0.csv"));
    CHECK(std::filesystem::exists(dir + "/run_2.csv"));
    const std::vector<SummaryRow> rows = read_summary_csv(dir + "/summary.csv");
    REQUIRE(rows.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(rows[r].run == static_cast<int>(r));
        CHECK(rows[r].final_best_train == result.runs[r].back().best_train);
        CHECK(rows[r].final_best_test == result.runs[r].back().best_test);
        CHECK(rows[r].evaluations == result.runs[r].back().evaluations);
    }

    // RunLog CSV has the documented header and one row per generation.
    std::ifstream in(dir + "/run_0.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "generation,best_train,best_test,mean_fitness,evaluations,elapsed_s");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 5);
}

TEST_CASE("unwritable output directories fail") {
    CHECK_THROWS_AS(ensure_output_dir("/proc/gp_nope/x"), std::runtime_error);
}

TEST_CASE("exported best trees reproduce the logged final fitness") {
    ExperimentConfig config = tiny_config();
    config.online = false; // final best fitness is on the full train split
    const ExperimentResult result = run_experiment(config, {});

    const std::string dir = temp_dir("gp_test_best_trees");
    write_experiment_outputs(result, dir);

    std::ifstream in(dir + "/best_trees.txt");
    REQUIRE(in.good());
    const Dataset ds = build_dataset(config);
    const auto prims = make_primitives(config);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        const Tree t = parse_tree(line, prims, ds.input_size);
        REQUIRE(!t.validate());
        const double mse = fitness_regression(t, full_train_batch(ds));
        REQUIRE(mse == result.runs[static_cast<std::size_t>(count)].back().best_train);
        ++count;
    }
    CHECK(count == 3);
}

TEST_CASE("self-comparison is all ties") {
    std::vector<SummaryRow> rows;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({i, 1.0 + i, 2.0 + i, 100, 1.5});
    }
    const CompareReport report = compare_summaries(rows, rows, false);
    CHECK(report.ties == 10);
    CHECK(report.wins_a == 0);
    CHECK(report.wins_b == 0);
    CHECK(report.delta_median == 0.0);
    CHECK(report.sign_test_p == 1.0);
    CHECK(report.time_ratio_median == 1.0);
}

TEST_CASE("per-seed dominance yields a decisive sign test") {
    std::vector<SummaryRow> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back({i, 0.0, 5.0 + i, 100, 2.0});
        b.push_back({i, 0.0, 4.0 + i, 100, 1.0}); // lower metric: b wins every pair
    }
    const CompareReport report = compare_summaries(a, b, false);
    CHECK(report.wins_b == 10);
    CHECK(report.wins_a == 0);
    CHECK(report.sign_test_p < 0.01);
    CHECK(report.delta_median == -1.0);
    CHECK(report.time_ratio_median == 0.5);

    // under higher-is-better the same numbers favor a
    const CompareReport flipped = compare_summaries(a, b, true);
    CHECK(flipped.wins_a == 10);

    const std::string text = format_compare(report);
    CHECK(text.find("wins_b: 10") != std::string::npos);
    CHECK(text.find("time_ratio") != std::string::npos);
}

TEST_CASE("mismatched repetition counts are usage errors") {
    std::vector<SummaryRow> a(10), b(9);
    CHECK_THROWS_AS(compare_summaries(a, b, false), UsageError);
}

TEST_CASE("malformed summaries are data errors") {
    const std::string dir = temp_dir("gp_test_bad_summary");
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/summary.csv");
        out << "run,final_best_train,final_best_test,evaluations,elapsed_s\n";
        out << "0,1.5,not_a_number,10,0.5\n";
    }
    CHECK_THROWS_AS(read_summary_csv(dir + "/summary.csv"), DataError);
    CHECK_THROWS_AS(read_summary_csv("/no/such/summary.csv"), DataError);
}

TEST_CASE("median of odd and even counts") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), UsageError);
}
