#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gp/config.hpp"
#include "gp/population.hpp"

namespace gp {

/// CLI-level overrides applied on top of a loaded config.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<int> reps;
    bool parallel_reps = false;
};

struct ExperimentResult {
    std::vector<RunLog> runs;     // one per repetition, rep i seeded by stream i
    std::vector<Tree> best_trees; // final best-train individual per repetition
};

/// Executes all repetitions of a config. Pure apart from wall-clock columns;
/// repetition i always uses rng stream i of the master seed, so sequential
/// and parallel execution produce the same logs.
ExperimentResult run_experiment(ExperimentConfig config, const RunOptions& options);

/// Creates the output directory (recursively). Throws std::runtime_error
/// when that is impossible; called up front so runs fail before computing.
void ensure_output_dir(const std::string& out_dir);

/// run_<i>.csv per repetition plus summary.csv (per-run finals with trailing
/// median/mean rows). Creates the directory; throws std::runtime_error when
/// it cannot write.
void write_experiment_outputs(const ExperimentResult& result, const std::string& out_dir);

void write_runlog_csv(const std::string& path, const RunLog& log);

struct SummaryRow {
    int run = 0;
    double final_best_train = 0.0;
    double final_best_test = 0.0;
    std::int64_t evaluations = 0;
    double elapsed_s = 0.0;
};

/// Data rows of a summary.csv (aggregate rows are skipped).
std::vector<SummaryRow> read_summary_csv(const std::string& path);

struct ComparePair {
    int run = 0;
    double metric_a = 0.0;
    double metric_b = 0.0;
    double delta = 0.0; // b - a
    double time_a = 0.0;
    double time_b = 0.0;
    double time_ratio = 0.0; // b / a
};

/// Paired per-seed comparison of two summaries on the final test metric.
struct CompareReport {
    std::vector<ComparePair> pairs;
    bool higher_better = false;
    double metric_a_median = 0.0;
    double metric_b_median = 0.0;
    double delta_median = 0.0;
    int wins_a = 0;
    int wins_b = 0;
    int ties = 0;
    double sign_test_p = 1.0; // two-sided exact binomial, ties dropped
    double time_a_median = 0.0;
    double time_b_median = 0.0;
    double time_ratio_median = 0.0;
};

/// Throws UsageError when repetition counts differ.
CompareReport compare_summaries(const std::vector<SummaryRow>& a,
                                const std::vector<SummaryRow>& b, bool higher_better);

std::string format_compare(const CompareReport& report);

double median(std::vector<double> values);

} // namespace gp
