#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gp/config.hpp"
#include "gp/errors.hpp"
#include "gp/experiment.hpp"
#include "gp/learners.hpp"
#include "gp/tree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const gp::RunOptions& options) {
    gp::ExperimentConfig config = gp::load_config(config_path);
    gp::ensure_output_dir(out_dir);
    gp::ExperimentResult result = gp::run_experiment(config, options);
    gp::write_experiment_outputs(result, out_dir);

    std::vector<double> tests, times;
    double total_time = 0.0;
    for (const gp::RunLog& log : result.runs) {
        tests.push_back(log.back().best_test);
        times.push_back(log.back().elapsed_s);
        total_time += log.back().elapsed_s;
    }
    std::printf("%zu run(s) -> %s\n", result.runs.size(), out_dir.c_str());
    std::printf("final best test metric: median %.6g\n", gp::median(tests));
    std::printf("wall clock: median %.3fs per run, %.3fs total\n", gp::median(times), total_time);
    return kExitOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, bool higher_better) {
    const auto a = gp::read_summary_csv(path_a);
    const auto b = gp::read_summary_csv(path_b);
    const gp::CompareReport report = gp::compare_summaries(a, b, higher_better);
    std::cout << gp::format_compare(report);
    return kExitOk;
}

int cmd_eval(const std::string& tree_path, const std::string& csv_path,
             const std::string& label, const std::string& task) {
    auto [samples, input_size] = gp::read_csv_samples(csv_path, label);
    gp::Dataset ds;
    ds.samples = std::move(samples);
    ds.input_size = input_size;
    ds.train_idx.resize(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) ds.train_idx[i] = static_cast<std::int32_t>(i);

    gp::LearnerKind kind = gp::LearnerKind::RegressorLS;
    if (task == "classification") kind = gp::LearnerKind::BinaryClassifier;
    else if (task == "denoise") kind = gp::LearnerKind::Denoiser;
    else if (task != "regression") throw gp::ConfigError("unknown task: " + task);
    if (kind == gp::LearnerKind::BinaryClassifier) {
        for (const gp::Sample& s : ds.samples) {
            if (s.y != 0.0 && s.y != 1.0) throw gp::DataError("labels must be 0/1 for classification");
        }
    }

    std::ifstream in(tree_path);
    if (!in) throw gp::DataError("cannot open " + tree_path);
    const auto prims = std::make_shared<const gp::PrimitiveSet>(gp::default_primitive_set());
    const gp::SampleBatch batch = gp::full_train_batch(ds);

    std::string line;
    int line_no = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        any = true;
        const gp::Tree tree = gp::parse_tree(line, prims, input_size);
        switch (kind) {
        case gp::LearnerKind::RegressorLS:
            std::printf("tree %d: mse=%.17g\n", line_no, gp::fitness_regression(tree, batch));
            break;
        case gp::LearnerKind::BinaryClassifier: {
            const double err = gp::fitness_classification(tree, batch);
            std::printf("tree %d: accuracy=%.17g error_rate=%.17g\n", line_no, 1.0 - err, err);
            break;
        }
        case gp::LearnerKind::Denoiser:
            std::printf("tree %d: mse=%.17g\n", line_no, gp::fitness_denoise(tree, batch));
            break;
        }
    }
    if (!any) throw gp::DataError(tree_path + ": no trees");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"genetic programming engine and benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int jobs = -1, reps = -1;
    bool parallel_reps = false;
    CLI::App* run_cmd = app.add_subcommand("run", "run all repetitions of an experiment config");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory for run_<i>.csv and summary.csv")
        ->required();
    CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "override the master seed");
    run_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");
    run_cmd->add_option("--reps", reps, "override the repetition count");
    run_cmd->add_flag("--parallel-reps", parallel_reps,
                      "run repetitions concurrently (identical outputs either way)");

    std::string summary_a, summary_b;
    bool higher_better = false;
    CLI::App* compare_cmd = app.add_subcommand("compare", "paired comparison of two summary.csv files");
    compare_cmd->add_option("a", summary_a, "baseline summary.csv")->required();
    compare_cmd->add_option("b", summary_b, "candidate summary.csv")->required();
    compare_cmd->add_flag("--higher-better", higher_better,
                          "treat the test metric as maximized (accuracy)");

    std::string tree_path, csv_path, label, task = "regression";
    CLI::App* eval_cmd = app.add_subcommand("eval", "score serialized trees on a CSV dataset");
    eval_cmd->add_option("tree-file", tree_path, "prefix-notation trees, one per line")->required();
    eval_cmd->add_option("csv", csv_path, "numeric CSV with a header row")->required();
    eval_cmd->add_option("--label", label, "label column (default: last column)");
    eval_cmd->add_option("--task", task, "regression | classification | denoise");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) {
            gp::RunOptions options;
            if (seed_opt->count() > 0) options.seed = seed;
            if (jobs >= 0) options.jobs = jobs;
            if (reps >= 0) options.reps = reps;
            options.parallel_reps = parallel_reps;
            return cmd_run(config_path, out_dir, options);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(summary_a, summary_b, higher_better);
        }
        return cmd_eval(tree_path, csv_path, label, task);
    } catch (const gp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gp::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gp::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
