#include "gp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gp/errors.hpp"
#include "gp/scheduler.hpp"

namespace gp {

ExperimentResult run_experiment(ExperimentConfig config, const RunOptions& options) {
    if (options.seed) config.seed = *options.seed;
    if (options.jobs) config.n_jobs = *options.jobs;
    if (options.reps) config.repetitions = *options.reps;
    if (config.n_jobs < 0 || (options.reps && *options.reps < 1)) {
        throw ConfigError("invalid override: jobs must be >= 0 and reps >= 1");
    }

    const Dataset dataset = build_dataset(config);
    const auto prims = make_primitives(config);
    const Learner learner(config.learner);

    ExperimentResult result;
    result.runs.resize(static_cast<std::size_t>(config.repetitions));
    result.best_trees.resize(static_cast<std::size_t>(config.repetitions));

    auto run_one = [&](std::size_t rep) {
        EngineConfig ec = engine_config(config, static_cast<int>(rep), prims);
        if (options.parallel_reps) ec.n_workers = 1; // repetitions occupy the workers
        result.runs[rep] = run(ec, learner, dataset, &result.best_trees[rep]);
    };

    if (options.parallel_reps) {
        const int workers = config.n_jobs == 0 ? hardware_workers() : config.n_jobs;
        parallel_for(result.runs.size(), workers, run_one);
    } else {
        for (std::size_t rep = 0; rep < result.runs.size(); ++rep) run_one(rep);
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_elapsed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

void write_runlog_csv(const std::string& path, const RunLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "generation,best_train,best_test,mean_fitness,evaluations,elapsed_s\n";
    for (const RunLogRow& row : log) {
        out << row.generation << ',' << format_double(row.best_train) << ','
            << format_double(row.best_test) << ',' << format_double(row.mean_fitness) << ','
            << row.evaluations << ',' << format_elapsed(row.elapsed_s) << '\n';
    }
    if (!out.flush()) throw std::runtime_error("cannot write " + path);
}

void ensure_output_dir(const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
    if (!fs::is_directory(out_dir)) {
        throw std::runtime_error("output path is not a directory: " + out_dir);
    }
}

void write_experiment_outputs(const ExperimentResult& result, const std::string& out_dir) {
    ensure_output_dir(out_dir);

    for (std::size_t rep = 0; rep < result.runs.size(); ++rep) {
        write_runlog_csv(out_dir + "/run_" + std::to_string(rep) + ".csv", result.runs[rep]);
    }

    if (!result.best_trees.empty()) {
        const std::string trees_path = out_dir + "/best_trees.txt";
        std::ofstream trees(trees_path);
        if (!trees) throw std::runtime_error("cannot write " + trees_path);
        for (const Tree& t : result.best_trees) {
            trees << to_string(t) << '\n';
        }
        if (!trees.flush()) throw std::runtime_error("cannot write " + trees_path);
    }

    std::vector<double> trains, tests, times;
    const std::string path = out_dir + "/summary.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "run,final_best_train,final_best_test,evaluations,elapsed_s\n";
    for (std::size_t rep = 0; rep < result.runs.size(); ++rep) {
        const RunLogRow& last = result.runs[rep].back();
        trains.push_back(last.best_train);
        tests.push_back(last.best_test);
        times.push_back(last.elapsed_s);
        out << rep << ',' << format_double(last.best_train) << ',' << format_double(last.best_test)
            << ',' << last.evaluations << ',' << format_elapsed(last.elapsed_s) << '\n';
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    out << "median," << format_double(median(trains)) << ',' << format_double(median(tests))
        << ",," << format_elapsed(median(times)) << '\n';
    out << "mean," << format_double(mean(trains)) << ',' << format_double(mean(tests)) << ",,"
        << format_elapsed(mean(times)) << '\n';
    if (!out.flush()) throw std::runtime_error("cannot write " + path);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (line.rfind("run,", 0) != 0) throw DataError(path + ": not a summary.csv header");

    std::vector<SummaryRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        // Aggregate rows ("median"/"mean") are not per-run data.
        if (cell.empty() || !std::isdigit(static_cast<unsigned char>(cell[0]))) continue;
        try {
            SummaryRow row;
            row.run = std::stoi(cell);
            std::getline(ss, cell, ',');
            row.final_best_train = std::stod(cell);
            std::getline(ss, cell, ',');
            row.final_best_test = std::stod(cell);
            std::getline(ss, cell, ',');
            row.evaluations = cell.empty() ? 0 : std::stoll(cell);
            std::getline(ss, cell, ',');
            row.elapsed_s = std::stod(cell);
            rows.push_back(row);
        } catch (const std::exception&) {
            throw DataError(path + ": malformed summary row at line " + std::to_string(line_no));
        }
    }
    if (rows.empty()) throw DataError(path + ": no data rows");
    return rows;
}

double median(std::vector<double> values) {
    if (values.empty()) throw UsageError("median of an empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

/// Exact two-sided sign test: P(|Bin(n, 1/2) - n/2| >= |k - n/2|).
double sign_test_p_value(int wins_a, int wins_b) {
    const int n = wins_a + wins_b;
    if (n == 0) return 1.0;
    const int k = std::max(wins_a, wins_b);
    // Tail sum of C(n, i) for i in [k, n], in doubles (n is small).
    double tail = 0.0;
    double coeff = 1.0; // C(n, n) walking down to C(n, k)
    for (int i = n; i >= k; --i) {
        tail += coeff;
        coeff = coeff * i / (n - i + 1);
    }
    const double p = 2.0 * tail * std::pow(0.5, n);
    return std::min(1.0, p);
}

} // namespace

CompareReport compare_summaries(const std::vector<SummaryRow>& a,
                                const std::vector<SummaryRow>& b, bool higher_better) {
    if (a.size() != b.size()) {
        throw UsageError("summaries have different repetition counts: " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    CompareReport rep;
    rep.higher_better = higher_better;
    std::vector<double> ma, mb, deltas, ta, tb, ratios;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ComparePair pair;
        pair.run = a[i].run;
        pair.metric_a = a[i].final_best_test;
        pair.metric_b = b[i].final_best_test;
        pair.delta = pair.metric_b - pair.metric_a;
        pair.time_a = a[i].elapsed_s;
        pair.time_b = b[i].elapsed_s;
        pair.time_ratio = pair.time_a > 0.0 ? pair.time_b / pair.time_a : 0.0;
        rep.pairs.push_back(pair);
        ma.push_back(pair.metric_a);
        mb.push_back(pair.metric_b);
        deltas.push_back(pair.delta);
        ta.push_back(pair.time_a);
        tb.push_back(pair.time_b);
        ratios.push_back(pair.time_ratio);
        if (pair.metric_a == pair.metric_b) {
            ++rep.ties;
        } else if ((pair.metric_a < pair.metric_b) != higher_better) {
            ++rep.wins_a;
        } else {
            ++rep.wins_b;
        }
    }
    rep.metric_a_median = median(ma);
    rep.metric_b_median = median(mb);
    rep.delta_median = median(deltas);
    rep.time_a_median = median(ta);
    rep.time_b_median = median(tb);
    rep.time_ratio_median = median(ratios);
    rep.sign_test_p = sign_test_p_value(rep.wins_a, rep.wins_b);
    return rep;
}

std::string format_compare(const CompareReport& report) {
    std::ostringstream out;
    out << "run,metric_a,metric_b,metric_delta,time_a,time_b,time_ratio\n";
    for (const ComparePair& p : report.pairs) {
        out << p.run << ',' << format_double(p.metric_a) << ',' << format_double(p.metric_b)
            << ',' << format_double(p.delta) << ',' << format_elapsed(p.time_a) << ','
            << format_elapsed(p.time_b) << ',' << format_double(p.time_ratio) << '\n';
    }
    out << '\n';
    out << "pairs: " << report.pairs.size() << '\n';
    out << "metric direction: " << (report.higher_better ? "higher" : "lower") << " is better\n";
    out << "metric_a_median: " << format_double(report.metric_a_median) << '\n';
    out << "metric_b_median: " << format_double(report.metric_b_median) << '\n';
    out << "delta_median (b-a): " << format_double(report.delta_median) << '\n';
    out << "wins_a: " << report.wins_a << "  wins_b: " << report.wins_b
        << "  ties: " << report.ties << '\n';
    out << "sign_test_p: " << format_double(report.sign_test_p) << '\n';
    out << "time_a_median: " << format_elapsed(report.time_a_median) << '\n';
    out << "time_b_median: " << format_elapsed(report.time_b_median) << '\n';
    out << "time_ratio_median (b/a): " << format_double(report.time_ratio_median) << '\n';
    return out.str();
}

} // namespace gp
