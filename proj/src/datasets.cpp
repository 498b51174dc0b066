#include "gp/datasets.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gp/errors.hpp"

namespace gp {

SampleBatch full_train_batch(const Dataset& ds) {
    return SampleBatch{&ds, ds.train_idx, 0};
}

BatchIterator::BatchIterator(const Dataset& ds, int batch_size, std::uint64_t shuffle_seed)
    : ds_(&ds), batch_size_(batch_size), rng_(shuffle_seed) {
    if (batch_size < 1 || batch_size > static_cast<int>(ds.train_idx.size())) {
        throw ConfigError("batch size " + std::to_string(batch_size) +
                          " outside [1, train size " + std::to_string(ds.train_idx.size()) + "]");
    }
    order_ = ds.train_idx;
    reshuffle();
}

void BatchIterator::reshuffle() {
    // Fisher-Yates on our own rng, so the permutation sequence is seeded.
    for (std::size_t i = order_.size(); i > 1; --i) {
        const std::size_t j = rng_.bounded(i);
        std::swap(order_[i - 1], order_[j]);
    }
    cursor_ = 0;
}

SampleBatch BatchIterator::next() {
    if (cursor_ >= order_.size()) reshuffle();
    const std::size_t end = std::min(cursor_ + static_cast<std::size_t>(batch_size_), order_.size());
    SampleBatch batch;
    batch.dataset = ds_;
    batch.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                         order_.begin() + static_cast<std::ptrdiff_t>(end));
    // A batch is a set; the canonical sorted order keeps fitness sums
    // independent of the shuffle and the scoring loop cache-friendly.
    std::sort(batch.indices.begin(), batch.indices.end());
    batch.id = next_id_++;
    cursor_ = end;
    return batch;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* s = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    while (end && *end == ' ') ++end;
    if (end == s || (end && *end != '\0') || !std::isfinite(v)) {
        throw DataError("non-numeric cell at row " + std::to_string(row) +
                        ", column " + std::to_string(col + 1) + ": \"" + cell + "\"");
    }
    return v;
}

void split_train_test(Dataset& ds, int train_count, bool shuffle, std::uint64_t seed) {
    const int n = static_cast<int>(ds.samples.size());
    if (train_count < 1 || train_count >= n) {
        throw ConfigError("cannot split " + std::to_string(n) + " rows into train " +
                          std::to_string(train_count) + " + a nonempty test set");
    }
    std::vector<std::int32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (shuffle) {
        Rng rng(seed);
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = rng.bounded(i);
            std::swap(order[i - 1], order[j]);
        }
    }
    ds.train_idx.assign(order.begin(), order.begin() + train_count);
    ds.test_idx.assign(order.begin() + train_count, order.end());
}

void standardize_on_train(Dataset& ds) {
    const int width = ds.input_size;
    std::vector<double> mean(static_cast<std::size_t>(width), 0.0);
    std::vector<double> scale(static_cast<std::size_t>(width), 0.0);
    for (std::int32_t i : ds.train_idx) {
        for (int f = 0; f < width; ++f) mean[static_cast<std::size_t>(f)] += ds.samples[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(f)];
    }
    const double n = static_cast<double>(ds.train_idx.size());
    for (double& m : mean) m /= n;
    for (std::int32_t i : ds.train_idx) {
        for (int f = 0; f < width; ++f) {
            const double d = ds.samples[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)];
            scale[static_cast<std::size_t>(f)] += d * d;
        }
    }
    for (double& s : scale) {
        s = std::sqrt(s / n);
        if (s < 1e-12) s = 1.0; // constant feature: just center it
    }
    for (Sample& sample : ds.samples) {
        for (int f = 0; f < width; ++f) {
            sample.x[static_cast<std::size_t>(f)] =
                (sample.x[static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)]) / scale[static_cast<std::size_t>(f)];
        }
    }
}

} // namespace

std::pair<std::vector<Sample>, int> read_csv_samples(const std::string& path,
                                                     const std::string& label) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": missing header row");
    const std::vector<std::string> header = split_fields(line);

    int label_col = -1;
    if (label.empty()) {
        label_col = static_cast<int>(header.size()) - 1;
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == label) label_col = static_cast<int>(c);
        }
        if (label_col < 0) {
            throw DataError(path + ": label column \"" + label + "\" not in header");
        }
    }

    const int input_size = static_cast<int>(header.size()) - 1;
    if (input_size < 1) throw DataError(path + ": no feature columns");

    std::vector<Sample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " cells, header has " +
                            std::to_string(header.size()));
        }
        Sample s;
        s.x.reserve(static_cast<std::size_t>(input_size));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_cell(fields[c], row, c);
            if (static_cast<int>(c) == label_col) {
                s.y = v;
            } else {
                s.x.push_back(v);
            }
        }
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw DataError(path + ": no data rows");
    return {std::move(samples), input_size};
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    Dataset ds;
    ds.task = options.task;
    auto [samples, input_size] = read_csv_samples(path, options.label);
    ds.samples = std::move(samples);
    ds.input_size = input_size;

    if (ds.task == TaskKind::Classification) {
        for (std::size_t i = 0; i < ds.samples.size(); ++i) {
            const double y = ds.samples[i].y;
            if (y != 0.0 && y != 1.0) {
                throw DataError(path + ": row " + std::to_string(i + 2) +
                                " label must be 0 or 1, got " + std::to_string(y));
            }
        }
    }

    split_train_test(ds, options.train_count, options.shuffle_split, options.seed);
    if (options.standardize) standardize_on_train(ds);
    return ds;
}

Dataset gen_keijzer12(int n_train, int n_test, std::uint64_t seed, double lo, double hi) {
    assert(n_train >= 1 && n_test >= 0 && lo < hi);
    Rng rng(seed);
    Dataset ds;
    ds.task = TaskKind::Regression;
    ds.input_size = 2;
    const int n = n_train + n_test;
    ds.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(lo, hi);
        const double y = rng.uniform(lo, hi);
        Sample s;
        s.x = {x, y};
        s.y = x * y + std::sin((x - 1.0) * (y - 1.0));
        ds.samples.push_back(std::move(s));
    }
    ds.train_idx.resize(static_cast<std::size_t>(n_train));
    std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
    ds.test_idx.resize(static_cast<std::size_t>(n_test));
    std::iota(ds.test_idx.begin(), ds.test_idx.end(), n_train);
    return ds;
}

Dataset gen_noisy_patches(int n_train, int n_test, int patch_side, double sigma,
                          std::uint64_t seed) {
    assert(patch_side >= 1 && patch_side % 2 == 1 && sigma >= 0.0);
    Rng rng(seed);
    Dataset ds;
    ds.task = TaskKind::Denoising;
    ds.input_size = patch_side * patch_side;
    const int n = n_train + n_test;
    const int center = (patch_side / 2) * patch_side + patch_side / 2;
    ds.samples.reserve(static_cast<std::size_t>(n));

    constexpr int kWaves = 3;
    for (int p = 0; p < n; ++p) {
        double amp[kWaves], fx[kWaves], fy[kWaves], phase[kWaves];
        for (int k = 0; k < kWaves; ++k) {
            const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            // Correlation length scales with the patch so every patch size
            // presents the same smoothing geometry (0.05..0.15 rad/px at
            // side 9).
            const double omega = rng.uniform(0.45, 1.35) / patch_side;
            amp[k] = rng.uniform(0.1, 0.35);
            fx[k] = omega * std::cos(theta);
            fy[k] = omega * std::sin(theta);
            phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        Sample s;
        s.x.resize(static_cast<std::size_t>(ds.input_size));
        for (int i = 0; i < patch_side; ++i) {
            for (int j = 0; j < patch_side; ++j) {
                double v = 0.5;
                for (int k = 0; k < kWaves; ++k) {
                    v += amp[k] * std::sin(fx[k] * i + fy[k] * j + phase[k]);
                }
                v = std::clamp(v, 0.0, 1.0);
                const int at = i * patch_side + j;
                if (at == center) s.y = v;
                s.x[static_cast<std::size_t>(at)] = v;
            }
        }
        for (double& v : s.x) v += rng.normal(0.0, sigma);
        ds.samples.push_back(std::move(s));
    }
    ds.train_idx.resize(static_cast<std::size_t>(n_train));
    std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
    ds.test_idx.resize(static_cast<std::size_t>(n_test));
    std::iota(ds.test_idx.begin(), ds.test_idx.end(), n_train);
    return ds;
}

} // namespace gp
