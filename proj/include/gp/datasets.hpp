#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gp/rng.hpp"
#include "gp/tree.hpp"

namespace gp {

enum class TaskKind { Regression, Classification, Denoising };

/// Immutable after load/generation. Split index sets are disjoint and cover
/// all samples; features have uniform width input_size.
struct Dataset {
    std::vector<Sample> samples;
    int input_size = 0;
    TaskKind task = TaskKind::Regression;
    std::vector<std::int32_t> train_idx;
    std::vector<std::int32_t> test_idx;
};

/// A scoring batch: indices into a dataset plus the id that fitness caches
/// key on. Batched mode always evaluates batch id 0 (the full train split);
/// online batches count up from 1.
struct SampleBatch {
    const Dataset* dataset = nullptr;
    std::vector<std::int32_t> indices;
    std::int64_t id = 0;
};

SampleBatch full_train_batch(const Dataset& ds);

/// Draws consecutive blocks of a seed-shuffled epoch over the train split;
/// reshuffles with a fresh seeded permutation at each epoch boundary. Blocks
/// partition the epoch, so every sample appears exactly once per epoch.
class BatchIterator {
public:
    BatchIterator(const Dataset& ds, int batch_size, std::uint64_t shuffle_seed);
    SampleBatch next();

private:
    void reshuffle();

    const Dataset* ds_;
    int batch_size_;
    std::vector<std::int32_t> order_;
    std::size_t cursor_ = 0;
    Rng rng_;
    std::int64_t next_id_ = 1;
};

struct CsvOptions {
    std::string label;          // label column name
    int train_count = 0;        // rows assigned to the train split
    bool standardize = true;    // zero mean / unit variance, fit on train only
    bool shuffle_split = true;  // split a seeded permutation rather than file order
    std::uint64_t seed = 1;
    TaskKind task = TaskKind::Classification;
};

/// Numeric CSV with a header row. Throws DataError with row/column context
/// on malformed content, ConfigError when the file cannot be split.
Dataset load_csv(const std::string& path, const CsvOptions& options);

/// Raw CSV rows without split or standardization. An empty label name means
/// the last header column. Returns the samples and the feature width.
std::pair<std::vector<Sample>, int> read_csv_samples(const std::string& path,
                                                     const std::string& label);

/// n samples of f(x, y) = x*y + sin((x-1)*(y-1)) with (x, y) uniform in
/// [lo, hi]^2. The first n_train samples form the train split.
Dataset gen_keijzer12(int n_train, int n_test, std::uint64_t seed, double lo, double hi);

/// Flattened noisy patches of a smooth random field (sum of three
/// random-orientation sinusoids, clipped to [0,1]) with i.i.d. additive
/// Gaussian noise N(0, sigma^2); the target is the clean center pixel.
/// patch_side must be odd so a center pixel exists.
Dataset gen_noisy_patches(int n_train, int n_test, int patch_side, double sigma,
                          std::uint64_t seed);

} // namespace gp
