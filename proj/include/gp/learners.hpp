#pragma once

#include <optional>
#include <string>

#include "gp/datasets.hpp"
#include "gp/tree.hpp"

namespace gp {

/// One candidate model: a tree plus its cached training fitness and the id
/// of the batch that fitness was computed on. A present fitness always
/// refers to fitness_batch_id; the population engine invalidates the cache
/// whenever the batch advances.
struct Individual {
    Tree tree;
    std::optional<double> fitness;
    std::int64_t fitness_batch_id = -1;

    bool fitness_current(std::int64_t batch_id) const {
        return fitness.has_value() && fitness_batch_id == batch_id;
    }
};

enum class LearnerKind { RegressorLS, BinaryClassifier, Denoiser };

/// Mean squared error of tree output against targets. Throws UsageError on
/// an empty batch.
double fitness_regression(const Tree& t, const SampleBatch& batch);

/// Error rate under the sign rule: predict 1 when the tree output is > 0.
/// Labels must be 0/1. Throws UsageError on an empty batch.
double fitness_classification(const Tree& t, const SampleBatch& batch);

/// MSE between the tree applied to a noisy patch and the clean center pixel.
double fitness_denoise(const Tree& t, const SampleBatch& batch);

/// Binds a learner kind to its fitness function (minimized during training)
/// and its reported test metric (MSE for regression/denoising, accuracy for
/// classification).
class Learner {
public:
    explicit Learner(LearnerKind kind) : kind_(kind) {}

    LearnerKind kind() const { return kind_; }
    /// Training fitness is an error for every kind.
    bool minimizing() const { return true; }
    /// True when a larger reported test metric is better (accuracy).
    bool test_metric_maximizing() const { return kind_ == LearnerKind::BinaryClassifier; }

    double fitness(const Tree& t, const SampleBatch& batch) const;
    double test_metric(const Tree& t, const Dataset& ds) const;

    static LearnerKind kind_from_name(const std::string& name); // throws ConfigError
    static const char* name(LearnerKind kind);

private:
    LearnerKind kind_;
};

} // namespace gp
