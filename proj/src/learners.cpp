#include "gp/learners.hpp"

#include <algorithm>

#include "gp/errors.hpp"

namespace gp {

namespace {

/// Fitness is a function of the batch as a set: summation runs in ascending
/// index order no matter how the indices arrive.
std::span<const std::int32_t> canonical_order(std::span<const std::int32_t> indices,
                                              std::vector<std::int32_t>& scratch) {
    if (std::is_sorted(indices.begin(), indices.end())) return indices;
    scratch.assign(indices.begin(), indices.end());
    std::sort(scratch.begin(), scratch.end());
    return scratch;
}

double mse_over(const Tree& t, const Dataset& ds, std::span<const std::int32_t> indices) {
    const LinearProgram prog = compile(t);
    std::vector<double> stack;
    std::vector<std::int32_t> scratch;
    double sum = 0.0;
    for (std::int32_t i : canonical_order(indices, scratch)) {
        const Sample& s = ds.samples[static_cast<std::size_t>(i)];
        const double d = prog.run(s.x, stack) - s.y;
        sum += d * d;
    }
    return sum / static_cast<double>(indices.size());
}

double error_rate_over(const Tree& t, const Dataset& ds, std::span<const std::int32_t> indices) {
    const LinearProgram prog = compile(t);
    std::vector<double> stack;
    int wrong = 0;
    for (std::int32_t i : indices) {
        const Sample& s = ds.samples[static_cast<std::size_t>(i)];
        const double predicted = prog.run(s.x, stack) > 0.0 ? 1.0 : 0.0;
        if (predicted != s.y) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(indices.size());
}

void require_nonempty(const SampleBatch& batch, const char* what) {
    if (batch.dataset == nullptr || batch.indices.empty()) {
        throw UsageError(std::string(what) + " called with an empty batch");
    }
}

} // namespace

double fitness_regression(const Tree& t, const SampleBatch& batch) {
    require_nonempty(batch, "fitness_regression");
    return mse_over(t, *batch.dataset, batch.indices);
}

double fitness_classification(const Tree& t, const SampleBatch& batch) {
    require_nonempty(batch, "fitness_classification");
    return error_rate_over(t, *batch.dataset, batch.indices);
}

double fitness_denoise(const Tree& t, const SampleBatch& batch) {
    require_nonempty(batch, "fitness_denoise");
    return mse_over(t, *batch.dataset, batch.indices);
}

double Learner::fitness(const Tree& t, const SampleBatch& batch) const {
    switch (kind_) {
    case LearnerKind::RegressorLS: return fitness_regression(t, batch);
    case LearnerKind::BinaryClassifier: return fitness_classification(t, batch);
    case LearnerKind::Denoiser: return fitness_denoise(t, batch);
    }
    return 0.0;
}

double Learner::test_metric(const Tree& t, const Dataset& ds) const {
    if (ds.test_idx.empty()) throw UsageError("dataset has no test split");
    switch (kind_) {
    case LearnerKind::RegressorLS:
    case LearnerKind::Denoiser:
        return mse_over(t, ds, ds.test_idx);
    case LearnerKind::BinaryClassifier:
        return 1.0 - error_rate_over(t, ds, ds.test_idx);
    }
    return 0.0;
}

LearnerKind Learner::kind_from_name(const std::string& name) {
    if (name == "RegressorLS") return LearnerKind::RegressorLS;
    if (name == "BinaryClassifier") return LearnerKind::BinaryClassifier;
    if (name == "Denoiser") return LearnerKind::Denoiser;
    throw ConfigError("unknown individual_class: " + name);
}

const char* Learner::name(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::RegressorLS: return "RegressorLS";
    case LearnerKind::BinaryClassifier: return "BinaryClassifier";
    case LearnerKind::Denoiser: return "Denoiser";
    }
    return "?";
}

} // namespace gp
