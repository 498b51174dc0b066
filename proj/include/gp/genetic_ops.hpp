#pragma once

#include <string>
#include <vector>

#include "gp/rng.hpp"
#include "gp/tree.hpp"

namespace gp {

enum class VariationOp { SubtreeMutation, ProtectedCrossover, NumericMutation, PointMutationI2 };

/// Number of parents the operator consumes.
int op_arity(VariationOp op);

/// Operator name as used in config files (mutation, protected_crossover,
/// numeric_mutation, mutation_i2; subtree_mutation accepted as an alias).
const char* op_name(VariationOp op);
VariationOp op_from_name(const std::string& name); // throws ConfigError

struct OperatorSpec {
    VariationOp op = VariationOp::SubtreeMutation;
    double probability = 0.0;
    int arity = 1;
};

/// Throws ConfigError unless probabilities are in [0,1] and sum to 1
/// (tolerance 1e-9) and each arity matches the operator.
void validate_operator_list(const std::vector<OperatorSpec>& ops);

/// Index into ops drawn by probability.
int draw_operator(Rng& rng, const std::vector<OperatorSpec>& ops);

/// Replaces a uniformly chosen node's subtree with a fresh Grow subtree that
/// keeps the offspring within the parent's depth bound.
Tree subtree_mutation(Rng& rng, const Tree& parent);

/// Subtree crossover constrained to type-legal, depth-bounded offspring.
/// Slot and donor are drawn by rejection sampling (50 attempts); when no
/// legal pair is found the offspring is a copy of parent a.
Tree protected_crossover(Rng& rng, const Tree& a, const Tree& b);

/// Perturbs every constant leaf with independent N(0, sigma^2) noise.
/// Structure is unchanged; sigma = 0 returns an identical copy.
Tree numeric_mutation(Rng& rng, const Tree& parent, double sigma);

/// Replaces one uniformly chosen internal function node with a different
/// primitive of the same layer and arity. Returns an identical copy when
/// there is no internal node or no alternative for the chosen one.
Tree point_mutation_i2(Rng& rng, const Tree& parent);

} // namespace gp
