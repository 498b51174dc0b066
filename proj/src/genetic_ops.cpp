#include "gp/genetic_ops.hpp"

#include <cassert>
#include <cmath>

#include "gp/errors.hpp"

namespace gp {

int op_arity(VariationOp op) {
    return op == VariationOp::ProtectedCrossover ? 2 : 1;
}

const char* op_name(VariationOp op) {
    switch (op) {
    case VariationOp::SubtreeMutation: return "mutation";
    case VariationOp::ProtectedCrossover: return "protected_crossover";
    case VariationOp::NumericMutation: return "numeric_mutation";
    case VariationOp::PointMutationI2: return "mutation_i2";
    }
    return "?";
}

VariationOp op_from_name(const std::string& name) {
    if (name == "mutation" || name == "subtree_mutation") return VariationOp::SubtreeMutation;
    if (name == "protected_crossover" || name == "crossover") return VariationOp::ProtectedCrossover;
    if (name == "numeric_mutation") return VariationOp::NumericMutation;
    if (name == "mutation_i2" || name == "point_mutation") return VariationOp::PointMutationI2;
    throw ConfigError("unknown genetic operation: " + name);
}

void validate_operator_list(const std::vector<OperatorSpec>& ops) {
    if (ops.empty()) throw ConfigError("operations list is empty");
    double sum = 0.0;
    for (const OperatorSpec& spec : ops) {
        if (spec.probability < 0.0 || spec.probability > 1.0) {
            throw ConfigError(std::string("operation probability out of [0,1] for ") + op_name(spec.op));
        }
        if (spec.arity != op_arity(spec.op)) {
            throw ConfigError(std::string("operation ") + op_name(spec.op) + " expects arity " +
                              std::to_string(op_arity(spec.op)) + ", got " + std::to_string(spec.arity));
        }
        sum += spec.probability;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ConfigError("operation probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
}

int draw_operator(Rng& rng, const std::vector<OperatorSpec>& ops) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        acc += ops[i].probability;
        if (u < acc) return static_cast<int>(i);
    }
    // Rounding tail: fall back to the last operator with nonzero probability.
    for (std::size_t i = ops.size(); i-- > 0;) {
        if (ops[i].probability > 0.0) return static_cast<int>(i);
    }
    return 0;
}

Tree subtree_mutation(Rng& rng, const Tree& parent) {
    const int at = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(parent.size())));
    const bool vector_slot = !parent.node(at).scalar_valued();
    const int budget = parent.max_depth() - parent.node_depth(at);
    std::vector<Node> fresh = generate_subtree(rng, parent.prims(), parent.input_size(),
                                               budget, vector_slot);
    return replace_subtree(parent, parent.subtree_span(at), fresh);
}

namespace {

constexpr int kCrossoverAttempts = 50;

/// Depth of the subtree rooted at each node, by index.
std::vector<std::int32_t> subtree_depths(const Tree& t) {
    std::vector<std::int32_t> out(static_cast<std::size_t>(t.size()), 0);
    // Pre-order: children come after parents, so fill right to left.
    for (int i = t.size() - 1; i >= 0; --i) {
        const Node& n = t.node(i);
        if (n.kind != NodeKind::Function) continue;
        int child = i + 1;
        std::int32_t deepest = 0;
        for (int c = 0; c < n.arity; ++c) {
            deepest = std::max(deepest, out[static_cast<std::size_t>(child)]);
            child += t.node(child).subtree_size;
        }
        out[static_cast<std::size_t>(i)] = deepest + 1;
    }
    return out;
}

} // namespace

Tree protected_crossover(Rng& rng, const Tree& a, const Tree& b) {
    assert(a.max_depth() == b.max_depth() && a.input_size() == b.input_size());
    const std::vector<std::int32_t> slot_depths = a.node_depths();
    const std::vector<std::int32_t> donor_depths = subtree_depths(b);

    for (int attempt = 0; attempt < kCrossoverAttempts; ++attempt) {
        const int slot = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(a.size())));
        const int donor = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(b.size())));
        if (a.node(slot).scalar_valued() != b.node(donor).scalar_valued()) continue;
        if (slot_depths[static_cast<std::size_t>(slot)] +
                donor_depths[static_cast<std::size_t>(donor)] > a.max_depth())
            continue;
        const SubtreeSpan dspan = b.subtree_span(donor);
        return replace_subtree(a, a.subtree_span(slot),
                               std::span<const Node>(b.nodes().data() + dspan.begin,
                                                     static_cast<std::size_t>(dspan.size())));
    }
    return a; // reproduction fallback
}

Tree numeric_mutation(Rng& rng, const Tree& parent, double sigma) {
    if (sigma == 0.0) return parent;
    std::vector<Node> nodes = parent.nodes();
    for (Node& n : nodes) {
        if (n.kind == NodeKind::Constant) {
            n.value += rng.normal(0.0, sigma);
        }
    }
    return Tree(std::move(nodes), parent.prims_ptr(), parent.input_size(), parent.max_depth());
}

Tree point_mutation_i2(Rng& rng, const Tree& parent) {
    std::vector<int> internal;
    for (int i = 0; i < parent.size(); ++i) {
        if (parent.node(i).kind == NodeKind::Function) internal.push_back(i);
    }
    if (internal.empty()) return parent;

    const int at = internal[rng.bounded(internal.size())];
    const Node& n = parent.node(at);
    const PrimitiveSignature& cur = parent.prims().at(n.prim);
    std::vector<int> alternatives;
    const std::vector<int>& pool =
        cur.layer == Layer::LowLevel ? parent.prims().low() : parent.prims().mezz();
    for (int p : pool) {
        if (p != n.prim && parent.prims().at(p).arity == cur.arity) alternatives.push_back(p);
    }
    if (alternatives.empty()) return parent;

    std::vector<Node> nodes = parent.nodes();
    nodes[static_cast<std::size_t>(at)].prim =
        static_cast<std::int16_t>(alternatives[rng.bounded(alternatives.size())]);
    return Tree(std::move(nodes), parent.prims_ptr(), parent.input_size(), parent.max_depth());
}

} // namespace gp
