#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gp/primitives.hpp"
#include "gp/rng.hpp"

namespace gp {

/// One observation: feature vector plus target (real for regression and
/// denoising, 0/1 label for classification).
struct Sample {
    std::vector<double> x;
    double y = 0.0;
};

enum class NodeKind : std::uint8_t { Function, Feature, VectorWindow, Constant };

/// One tree node. Trees are stored pre-order in a contiguous vector, so the
/// subtree rooted at index i occupies [i, i + subtree_size). Children of a
/// function node start at i + 1 and follow each other span to span.
struct Node {
    NodeKind kind = NodeKind::Constant;
    std::int16_t prim = -1;    // Function: index into the tree's PrimitiveSet
    std::int16_t arity = 0;    // Function: child count
    std::int32_t subtree_size = 1;
    std::int32_t index = 0;    // Feature: feature index; VectorWindow: start
    std::int32_t length = 0;   // VectorWindow: window length
    double value = 0.0;        // Constant

    bool scalar_valued() const { return kind != NodeKind::VectorWindow; }
};

enum class GenMethod { Grow, Full };

struct SubtreeSpan {
    std::int32_t begin = 0;
    std::int32_t end = 0; // one past last
    std::int32_t size() const { return end - begin; }
};

/// An expression tree over a primitive set. Immutable in practice: genetic
/// operators build new trees rather than editing in place. Depth convention:
/// a single node has depth 0, so max_depth d admits d+1 node levels.
class Tree {
public:
    Tree() = default;
    Tree(std::vector<Node> nodes, std::shared_ptr<const PrimitiveSet> prims,
         int input_size, int max_depth);

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int input_size() const { return input_size_; }
    int max_depth() const { return max_depth_; }
    const PrimitiveSet& prims() const { return *prims_; }
    const std::shared_ptr<const PrimitiveSet>& prims_ptr() const { return prims_; }

    /// Depth of the whole tree (longest root-to-leaf edge count).
    int depth() const { return subtree_depth(0); }
    /// Depth of the subtree rooted at node i.
    int subtree_depth(int i) const;
    /// Distance of node i from the root.
    int node_depth(int i) const;
    /// Depth of every node, by index.
    std::vector<std::int32_t> node_depths() const;

    SubtreeSpan subtree_span(int i) const {
        return {static_cast<std::int32_t>(i),
                static_cast<std::int32_t>(i) + node(i).subtree_size};
    }

    /// First violated invariant, or nullopt when the tree is valid.
    std::optional<std::string> validate() const;

private:
    std::vector<Node> nodes_;
    std::shared_ptr<const PrimitiveSet> prims_;
    int input_size_ = 0;
    int max_depth_ = 0;
};

/// Random tree under the depth bound. Full places function nodes at every
/// level below max_depth; Grow picks function vs terminal 50/50 above the
/// limit. Constants are uniform in [-1, 1]. Vector windows span the whole
/// input vector.
Tree generate(Rng& rng, std::shared_ptr<const PrimitiveSet> prims,
              int input_size, int max_depth, GenMethod method);

/// Fresh Grow subtree for an excised slot: scalar slots get a scalar subtree
/// of depth <= depth_budget, vector slots a fresh full-span window terminal.
std::vector<Node> generate_subtree(Rng& rng, const PrimitiveSet& prims,
                                   int input_size, int depth_budget,
                                   bool vector_slot);

/// Reference recursive interpreter.
double eval_reference(const Tree& t, std::span<const double> x);

/// Postfix linearization of a tree for the fitness hot loop. Guaranteed to
/// produce bit-identical results to eval_reference.
class LinearProgram {
public:
    struct Instr {
        NodeKind kind;        // Function / Feature / Constant (windows fold
                              // into their mezzanine caller)
        std::int16_t prim;
        std::int16_t arity;
        std::int32_t index;   // feature index or window start
        std::int32_t length;  // window length
        double value;
    };

    double run(std::span<const double> x, std::vector<double>& stack) const;
    double run(std::span<const double> x) const;

    int max_stack() const { return max_stack_; }
    const std::vector<Instr>& code() const { return code_; }

private:
    friend LinearProgram compile(const Tree& t);
    std::vector<Instr> code_;
    std::shared_ptr<const PrimitiveSet> prims_;
    int max_stack_ = 0;
};

LinearProgram compile(const Tree& t);

/// New tree with the span replaced by the donor subtree (nodes copied
/// verbatim; donor must come from a tree over the same primitive set).
/// Throws MalformedTreeError with a report if the result breaks typing or
/// the depth bound.
Tree replace_subtree(const Tree& t, SubtreeSpan span, std::span<const Node> donor);

/// Prefix-notation text, one line per tree:
///   (ADD (SUB (RELU x0) (RELU x1)) -0.002)
/// Terminals: x<k> feature, v<start>:<len> vector window, plain number
/// constant printed with 17 significant digits.
std::string to_string(const Tree& t);

/// Parses the to_string format. The result's max_depth is the parsed tree's
/// own depth. Throws DataError with position context on bad input.
Tree parse_tree(const std::string& text, std::shared_ptr<const PrimitiveSet> prims,
                int input_size);

/// Same expression: equal node sequences and input size (the depth bound is
/// not part of the expression).
bool same_expression(const Tree& a, const Tree& b);

} // namespace gp
