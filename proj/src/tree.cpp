#include "gp/tree.hpp"

#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "gp/errors.hpp"

namespace gp {

Tree::Tree(std::vector<Node> nodes, std::shared_ptr<const PrimitiveSet> prims,
           int input_size, int max_depth)
    : nodes_(std::move(nodes)), prims_(std::move(prims)),
      input_size_(input_size), max_depth_(max_depth) {}

int Tree::subtree_depth(int i) const {
    const Node& n = node(i);
    if (n.kind != NodeKind::Function) return 0;
    int child = i + 1;
    int deepest = 0;
    for (int c = 0; c < n.arity; ++c) {
        deepest = std::max(deepest, subtree_depth(child));
        child += node(child).subtree_size;
    }
    return deepest + 1;
}

std::vector<std::int32_t> Tree::node_depths() const {
    std::vector<std::int32_t> depths(nodes_.size(), 0);
    // Pre-order: a node's children lie inside its span, one level deeper.
    for (int i = 0; i < size(); ++i) {
        const Node& n = node(i);
        if (n.kind != NodeKind::Function) continue;
        int child = i + 1;
        for (int c = 0; c < n.arity; ++c) {
            depths[static_cast<std::size_t>(child)] = depths[static_cast<std::size_t>(i)] + 1;
            child += node(child).subtree_size;
        }
    }
    return depths;
}

int Tree::node_depth(int i) const { return node_depths()[static_cast<std::size_t>(i)]; }

namespace {

/// Walks the span structure, checking sizes and arities; returns false on
/// inconsistency. Fills child start indices for node i into children.
bool span_children(const std::vector<Node>& nodes, int i, std::vector<int>& children) {
    children.clear();
    const Node& n = nodes[static_cast<std::size_t>(i)];
    if (n.kind != NodeKind::Function) {
        return n.subtree_size == 1;
    }
    int child = i + 1;
    for (int c = 0; c < n.arity; ++c) {
        if (child >= static_cast<int>(nodes.size())) return false;
        children.push_back(child);
        const std::int32_t sz = nodes[static_cast<std::size_t>(child)].subtree_size;
        if (sz <= 0) return false;
        child += sz;
    }
    return child == i + n.subtree_size;
}

} // namespace

std::optional<std::string> Tree::validate() const {
    if (nodes_.empty()) return "empty tree";
    if (!prims_) return "tree has no primitive set";
    if (node(0).subtree_size != size()) return "root span does not cover the tree";
    if (!node(0).scalar_valued()) return "root is vector-valued";

    std::vector<int> children;
    for (int i = 0; i < size(); ++i) {
        const Node& n = node(i);
        switch (n.kind) {
        case NodeKind::Constant:
            if (!std::isfinite(n.value)) return "non-finite constant";
            break;
        case NodeKind::Feature:
            if (n.index < 0 || n.index >= input_size_) return "feature index out of range";
            break;
        case NodeKind::VectorWindow:
            if (n.length < 1 || n.index < 0 || n.index + n.length > input_size_)
                return "vector window out of bounds";
            break;
        case NodeKind::Function: {
            if (n.prim < 0 || n.prim >= prims_->size()) return "unknown primitive index";
            const PrimitiveSignature& sig = prims_->at(n.prim);
            if (n.arity != sig.arity) return "node arity differs from primitive arity";
            if (!span_children(nodes_, i, children))
                return "inconsistent subtree spans";
            if (sig.layer == Layer::Mezzanine) {
                if (children.size() != 1 ||
                    node(children[0]).kind != NodeKind::VectorWindow)
                    return "mezzanine node without a single vector-window child";
            } else {
                for (int c : children) {
                    if (!node(c).scalar_valued())
                        return "vector-valued child of a low-level function";
                }
            }
            break;
        }
        }
        if (n.kind != NodeKind::Function && n.subtree_size != 1)
            return "terminal with a span";
    }
    // Vector windows may appear only under a mezzanine parent; with the root
    // scalar-valued and low-level children checked above, the remaining case
    // is a window whose parent is low-level, already rejected.
    if (depth() > max_depth_) return "depth exceeds max_depth";
    return std::nullopt;
}

// --- generation --------------------------------------------------------

namespace {

struct GenContext {
    Rng& rng;
    const PrimitiveSet& prims;
    int input_size;
    int max_depth;
    bool full;
};

void gen_scalar_terminal(GenContext& ctx, std::vector<Node>& out) {
    Node n;
    if (ctx.rng.bounded(2) == 0) {
        n.kind = NodeKind::Feature;
        n.index = static_cast<std::int32_t>(ctx.rng.bounded(static_cast<std::uint64_t>(ctx.input_size)));
    } else {
        n.kind = NodeKind::Constant;
        n.value = ctx.rng.uniform(-1.0, 1.0);
    }
    out.push_back(n);
}

void gen_window_terminal(const GenContext& ctx, std::vector<Node>& out) {
    Node n;
    n.kind = NodeKind::VectorWindow;
    n.index = 0;
    n.length = ctx.input_size;
    out.push_back(n);
}

/// Appends a scalar-valued subtree at the given depth; returns nothing, the
/// pre-order vector and subtree_size fields are completed on the way out.
void gen_scalar(GenContext& ctx, int depth, std::vector<Node>& out) {
    const bool at_limit = depth >= ctx.max_depth;
    bool make_function = !at_limit;
    if (!ctx.full && !at_limit) {
        make_function = ctx.rng.bounded(2) == 0;
    }
    if (!make_function) {
        gen_scalar_terminal(ctx, out);
        return;
    }

    // Full keeps every leaf at max_depth, so a mezzanine node (whose window
    // child is a leaf one level down) is only eligible on the last level.
    const bool mezz_ok = ctx.prims.has_mezzanine() &&
                         (!ctx.full || depth == ctx.max_depth - 1);
    const std::size_t n_low = ctx.prims.low().size();
    const std::size_t n_choices = n_low + (mezz_ok ? ctx.prims.mezz().size() : 0);
    const std::size_t pick = static_cast<std::size_t>(ctx.rng.bounded(n_choices));
    const int prim_index = pick < n_low ? ctx.prims.low()[pick]
                                        : ctx.prims.mezz()[pick - n_low];
    const PrimitiveSignature& sig = ctx.prims.at(prim_index);

    const std::size_t at = out.size();
    Node n;
    n.kind = NodeKind::Function;
    n.prim = static_cast<std::int16_t>(prim_index);
    n.arity = static_cast<std::int16_t>(sig.arity);
    out.push_back(n);
    if (sig.layer == Layer::Mezzanine) {
        gen_window_terminal(ctx, out);
    } else {
        for (int c = 0; c < sig.arity; ++c) gen_scalar(ctx, depth + 1, out);
    }
    out[at].subtree_size = static_cast<std::int32_t>(out.size() - at);
}

} // namespace

Tree generate(Rng& rng, std::shared_ptr<const PrimitiveSet> prims,
              int input_size, int max_depth, GenMethod method) {
    assert(max_depth >= 1 && input_size >= 1);
    GenContext ctx{rng, *prims, input_size, max_depth, method == GenMethod::Full};
    std::vector<Node> nodes;
    gen_scalar(ctx, 0, nodes);
    return Tree(std::move(nodes), std::move(prims), input_size, max_depth);
}

std::vector<Node> generate_subtree(Rng& rng, const PrimitiveSet& prims,
                                   int input_size, int depth_budget,
                                   bool vector_slot) {
    std::vector<Node> nodes;
    GenContext ctx{rng, prims, input_size, depth_budget, false};
    if (vector_slot) {
        gen_window_terminal(ctx, nodes);
    } else {
        gen_scalar(ctx, 0, nodes);
    }
    return nodes;
}

// --- evaluation --------------------------------------------------------

namespace {

double eval_node(const Tree& t, int i, std::span<const double> x) {
    const Node& n = t.node(i);
    switch (n.kind) {
    case NodeKind::Constant:
        return n.value;
    case NodeKind::Feature:
        return x[static_cast<std::size_t>(n.index)];
    case NodeKind::Function: {
        const PrimitiveSignature& sig = t.prims().at(n.prim);
        if (sig.layer == Layer::Mezzanine) {
            const Node& w = t.node(i + 1);
            return sig.vector_eval(x.data() + w.index, w.length);
        }
        double args[8];
        int child = i + 1;
        for (int c = 0; c < n.arity; ++c) {
            args[c] = eval_node(t, child, x);
            child += t.node(child).subtree_size;
        }
        return sig.scalar_eval(args);
    }
    case NodeKind::VectorWindow:
        throw MalformedTreeError("vector window evaluated as a scalar");
    }
    return 0.0;
}

} // namespace

double eval_reference(const Tree& t, std::span<const double> x) {
    assert(static_cast<int>(x.size()) == t.input_size());
    return eval_node(t, 0, x);
}

namespace {

int emit_postfix(const Tree& t, int i, std::vector<LinearProgram::Instr>& code) {
    const Node& n = t.node(i);
    LinearProgram::Instr ins{n.kind, n.prim, n.arity, n.index, n.length, n.value};
    switch (n.kind) {
    case NodeKind::Constant:
    case NodeKind::Feature:
        code.push_back(ins);
        return 1;
    case NodeKind::Function: {
        const PrimitiveSignature& sig = t.prims().at(n.prim);
        if (sig.layer == Layer::Mezzanine) {
            // The window child folds into the call instruction.
            const Node& w = t.node(i + 1);
            ins.index = w.index;
            ins.length = w.length;
            ins.arity = 0;
            code.push_back(ins);
            return 1;
        }
        int child = i + 1;
        int peak = 0;
        for (int c = 0; c < n.arity; ++c) {
            peak = std::max(peak, c + emit_postfix(t, child, code));
            child += t.node(child).subtree_size;
        }
        code.push_back(ins);
        return peak;
    }
    case NodeKind::VectorWindow:
        throw MalformedTreeError("vector window outside a mezzanine call");
    }
    return 1;
}

} // namespace

LinearProgram compile(const Tree& t) {
    LinearProgram prog;
    prog.prims_ = t.prims_ptr();
    prog.max_stack_ = emit_postfix(t, 0, prog.code_);
    return prog;
}

double LinearProgram::run(std::span<const double> x, std::vector<double>& stack) const {
    stack.clear();
    if (static_cast<int>(stack.capacity()) < max_stack_) stack.reserve(static_cast<std::size_t>(max_stack_));
    for (const Instr& ins : code_) {
        switch (ins.kind) {
        case NodeKind::Constant:
            stack.push_back(ins.value);
            break;
        case NodeKind::Feature:
            stack.push_back(x[static_cast<std::size_t>(ins.index)]);
            break;
        case NodeKind::Function: {
            const PrimitiveSignature& sig = prims_->at(ins.prim);
            if (sig.layer == Layer::Mezzanine) {
                stack.push_back(sig.vector_eval(x.data() + ins.index, ins.length));
            } else {
                double args[8];
                const std::size_t base = stack.size() - static_cast<std::size_t>(ins.arity);
                for (int c = 0; c < ins.arity; ++c) args[c] = stack[base + static_cast<std::size_t>(c)];
                stack.resize(base);
                stack.push_back(sig.scalar_eval(args));
            }
            break;
        }
        case NodeKind::VectorWindow:
            break; // never emitted
        }
    }
    return stack.back();
}

double LinearProgram::run(std::span<const double> x) const {
    std::vector<double> stack;
    return run(x, stack);
}

// --- tree algebra ------------------------------------------------------

Tree replace_subtree(const Tree& t, SubtreeSpan span, std::span<const Node> donor) {
    std::vector<Node> nodes;
    nodes.reserve(t.nodes().size() - static_cast<std::size_t>(span.size()) + donor.size());
    nodes.insert(nodes.end(), t.nodes().begin(), t.nodes().begin() + span.begin);
    nodes.insert(nodes.end(), donor.begin(), donor.end());
    nodes.insert(nodes.end(), t.nodes().begin() + span.end, t.nodes().end());

    // Ancestors of the splice point absorb the growth difference. In
    // pre-order every node before the splice either ends before it or
    // contains it, so one containment test per node suffices.
    const std::int32_t delta =
        static_cast<std::int32_t>(donor.size()) - span.size();
    if (delta != 0) {
        for (std::int32_t i = 0; i < span.begin; ++i) {
            Node& n = nodes[static_cast<std::size_t>(i)];
            if (i + n.subtree_size > span.begin) n.subtree_size += delta;
        }
    }

    Tree out(std::move(nodes), t.prims_ptr(), t.input_size(), t.max_depth());
    if (auto why = out.validate()) {
        throw MalformedTreeError("replace_subtree produced an invalid tree: " + *why);
    }
    return out;
}

// --- serialization -----------------------------------------------------

namespace {

void print_node(const Tree& t, int i, std::string& out) {
    const Node& n = t.node(i);
    char buf[64];
    switch (n.kind) {
    case NodeKind::Constant:
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out += buf;
        return;
    case NodeKind::Feature:
        std::snprintf(buf, sizeof buf, "x%d", n.index);
        out += buf;
        return;
    case NodeKind::VectorWindow:
        std::snprintf(buf, sizeof buf, "v%d:%d", n.index, n.length);
        out += buf;
        return;
    case NodeKind::Function: {
        out += '(';
        out += t.prims().at(n.prim).id;
        int child = i + 1;
        for (int c = 0; c < n.arity; ++c) {
            out += ' ';
            print_node(t, child, out);
            child += t.node(child).subtree_size;
        }
        out += ')';
        return;
    }
    }
}

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    const PrimitiveSet& prims;
    int input_size;
    int nesting = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("tree parse error at offset " + std::to_string(pos) + ": " + what);
    }

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    std::int32_t parse_uint() {
        std::size_t start = pos;
        std::int64_t v = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            v = v * 10 + (text[pos] - '0');
            if (v > 1'000'000'000) fail("index too large");
            ++pos;
        }
        if (pos == start) fail("expected an integer");
        return static_cast<std::int32_t>(v);
    }

    void parse_expr(std::vector<Node>& out) {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        const char c = text[pos];
        if (c == '(') {
            if (++nesting > 512) fail("expression nested too deeply");
            ++pos;
            skip_ws();
            std::size_t start = pos;
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            const std::string id = text.substr(start, pos - start);
            if (id.empty()) fail("expected a primitive id after '('");
            const int prim = prims.find(id);
            if (prim < 0) fail("unknown primitive: " + id);
            const PrimitiveSignature& sig = prims.at(prim);

            const std::size_t at = out.size();
            Node n;
            n.kind = NodeKind::Function;
            n.prim = static_cast<std::int16_t>(prim);
            n.arity = static_cast<std::int16_t>(sig.arity);
            out.push_back(n);
            for (int a = 0; a < sig.arity; ++a) parse_expr(out);
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            --nesting;
            out[at].subtree_size = static_cast<std::int32_t>(out.size() - at);
            return;
        }
        if (c == 'x' && pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            ++pos;
            Node n;
            n.kind = NodeKind::Feature;
            n.index = parse_uint();
            out.push_back(n);
            return;
        }
        if (c == 'v' && pos + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            ++pos;
            Node n;
            n.kind = NodeKind::VectorWindow;
            n.index = parse_uint();
            if (pos >= text.size() || text[pos] != ':') fail("expected ':' in window");
            ++pos;
            n.length = parse_uint();
            out.push_back(n);
            return;
        }
        // Constant.
        char* end = nullptr;
        const double v = std::strtod(text.c_str() + pos, &end);
        if (end == text.c_str() + pos) fail("expected a constant, terminal or '('");
        if (!std::isfinite(v)) fail("non-finite constant");
        pos = static_cast<std::size_t>(end - text.c_str());
        Node n;
        n.kind = NodeKind::Constant;
        n.value = v;
        out.push_back(n);
    }
};

} // namespace

std::string to_string(const Tree& t) {
    std::string out;
    print_node(t, 0, out);
    return out;
}

Tree parse_tree(const std::string& text, std::shared_ptr<const PrimitiveSet> prims,
                int input_size) {
    Parser p{text, 0, *prims, input_size};
    std::vector<Node> nodes;
    p.parse_expr(nodes);
    if (!p.at_end()) p.fail("trailing input after expression");

    Tree t(std::move(nodes), std::move(prims), input_size, 0);
    // Adopt the parsed depth as the bound, then check everything else.
    Tree bound(std::vector<Node>(t.nodes()), t.prims_ptr(), input_size, t.depth());
    if (auto why = bound.validate()) {
        throw DataError("parsed tree is invalid: " + *why);
    }
    return bound;
}

bool same_expression(const Tree& a, const Tree& b) {
    if (a.input_size() != b.input_size() || a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i) {
        const Node& na = a.node(i);
        const Node& nb = b.node(i);
        if (na.kind != nb.kind || na.prim != nb.prim || na.arity != nb.arity ||
            na.subtree_size != nb.subtree_size || na.index != nb.index ||
            na.length != nb.length || na.value != nb.value)
            return false;
    }
    return true;
}

} // namespace gp
