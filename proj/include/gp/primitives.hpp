#pragma once

#include <span>
#include <string>
#include <vector>

namespace gp {

enum class Layer { LowLevel, Mezzanine };

/// Largest value any primitive may return. Every evaluation is clamped into
/// [-kValueCap, kValueCap] so composed trees cannot overflow to inf/NaN.
inline constexpr double kValueCap = 1e150;

/// Near-zero denominator threshold for protected division.
inline constexpr double kDivEpsilon = 1e-9;

/// A named function node type. LowLevel primitives map fixed-arity scalar
/// arguments to a scalar; Mezzanine primitives reduce one vector argument to
/// a scalar. All evaluations are total: finite in, finite out.
struct PrimitiveSignature {
    std::string id;
    Layer layer = Layer::LowLevel;
    int arity = 1; // scalar argument count; Mezzanine: one vector argument
    double (*scalar_eval)(const double* args) = nullptr;
    double (*vector_eval)(const double* v, int n) = nullptr;
};

/// An immutable registry of primitives available to trees. Safe to share
/// across evaluation workers.
class PrimitiveSet {
public:
    /// Builds a set from registry ids. Throws ConfigError on an unknown or
    /// duplicate id, or if a mezzanine id appears in the low list (and vice
    /// versa).
    PrimitiveSet(const std::vector<std::string>& low_ids,
                 const std::vector<std::string>& mezz_ids);

    const std::vector<PrimitiveSignature>& all() const { return sigs_; }
    const PrimitiveSignature& at(int index) const { return sigs_[static_cast<std::size_t>(index)]; }
    int size() const { return static_cast<int>(sigs_.size()); }

    /// Indices into all() per layer.
    const std::vector<int>& low() const { return low_; }
    const std::vector<int>& mezz() const { return mezz_; }
    bool has_mezzanine() const { return !mezz_.empty(); }

    /// Index of an id, or -1.
    int find(const std::string& id) const;

private:
    std::vector<PrimitiveSignature> sigs_;
    std::vector<int> low_;
    std::vector<int> mezz_;
};

/// The ten scalar primitives and three vector reducers of the builtin
/// registry: ADD SUB MUL DIV RELU MAX MEAN MIN X2 SQRT / VMEAN VMIN VMAX.
PrimitiveSet default_primitive_set();

/// All registry ids of one layer, in registry order.
std::vector<std::string> builtin_ids(Layer layer);

/// Looks up an id in a set. Throws ConfigError if absent.
const PrimitiveSignature& lookup(const PrimitiveSet& set, const std::string& id);

/// Applies a primitive to scalar args (LowLevel, args.size()==arity) or to a
/// vector (Mezzanine, nonempty). Throws MalformedTreeError on arity mismatch.
double apply(const PrimitiveSignature& p, std::span<const double> args);

} // namespace gp
