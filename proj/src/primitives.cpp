#include "gp/primitives.hpp"

#include <cmath>
#include <unordered_set>

#include "gp/errors.hpp"

namespace gp {

namespace {

double guard(double v) {
    if (std::isnan(v)) return 0.0;
    if (v > kValueCap) return kValueCap;
    if (v < -kValueCap) return -kValueCap;
    return v;
}

double eval_add(const double* a) { return guard(a[0] + a[1]); }
double eval_sub(const double* a) { return guard(a[0] - a[1]); }
double eval_mul(const double* a) { return guard(a[0] * a[1]); }

// Koza-protected division: 1.0 on a near-zero denominator.
double eval_div(const double* a) {
    if (std::fabs(a[1]) < kDivEpsilon) return 1.0;
    return guard(a[0] / a[1]);
}

double eval_relu(const double* a) { return a[0] > 0.0 ? a[0] : 0.0; }
double eval_max(const double* a) { return a[0] > a[1] ? a[0] : a[1]; }
double eval_min(const double* a) { return a[0] < a[1] ? a[0] : a[1]; }
double eval_mean(const double* a) { return guard(0.5 * (a[0] + a[1])); }
double eval_x2(const double* a) { return guard(a[0] * a[0]); }
double eval_sqrt(const double* a) { return std::sqrt(std::fabs(a[0])); }

double eval_vmean(const double* v, int n) {
    double s = v[0], lo = v[0], hi = v[0];
    for (int i = 1; i < n; ++i) {
        s += v[i];
        lo = v[i] < lo ? v[i] : lo;
        hi = v[i] > hi ? v[i] : hi;
    }
    // Summation rounding must not push the mean outside [min, max].
    double m = s / n;
    if (!(m >= lo)) m = lo;
    if (m > hi) m = hi;
    return guard(m);
}

double eval_vmin(const double* v, int n) {
    double m = v[0];
    for (int i = 1; i < n; ++i) m = v[i] < m ? v[i] : m;
    return m;
}

double eval_vmax(const double* v, int n) {
    double m = v[0];
    for (int i = 1; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

const std::vector<PrimitiveSignature>& registry() {
    static const std::vector<PrimitiveSignature> regs = {
        {"ADD", Layer::LowLevel, 2, eval_add, nullptr},
        {"SUB", Layer::LowLevel, 2, eval_sub, nullptr},
        {"MUL", Layer::LowLevel, 2, eval_mul, nullptr},
        {"DIV", Layer::LowLevel, 2, eval_div, nullptr},
        {"RELU", Layer::LowLevel, 1, eval_relu, nullptr},
        {"MAX", Layer::LowLevel, 2, eval_max, nullptr},
        {"MEAN", Layer::LowLevel, 2, eval_mean, nullptr},
        {"MIN", Layer::LowLevel, 2, eval_min, nullptr},
        {"X2", Layer::LowLevel, 1, eval_x2, nullptr},
        {"SQRT", Layer::LowLevel, 1, eval_sqrt, nullptr},
        {"VMEAN", Layer::Mezzanine, 1, nullptr, eval_vmean},
        {"VMIN", Layer::Mezzanine, 1, nullptr, eval_vmin},
        {"VMAX", Layer::Mezzanine, 1, nullptr, eval_vmax},
    };
    return regs;
}

const PrimitiveSignature* registry_find(const std::string& id) {
    for (const PrimitiveSignature& sig : registry()) {
        if (sig.id == id) return &sig;
    }
    return nullptr;
}

} // namespace

PrimitiveSet::PrimitiveSet(const std::vector<std::string>& low_ids,
                           const std::vector<std::string>& mezz_ids) {
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& id, Layer expected) {
        const PrimitiveSignature* sig = registry_find(id);
        if (sig == nullptr) {
            throw ConfigError("unknown primitive id: " + id);
        }
        if (sig->layer != expected) {
            throw ConfigError("primitive " + id + " declared in the wrong layer");
        }
        if (sig->arity < 1 || sig->arity > 8) {
            throw ConfigError("primitive " + id + " arity outside the supported 1..8");
        }
        if (!seen.insert(id).second) {
            throw ConfigError("duplicate primitive id: " + id);
        }
        sigs_.push_back(*sig);
        return static_cast<int>(sigs_.size()) - 1;
    };
    for (const std::string& id : low_ids) low_.push_back(add(id, Layer::LowLevel));
    for (const std::string& id : mezz_ids) mezz_.push_back(add(id, Layer::Mezzanine));
    if (low_.empty()) {
        throw ConfigError("primitive set needs at least one low-level primitive");
    }
}

int PrimitiveSet::find(const std::string& id) const {
    for (int i = 0; i < size(); ++i) {
        if (sigs_[static_cast<std::size_t>(i)].id == id) return i;
    }
    return -1;
}

std::vector<std::string> builtin_ids(Layer layer) {
    std::vector<std::string> ids;
    for (const PrimitiveSignature& sig : registry()) {
        if (sig.layer == layer) ids.push_back(sig.id);
    }
    return ids;
}

PrimitiveSet default_primitive_set() {
    return PrimitiveSet(builtin_ids(Layer::LowLevel), builtin_ids(Layer::Mezzanine));
}

const PrimitiveSignature& lookup(const PrimitiveSet& set, const std::string& id) {
    const int i = set.find(id);
    if (i < 0) {
        throw ConfigError("primitive not in set: " + id);
    }
    return set.at(i);
}

double apply(const PrimitiveSignature& p, std::span<const double> args) {
    if (p.layer == Layer::LowLevel) {
        if (static_cast<int>(args.size()) != p.arity) {
            throw MalformedTreeError("arity mismatch applying " + p.id);
        }
        return p.scalar_eval(args.data());
    }
    if (args.empty()) {
        throw MalformedTreeError("empty vector argument to " + p.id);
    }
    return p.vector_eval(args.data(), static_cast<int>(args.size()));
}

} // namespace gp
