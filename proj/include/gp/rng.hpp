#pragma once

#include <cstdint>
#include <random>

namespace gp {

/// Deterministic random source. Wraps std::mt19937_64 (bit-exact sequence by
/// the standard) with hand-rolled distributions so that draws are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), bias-free via 128-bit multiply-high.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        bounded(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Gaussian via Box-Muller; the second variate is discarded so one call
    /// consumes exactly two uniforms.
    double normal(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

/// Stateless mix of (master_seed, stream_id) into a sub-stream seed.
/// Equivalent to taking output stream_id+1 of a splitmix64 generator seeded
/// with master_seed, so streams are cheap to address at random.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id);

/// Independent reproducible sub-stream: same (seed, id) -> same stream.
Rng rng_stream(std::uint64_t master_seed, std::uint64_t stream_id);

} // namespace gp
