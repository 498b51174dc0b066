#include "gp/rng.hpp"

#include <cmath>
#include <numbers>

namespace gp {

double Rng::normal(double mean, double stddev) {
    if (stddev == 0.0) {
        return mean;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    return splitmix_mix(master_seed + (stream_id + 1) * 0x9E3779B97F4A7C15ULL);
}

Rng rng_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return Rng(derive_seed(master_seed, stream_id));
}

} // namespace gp
