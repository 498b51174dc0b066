#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gp/rng.hpp"

using namespace gp;

TEST_CASE("same stream id reproduces the same draws") {
    Rng a = rng_stream(42, 0);
    Rng b = rng_stream(42, 0);
    for (int i = 0; i < 10000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("different stream ids diverge immediately") {
    Rng a = rng_stream(42, 0);
    Rng b = rng_stream(42, 1);
    bool any_diff = false;
    for (int i = 0; i < 10000; ++i) {
        any_diff |= a.next_u64() != b.next_u64();
    }
    CHECK(any_diff);
}

TEST_CASE("thirty-one streams of one master seed are pairwise distinct") {
    std::set<std::uint64_t> first_draws;
    for (std::uint64_t i = 0; i <= 30; ++i) {
        first_draws.insert(rng_stream(7, i).next_u64());
    }
    CHECK(first_draws.size() == 31);
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
    Rng rng(123);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int hits every value of a small range") {
    Rng rng(5);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i) {
        const std::int64_t v = rng.uniform_int(-2, 3);
        REQUIRE(v >= -2);
        REQUIRE(v <= 3);
        ++counts[static_cast<std::size_t>(v + 2)];
    }
    for (int c : counts) {
        CHECK(c > 9000); // expectation 10000 each
    }
}

TEST_CASE("normal matches its first two moments") {
    Rng rng(99);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal(2.0, 3.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("zero-stddev normal returns the mean exactly") {
    Rng rng(1);
    CHECK(rng.normal(1.25, 0.0) == 1.25);
}
