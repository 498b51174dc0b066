#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gp {

/// Number of workers to use when a config asks for the hardware default.
int hardware_workers();

/// Runs fn(i) for i in [0, n) across n_workers threads. Work items must be
/// pure with respect to shared state: they may only write to their own slot
/// of a result container. Results end up keyed by index, so the outcome is
/// identical for every worker count. A throwing item aborts the whole batch
/// and the first exception is rethrown on the caller thread.
void parallel_for(std::size_t n, int n_workers, const std::function<void(std::size_t)>& fn);

/// Fitness fan-out: out[i] = score(i) for every job index. The coordinator
/// owns all randomness; score must be deterministic and side-effect free.
template <typename Score>
std::vector<double> evaluate_all(std::size_t n_jobs, int n_workers, Score&& score) {
    std::vector<double> out(n_jobs, 0.0);
    parallel_for(n_jobs, n_workers, [&](std::size_t i) { out[i] = score(i); });
    return out;
}

} // namespace gp
