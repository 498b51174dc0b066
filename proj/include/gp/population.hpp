#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gp/datasets.hpp"
#include "gp/genetic_ops.hpp"
#include "gp/learners.hpp"
#include "gp/rng.hpp"

namespace gp {

/// Panmictic steady state: one persistent population, offspring inserted one
/// at a time over the current worst.
struct SteadyStateConfig {
    int pop_size = 0;
};

enum class Neighborhood { VonNeumann, Moore };

/// Toroidal grid; one individual per cell, mating and replacement restricted
/// to each cell's neighborhood.
struct CellularConfig {
    int grid_w = 0;
    int grid_h = 0;
    Neighborhood neighborhood = Neighborhood::VonNeumann;
    int radius = 1;
};

/// Ring of steady-state islands exchanging migrants at a fixed interval.
struct IslandConfig {
    int n_islands = 0;
    int island_pop = 0;
    int migration_interval = 10;
    int n_migrants = 0;
};

using DynamicsConfig = std::variant<SteadyStateConfig, CellularConfig, IslandConfig>;

struct EngineConfig {
    DynamicsConfig dynamics = SteadyStateConfig{};
    std::shared_ptr<const PrimitiveSet> prims;
    int generations = 0;
    int tournament_size = 3;
    bool elitism = true;
    std::vector<OperatorSpec> operators;
    double numeric_sigma = 0.1;
    int max_depth = 6;
    bool online = false;
    int batch_size = 0; // used in online mode
    int n_workers = 1;
    std::uint64_t run_seed = 0;

    int total_pop() const;
};

/// One RunLog row per generation (generation 0 is the evaluated initial
/// population). best_test is the reported test metric of the generation's
/// best-train individual; evaluations counts individual-on-batch scorings.
struct RunLogRow {
    int generation = 0;
    double best_train = 0.0;
    double best_test = 0.0;
    double mean_fitness = 0.0;
    std::int64_t evaluations = 0;
    double elapsed_s = 0.0;
};
using RunLog = std::vector<RunLogRow>;

/// Strict preference order used everywhere a "better" individual is needed:
/// lower fitness, then smaller tree, then lower index.
bool better(const Individual& a, int index_a, const Individual& b, int index_b);

/// Best-of-k over candidate indices, sampled uniformly without replacement
/// (k is clamped to the candidate count). All candidates must have current
/// fitness.
int tournament_select(Rng& rng, const std::vector<Individual>& pop,
                      std::span<const std::int32_t> candidates, int k);

/// Cells within the given radius of cell (inclusive) on a (grid_w x grid_h)
/// torus; VonNeumann uses Manhattan distance, Moore uses Chebyshev. Sorted,
/// duplicates from wrap-around removed.
std::vector<std::int32_t> toroidal_neighborhood(int grid_w, int grid_h, int cell,
                                                Neighborhood kind, int radius);

/// Ring migration: island i sends copies of its n_migrants best to island
/// i+1 (mod n), displacing the receiver's n_migrants worst. Emigrants are
/// snapshotted before any replacement. Island sizes are unchanged.
void migrate_ring(std::vector<std::vector<Individual>>& islands, int n_migrants);

/// Evolutionary run state: populations under one dynamics, the rng streams,
/// the current batch, and counters. Exposed so tests can drive single
/// generations; ordinary callers use run().
class Engine {
public:
    Engine(EngineConfig config, const Learner& learner, const Dataset& dataset);

    /// Builds (ramped half-and-half) and evaluates the initial populations.
    void init();
    /// One generation: batch advance + re-evaluation (online), dynamics
    /// sweep, then migration when due.
    void step_generation();

    int generation() const { return generation_; }
    int n_populations() const { return static_cast<int>(populations_.size()); }
    const std::vector<Individual>& population(int i = 0) const {
        return populations_[static_cast<std::size_t>(i)];
    }
    std::int64_t evaluations() const { return evaluations_; }
    std::int64_t current_batch_id() const { return batch_.id; }
    const Individual& best_ever() const { return best_ever_; }

    /// Row describing the current state (test metric of the best individual
    /// included).
    RunLogRow current_row(double elapsed_s) const;

    /// Best-train individual across all populations right now.
    const Individual& current_best() const;

private:
    // rng stream ids within a run seed
    static constexpr std::uint64_t kStreamInit = 0;
    static constexpr std::uint64_t kStreamBatch = 1;
    static constexpr std::uint64_t kStreamDynamics = 2;
    static constexpr std::uint64_t kStreamIslandBase = 16;

    void build_population(std::vector<Individual>& pop, int count, Rng& rng);
    void evaluate_stale(std::vector<Individual*> stale);
    void ensure_evaluated();
    /// parents, when given, receives the indices of the tournament winners
    /// used by the drawn operator (provenance for locality checks).
    Tree variation(Rng& rng, const std::vector<Individual>& pop,
                   std::span<const std::int32_t> candidates,
                   std::vector<std::int32_t>* parents = nullptr);
    void insertions(std::vector<Individual>& pop, int count, Rng& rng,
                    std::int64_t& evals);
    void step_steady_state();
    void step_cellular();
    void step_islands();
    void update_best_ever();
    int worst_index(const std::vector<Individual>& pop) const;

    EngineConfig config_;
    const Learner& learner_;
    const Dataset& dataset_;

    std::vector<std::vector<Individual>> populations_;
    std::vector<std::vector<std::int32_t>> neighborhoods_; // cellular only
    std::vector<std::int32_t> all_indices_;                // panmictic candidates

    Rng dynamics_rng_;
    std::vector<Rng> island_rngs_;
    BatchIterator batches_;
    SampleBatch batch_;
    Individual best_ever_;

    int generation_ = 0;
    std::int64_t evaluations_ = 0;
};

/// Full evolutionary run; the RunLog is a pure function of (config, seed,
/// dataset) except for the elapsed_s column. When best_tree is given it
/// receives the final generation's best-train individual (the one the last
/// log row describes).
RunLog run(const EngineConfig& config, const Learner& learner, const Dataset& dataset,
           Tree* best_tree = nullptr);

} // namespace gp
