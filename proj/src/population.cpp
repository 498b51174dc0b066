#include "gp/population.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>

#include "gp/errors.hpp"
#include "gp/scheduler.hpp"

namespace gp {

int EngineConfig::total_pop() const {
    if (const auto* ss = std::get_if<SteadyStateConfig>(&dynamics)) return ss->pop_size;
    if (const auto* cc = std::get_if<CellularConfig>(&dynamics)) return cc->grid_w * cc->grid_h;
    const auto& ic = std::get<IslandConfig>(dynamics);
    return ic.n_islands * ic.island_pop;
}

bool better(const Individual& a, int index_a, const Individual& b, int index_b) {
    assert(a.fitness.has_value() && b.fitness.has_value());
    if (*a.fitness != *b.fitness) return *a.fitness < *b.fitness;
    if (a.tree.size() != b.tree.size()) return a.tree.size() < b.tree.size();
    return index_a < index_b;
}

int tournament_select(Rng& rng, const std::vector<Individual>& pop,
                      std::span<const std::int32_t> candidates, int k) {
    assert(!candidates.empty());
    const int n = static_cast<int>(candidates.size());

    int winner = -1;
    if (k >= n) {
        // Full tournament: every candidate competes, no draws needed.
        for (std::int32_t pick : candidates) {
            if (winner < 0 || better(pop[static_cast<std::size_t>(pick)], pick,
                                     pop[static_cast<std::size_t>(winner)], winner)) {
                winner = pick;
            }
        }
        return winner;
    }

    std::int32_t stack_buf[16];
    std::vector<std::int32_t> heap_buf;
    std::int32_t* drawn = stack_buf;
    if (k > 16) {
        heap_buf.resize(static_cast<std::size_t>(k));
        drawn = heap_buf.data();
    }
    int n_drawn = 0;
    for (int d = 0; d < k; ++d) {
        std::int32_t pick;
        // distinct draws via rejection; k is small relative to n
        for (;;) {
            pick = candidates[rng.bounded(static_cast<std::uint64_t>(n))];
            bool seen = false;
            for (int j = 0; j < n_drawn; ++j) seen |= drawn[j] == pick;
            if (!seen) break;
        }
        drawn[n_drawn++] = pick;
        if (winner < 0 || better(pop[static_cast<std::size_t>(pick)], pick,
                                 pop[static_cast<std::size_t>(winner)], winner)) {
            winner = pick;
        }
    }
    return winner;
}

std::vector<std::int32_t> toroidal_neighborhood(int grid_w, int grid_h, int cell,
                                                Neighborhood kind, int radius) {
    const int cx = cell % grid_w;
    const int cy = cell / grid_w;
    std::vector<std::int32_t> out;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (kind == Neighborhood::VonNeumann && std::abs(dx) + std::abs(dy) > radius)
                continue;
            const int x = ((cx + dx) % grid_w + grid_w) % grid_w;
            const int y = ((cy + dy) % grid_h + grid_h) % grid_h;
            out.push_back(y * grid_w + x);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void migrate_ring(std::vector<std::vector<Individual>>& islands, int n_migrants) {
    if (n_migrants <= 0 || islands.size() < 2) return;
    const int n = static_cast<int>(islands.size());

    auto ranked = [](const std::vector<Individual>& pop) {
        std::vector<int> order(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return better(pop[static_cast<std::size_t>(a)], a, pop[static_cast<std::size_t>(b)], b);
        });
        return order; // best first
    };

    // Snapshot all emigrants before any replacement.
    std::vector<std::vector<Individual>> emigrants(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::vector<int> order = ranked(islands[static_cast<std::size_t>(i)]);
        for (int m = 0; m < n_migrants; ++m) {
            emigrants[static_cast<std::size_t>(i)].push_back(
                islands[static_cast<std::size_t>(i)][static_cast<std::size_t>(order[static_cast<std::size_t>(m)])]);
        }
    }
    for (int i = 0; i < n; ++i) {
        std::vector<Individual>& receiver = islands[static_cast<std::size_t>((i + 1) % n)];
        const std::vector<int> order = ranked(receiver);
        for (int m = 0; m < n_migrants; ++m) {
            const int victim = order[order.size() - 1 - static_cast<std::size_t>(m)];
            receiver[static_cast<std::size_t>(victim)] = emigrants[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
        }
    }
}

// --- Engine -------------------------------------------------------------

Engine::Engine(EngineConfig config, const Learner& learner, const Dataset& dataset)
    : config_(std::move(config)), learner_(learner), dataset_(dataset),
      dynamics_rng_(rng_stream(config_.run_seed, kStreamDynamics)),
      batches_(dataset,
               config_.online ? config_.batch_size : static_cast<int>(dataset.train_idx.size()),
               derive_seed(config_.run_seed, kStreamBatch)),
      best_ever_{} {
    assert(config_.prims);
    validate_operator_list(config_.operators);
    if (const auto* ic = std::get_if<IslandConfig>(&config_.dynamics)) {
        for (int i = 0; i < ic->n_islands; ++i) {
            island_rngs_.push_back(rng_stream(config_.run_seed, kStreamIslandBase + static_cast<std::uint64_t>(i)));
        }
    }
}

void Engine::build_population(std::vector<Individual>& pop, int count, Rng& rng) {
    // Ramped half-and-half: depths cycle min(2, max)..max, Grow/Full alternate.
    const int lo = std::min(2, config_.max_depth);
    const int ramp = config_.max_depth - lo + 1;
    pop.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int depth = lo + (i / 2) % ramp;
        const GenMethod method = i % 2 == 0 ? GenMethod::Grow : GenMethod::Full;
        Individual ind;
        ind.tree = generate(rng, config_.prims, dataset_.input_size, depth, method);
        // The individual competes under the run-wide bound, not its ramp depth.
        ind.tree = Tree(std::vector<Node>(ind.tree.nodes()), config_.prims,
                        dataset_.input_size, config_.max_depth);
        pop.push_back(std::move(ind));
    }
}

void Engine::evaluate_stale(std::vector<Individual*> stale) {
    if (stale.empty()) return;
    const std::vector<double> scores =
        evaluate_all(stale.size(), config_.n_workers,
                     [&](std::size_t i) { return learner_.fitness(stale[i]->tree, batch_); });
    for (std::size_t i = 0; i < stale.size(); ++i) {
        stale[i]->fitness = scores[i];
        stale[i]->fitness_batch_id = batch_.id;
    }
    evaluations_ += static_cast<std::int64_t>(stale.size());
}

void Engine::ensure_evaluated() {
    std::vector<Individual*> stale;
    for (std::vector<Individual>& pop : populations_) {
        for (Individual& ind : pop) {
            if (!ind.fitness_current(batch_.id)) stale.push_back(&ind);
        }
    }
    evaluate_stale(std::move(stale));
}

void Engine::init() {
    batch_ = config_.online ? batches_.next() : full_train_batch(dataset_);

    // One ramped pool for every dynamics: a given run seed starts from the
    // same individuals whether they are arranged panmictically, on a grid,
    // or across islands (island i takes the i-th block).
    Rng init_rng = rng_stream(config_.run_seed, kStreamInit);
    std::vector<Individual> pool;
    build_population(pool, config_.total_pop(), init_rng);

    if (const auto* ic = std::get_if<IslandConfig>(&config_.dynamics)) {
        populations_.resize(static_cast<std::size_t>(ic->n_islands));
        auto cursor = pool.begin();
        for (int i = 0; i < ic->n_islands; ++i) {
            populations_[static_cast<std::size_t>(i)].assign(
                std::make_move_iterator(cursor),
                std::make_move_iterator(cursor + ic->island_pop));
            cursor += ic->island_pop;
        }
    } else {
        populations_.resize(1);
        populations_[0] = std::move(pool);
    }

    if (const auto* cc = std::get_if<CellularConfig>(&config_.dynamics)) {
        neighborhoods_.resize(populations_[0].size());
        for (std::size_t c = 0; c < populations_[0].size(); ++c) {
            neighborhoods_[c] = toroidal_neighborhood(cc->grid_w, cc->grid_h,
                                                      static_cast<int>(c), cc->neighborhood,
                                                      cc->radius);
        }
    }
    all_indices_.resize(populations_[0].size());
    for (std::size_t i = 0; i < all_indices_.size(); ++i) all_indices_[i] = static_cast<std::int32_t>(i);

    ensure_evaluated();
    update_best_ever();
}

Tree Engine::variation(Rng& rng, const std::vector<Individual>& pop,
                       std::span<const std::int32_t> candidates,
                       std::vector<std::int32_t>* parents) {
    const OperatorSpec& spec = config_.operators[static_cast<std::size_t>(draw_operator(rng, config_.operators))];
    const int p1 = tournament_select(rng, pop, candidates, config_.tournament_size);
    if (parents) parents->push_back(p1);
    switch (spec.op) {
    case VariationOp::SubtreeMutation:
        return subtree_mutation(rng, pop[static_cast<std::size_t>(p1)].tree);
    case VariationOp::ProtectedCrossover: {
        const int p2 = tournament_select(rng, pop, candidates, config_.tournament_size);
        if (parents) parents->push_back(p2);
        return protected_crossover(rng, pop[static_cast<std::size_t>(p1)].tree,
                                   pop[static_cast<std::size_t>(p2)].tree);
    }
    case VariationOp::NumericMutation:
        return numeric_mutation(rng, pop[static_cast<std::size_t>(p1)].tree, config_.numeric_sigma);
    case VariationOp::PointMutationI2:
        return point_mutation_i2(rng, pop[static_cast<std::size_t>(p1)].tree);
    }
    return pop[static_cast<std::size_t>(p1)].tree;
}

int Engine::worst_index(const std::vector<Individual>& pop) const {
    int worst = 0;
    for (int i = 1; i < static_cast<int>(pop.size()); ++i) {
        // strictly-worse ordering mirrors better() with reversed tie-breaks
        if (!better(pop[static_cast<std::size_t>(i)], i, pop[static_cast<std::size_t>(worst)], worst))
            worst = i;
    }
    return worst;
}

void Engine::insertions(std::vector<Individual>& pop, int count, Rng& rng,
                        std::int64_t& evals) {
    std::span<const std::int32_t> candidates(all_indices_.data(), pop.size());
    for (int i = 0; i < count; ++i) {
        Individual offspring;
        offspring.tree = variation(rng, pop, candidates);
        offspring.fitness = learner_.fitness(offspring.tree, batch_);
        offspring.fitness_batch_id = batch_.id;
        ++evals;
        const int worst = worst_index(pop);
        if (!config_.elitism || *offspring.fitness <= *pop[static_cast<std::size_t>(worst)].fitness) {
            pop[static_cast<std::size_t>(worst)] = std::move(offspring);
        }
    }
}

void Engine::step_steady_state() {
    insertions(populations_[0], static_cast<int>(populations_[0].size()), dynamics_rng_,
               evaluations_);
}

void Engine::step_cellular() {
    std::vector<Individual>& pop = populations_[0];
    const std::size_t cells = pop.size();

    // Parents come from the pre-sweep grid for every cell; all offspring are
    // computed first, evaluated in one parallel batch, then committed.
    std::vector<Individual> offspring(cells);
    for (std::size_t c = 0; c < cells; ++c) {
#ifndef NDEBUG
        std::vector<std::int32_t> parents;
        offspring[c].tree = variation(dynamics_rng_, pop, neighborhoods_[c], &parents);
        for (std::int32_t p : parents) {
            assert(std::find(neighborhoods_[c].begin(), neighborhoods_[c].end(), p) !=
                   neighborhoods_[c].end());
        }
#else
        offspring[c].tree = variation(dynamics_rng_, pop, neighborhoods_[c]);
#endif
    }
    const std::vector<double> scores =
        evaluate_all(cells, config_.n_workers,
                     [&](std::size_t i) { return learner_.fitness(offspring[i].tree, batch_); });
    evaluations_ += static_cast<std::int64_t>(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        offspring[c].fitness = scores[c];
        offspring[c].fitness_batch_id = batch_.id;
        if (!config_.elitism || scores[c] <= *pop[c].fitness) {
            pop[c] = std::move(offspring[c]);
        }
    }
}

void Engine::step_islands() {
    const auto& ic = std::get<IslandConfig>(config_.dynamics);
    std::vector<std::int64_t> island_evals(static_cast<std::size_t>(ic.n_islands), 0);
    // One worker slot per island; each island consumes only its own stream,
    // so scheduling order cannot change the outcome.
    parallel_for(static_cast<std::size_t>(ic.n_islands), config_.n_workers, [&](std::size_t i) {
        std::vector<Individual>& pop = populations_[i];
        std::vector<Individual*> stale;
        for (Individual& ind : pop) {
            if (!ind.fitness_current(batch_.id)) stale.push_back(&ind);
        }
        for (Individual* ind : stale) {
            ind->fitness = learner_.fitness(ind->tree, batch_);
            ind->fitness_batch_id = batch_.id;
        }
        island_evals[i] += static_cast<std::int64_t>(stale.size());
        insertions(pop, ic.island_pop, island_rngs_[i], island_evals[i]);
    });
    for (std::int64_t e : island_evals) evaluations_ += e;
}

void Engine::step_generation() {
    if (config_.online) {
        batch_ = batches_.next();
        // Island re-evaluation happens inside each island's worker slot.
        if (!std::holds_alternative<IslandConfig>(config_.dynamics)) ensure_evaluated();
    }

    if (std::holds_alternative<SteadyStateConfig>(config_.dynamics)) {
        step_steady_state();
    } else if (std::holds_alternative<CellularConfig>(config_.dynamics)) {
        step_cellular();
    } else {
        step_islands();
    }
    ++generation_;

    if (const auto* ic = std::get_if<IslandConfig>(&config_.dynamics)) {
        if (ic->migration_interval > 0 && generation_ % ic->migration_interval == 0) {
            migrate_ring(populations_, ic->n_migrants);
        }
    }
    update_best_ever();
}

void Engine::update_best_ever() {
    const Individual* best = nullptr;
    for (const std::vector<Individual>& pop : populations_) {
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (best == nullptr || better(pop[i], static_cast<int>(i), *best, 0)) {
                best = &pop[i];
            }
        }
    }
    // Against a batch change the archive is nominal; on a fixed batch this
    // only ever improves.
    if (!best_ever_.fitness.has_value() || best_ever_.fitness_batch_id != batch_.id ||
        *best->fitness <= *best_ever_.fitness) {
        best_ever_ = *best;
    }
}

const Individual& Engine::current_best() const {
    const Individual* best = nullptr;
    int best_index = 0;
    for (const std::vector<Individual>& pop : populations_) {
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (best == nullptr || better(pop[i], static_cast<int>(i), *best, best_index)) {
                best = &pop[i];
                best_index = static_cast<int>(i);
            }
        }
    }
    return *best;
}

RunLogRow Engine::current_row(double elapsed_s) const {
    double sum = 0.0;
    std::int64_t count = 0;
    for (const std::vector<Individual>& pop : populations_) {
        for (const Individual& ind : pop) {
            sum += *ind.fitness;
            ++count;
        }
    }
    const Individual& best = current_best();
    RunLogRow row;
    row.generation = generation_;
    row.best_train = *best.fitness;
    row.best_test = learner_.test_metric(best.tree, dataset_);
    row.mean_fitness = sum / static_cast<double>(count);
    row.evaluations = evaluations_;
    row.elapsed_s = elapsed_s;
    return row;
}

RunLog run(const EngineConfig& config, const Learner& learner, const Dataset& dataset,
           Tree* best_tree) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    Engine engine(config, learner, dataset);
    engine.init();
    RunLog log;
    log.reserve(static_cast<std::size_t>(config.generations) + 1);
    log.push_back(engine.current_row(elapsed()));
    for (int g = 0; g < config.generations; ++g) {
        engine.step_generation();
        log.push_back(engine.current_row(elapsed()));
    }
    if (best_tree) *best_tree = engine.current_best().tree;
    return log;
}

} // namespace gp
