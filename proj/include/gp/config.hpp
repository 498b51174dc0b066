#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gp/learners.hpp"
#include "gp/population.hpp"

namespace gp {

/// Data source named by an experiment config.
struct DatasetSpec {
    enum class Type { Csv, PatchCsv, Keijzer12, NoisyPatches };
    Type type = Type::Keijzer12;

    // csv / patch_csv
    std::string path;
    std::string label;
    bool standardize = true; // csv only; patch_csv never standardizes

    int train = 0;
    int test = 0;            // csv: implied by rows - train
    std::uint64_t seed = 1;  // split shuffling / synthetic generation

    // keijzer12
    double lo = -3.0;
    double hi = 3.0;

    // noisy_patches
    int patch_side = 9;
    double sigma = 0.1;
};

/// Full run description, loaded from a JSON document (individual_class,
/// lowlevel, ind_params, operations, operations_prob, operations_arity,
/// pop_size, generations, pop_dynamics, online, minimization, n_jobs, ...).
struct ExperimentConfig {
    LearnerKind learner = LearnerKind::RegressorLS;
    std::vector<std::string> lowlevel;
    std::vector<std::string> mezzanine;
    int input_vector_size = 0;
    int max_depth = 6; // ind_params.complexity
    std::vector<OperatorSpec> operators;
    double numeric_sigma = 0.1;

    enum class Dynamics { SteadyState, Cellular, Island };
    Dynamics dynamics = Dynamics::SteadyState;
    CellularConfig cellular;   // when dynamics == Cellular
    IslandConfig islands;      // when dynamics == Island

    int pop_size = 0; // total across islands / grid cells
    int generations = 0;
    bool online = false;
    int batch_size = 0;
    bool minimization = true;
    int tournament_size = 3;
    bool elitism = true;
    int n_jobs = 0; // 0 = hardware default
    std::uint64_t seed = 42;
    int repetitions = 1;
    DatasetSpec dataset;
};

/// Parses and validates a config file. Throws ConfigError with a
/// field-level diagnostic on any problem.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

/// Materializes the config's dataset (loads the CSV or runs the generator)
/// and checks it against input_vector_size.
Dataset build_dataset(const ExperimentConfig& config);

/// Engine configuration for repetition `rep` (run seed = stream rep of the
/// master seed).
EngineConfig engine_config(const ExperimentConfig& config, int rep,
                           std::shared_ptr<const PrimitiveSet> prims);

std::shared_ptr<const PrimitiveSet> make_primitives(const ExperimentConfig& config);

} // namespace gp
