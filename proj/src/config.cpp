#include "gp/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gp/errors.hpp"
#include "gp/scheduler.hpp"

namespace gp {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ConfigError("config field \"" + field + "\": " + what);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key \"" + (where.empty() ? key : where + "." + key) + "\"");
        }
    }
}

template <typename T>
T get_required(const json& obj, const std::string& field) {
    if (!obj.contains(field)) bad(field, "missing");
    try {
        return obj.at(field).get<T>();
    } catch (const json::exception& e) {
        bad(field, e.what());
    }
}

template <typename T>
T get_or(const json& obj, const std::string& field, T fallback) {
    if (!obj.contains(field)) return fallback;
    try {
        return obj.at(field).get<T>();
    } catch (const json::exception& e) {
        bad(field, e.what());
    }
}

DatasetSpec parse_dataset(const json& obj) {
    check_keys(obj, "dataset",
               {"type", "path", "label", "standardize", "train", "test", "seed",
                "lo", "hi", "patch_side", "sigma"});
    DatasetSpec spec;
    const std::string type = get_required<std::string>(obj, "type");
    if (type == "csv") spec.type = DatasetSpec::Type::Csv;
    else if (type == "patch_csv") spec.type = DatasetSpec::Type::PatchCsv;
    else if (type == "keijzer12") spec.type = DatasetSpec::Type::Keijzer12;
    else if (type == "noisy_patches") spec.type = DatasetSpec::Type::NoisyPatches;
    else bad("dataset.type", "must be csv, patch_csv, keijzer12 or noisy_patches");

    spec.train = get_required<int>(obj, "train");
    if (spec.train < 1) bad("dataset.train", "must be >= 1");
    spec.seed = get_or<std::uint64_t>(obj, "seed", 1);

    switch (spec.type) {
    case DatasetSpec::Type::Csv:
    case DatasetSpec::Type::PatchCsv:
        spec.path = get_required<std::string>(obj, "path");
        spec.label = get_required<std::string>(obj, "label");
        spec.standardize = get_or<bool>(obj, "standardize", spec.type == DatasetSpec::Type::Csv);
        break;
    case DatasetSpec::Type::Keijzer12:
        spec.test = get_required<int>(obj, "test");
        spec.lo = get_or<double>(obj, "lo", -3.0);
        spec.hi = get_or<double>(obj, "hi", 3.0);
        if (!(spec.lo < spec.hi)) bad("dataset.lo", "must be < dataset.hi");
        break;
    case DatasetSpec::Type::NoisyPatches:
        spec.test = get_required<int>(obj, "test");
        spec.patch_side = get_required<int>(obj, "patch_side");
        spec.sigma = get_required<double>(obj, "sigma");
        if (spec.patch_side < 1 || spec.patch_side % 2 == 0) bad("dataset.patch_side", "must be odd and >= 1");
        if (spec.sigma < 0.0) bad("dataset.sigma", "must be >= 0");
        break;
    }
    if (spec.type == DatasetSpec::Type::Keijzer12 || spec.type == DatasetSpec::Type::NoisyPatches) {
        if (spec.test < 1) bad("dataset.test", "must be >= 1");
    }
    return spec;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": not valid JSON: " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");

    check_keys(root, "",
               {"individual_class", "lowlevel", "mezzanine", "ind_params", "operations",
                "operations_prob", "operations_arity", "numeric_mutation_sigma",
                "pop_size", "generations", "pop_dynamics", "cellular", "islands",
                "online", "batch_size", "minimization", "tournament_size", "elitism",
                "n_jobs", "seed", "repetitions", "dataset"});

    ExperimentConfig cfg;
    cfg.learner = Learner::kind_from_name(get_required<std::string>(root, "individual_class"));
    cfg.lowlevel = get_required<std::vector<std::string>>(root, "lowlevel");
    cfg.mezzanine = get_or<std::vector<std::string>>(root, "mezzanine", {});

    const json ind = get_required<json>(root, "ind_params");
    check_keys(ind, "ind_params", {"input_vector_size", "complexity"});
    cfg.input_vector_size = get_required<int>(ind, "input_vector_size");
    cfg.max_depth = get_required<int>(ind, "complexity");
    if (cfg.input_vector_size < 1) bad("ind_params.input_vector_size", "must be >= 1");
    if (cfg.max_depth < 1) bad("ind_params.complexity", "must be >= 1");

    const auto names = get_required<std::vector<std::string>>(root, "operations");
    const auto probs = get_required<std::vector<double>>(root, "operations_prob");
    const auto arities = get_required<std::vector<int>>(root, "operations_arity");
    if (names.size() != probs.size() || names.size() != arities.size()) {
        bad("operations", "operations, operations_prob and operations_arity must have equal length");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        OperatorSpec spec;
        spec.op = op_from_name(names[i]);
        spec.probability = probs[i];
        spec.arity = arities[i];
        cfg.operators.push_back(spec);
    }
    validate_operator_list(cfg.operators);
    cfg.numeric_sigma = get_or<double>(root, "numeric_mutation_sigma", 0.1);
    if (cfg.numeric_sigma < 0.0) bad("numeric_mutation_sigma", "must be >= 0");

    cfg.pop_size = get_required<int>(root, "pop_size");
    if (cfg.pop_size < 2) bad("pop_size", "must be >= 2");
    cfg.generations = get_required<int>(root, "generations");
    if (cfg.generations < 0) bad("generations", "must be >= 0");

    const std::string dynamics = get_required<std::string>(root, "pop_dynamics");
    if (dynamics == "Steady_State") {
        cfg.dynamics = ExperimentConfig::Dynamics::SteadyState;
    } else if (dynamics == "Cellular") {
        cfg.dynamics = ExperimentConfig::Dynamics::Cellular;
        const json cell = get_required<json>(root, "cellular");
        check_keys(cell, "cellular", {"grid_w", "grid_h", "neighborhood", "radius"});
        cfg.cellular.grid_w = get_required<int>(cell, "grid_w");
        cfg.cellular.grid_h = get_required<int>(cell, "grid_h");
        const std::string hood = get_or<std::string>(cell, "neighborhood", "VonNeumann");
        if (hood == "VonNeumann") cfg.cellular.neighborhood = Neighborhood::VonNeumann;
        else if (hood == "Moore") cfg.cellular.neighborhood = Neighborhood::Moore;
        else bad("cellular.neighborhood", "must be VonNeumann or Moore");
        cfg.cellular.radius = get_or<int>(cell, "radius", 1);
        if (cfg.cellular.radius < 1) bad("cellular.radius", "must be >= 1");
        if (cfg.cellular.grid_w < 1 || cfg.cellular.grid_h < 1)
            bad("cellular.grid_w", "grid dimensions must be >= 1");
        if (cfg.cellular.grid_w * cfg.cellular.grid_h != cfg.pop_size)
            bad("cellular", "grid_w * grid_h must equal pop_size");
    } else if (dynamics == "Island") {
        cfg.dynamics = ExperimentConfig::Dynamics::Island;
        const json isl = get_required<json>(root, "islands");
        check_keys(isl, "islands", {"n_islands", "migration_interval", "n_migrants", "topology"});
        cfg.islands.n_islands = get_required<int>(isl, "n_islands");
        if (cfg.islands.n_islands < 1) bad("islands.n_islands", "must be >= 1");
        if (cfg.pop_size % cfg.islands.n_islands != 0)
            bad("islands.n_islands", "must divide pop_size");
        cfg.islands.island_pop = cfg.pop_size / cfg.islands.n_islands;
        cfg.islands.migration_interval = get_or<int>(isl, "migration_interval", 10);
        if (cfg.islands.migration_interval < 1) bad("islands.migration_interval", "must be >= 1");
        const int default_migrants = std::max(1, cfg.islands.island_pop / 20);
        cfg.islands.n_migrants = get_or<int>(isl, "n_migrants", default_migrants);
        if (cfg.islands.n_migrants < 0 || cfg.islands.n_migrants >= cfg.islands.island_pop)
            bad("islands.n_migrants", "must be in [0, island population)");
        const std::string topo = get_or<std::string>(isl, "topology", "Ring");
        if (topo != "Ring") bad("islands.topology", "only Ring is supported");
    } else {
        bad("pop_dynamics", "must be Steady_State, Cellular or Island");
    }

    cfg.online = get_required<bool>(root, "online");
    cfg.batch_size = get_or<int>(root, "batch_size", 0);
    if (cfg.online && cfg.batch_size < 1) bad("batch_size", "required (>= 1) when online is true");

    cfg.minimization = get_required<bool>(root, "minimization");
    if (!cfg.minimization) {
        bad("minimization", "all supported individual classes minimize an error; set to true");
    }

    cfg.tournament_size = get_or<int>(root, "tournament_size", 3);
    if (cfg.tournament_size < 2) bad("tournament_size", "must be >= 2");
    if (cfg.tournament_size > cfg.pop_size) bad("tournament_size", "must be <= pop_size");
    cfg.elitism = get_or<bool>(root, "elitism", true);
    cfg.n_jobs = get_or<int>(root, "n_jobs", 0);
    if (cfg.n_jobs < 0) bad("n_jobs", "must be >= 0 (0 = hardware default)");
    cfg.seed = get_or<std::uint64_t>(root, "seed", 42);
    cfg.repetitions = get_or<int>(root, "repetitions", 1);
    if (cfg.repetitions < 1) bad("repetitions", "must be >= 1");

    cfg.dataset = parse_dataset(get_required<json>(root, "dataset"));
    if (cfg.online && cfg.batch_size > cfg.dataset.train)
        bad("batch_size", "exceeds the train split size");

    if (cfg.dynamics == ExperimentConfig::Dynamics::Cellular) {
        const auto hood = toroidal_neighborhood(cfg.cellular.grid_w, cfg.cellular.grid_h, 0,
                                                cfg.cellular.neighborhood, cfg.cellular.radius);
        if (cfg.tournament_size > static_cast<int>(hood.size()))
            bad("tournament_size", "exceeds the cellular neighborhood size of " +
                                       std::to_string(hood.size()));
    }

    // Primitive ids checked now so the diagnostic lands on the config field.
    try {
        PrimitiveSet probe(cfg.lowlevel, cfg.mezzanine);
    } catch (const ConfigError& e) {
        bad("lowlevel/mezzanine", e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str(), path);
    // Dataset paths are relative to the config file, not the working dir.
    if (!cfg.dataset.path.empty() && std::filesystem::path(cfg.dataset.path).is_relative()) {
        cfg.dataset.path =
            (std::filesystem::path(path).parent_path() / cfg.dataset.path).string();
    }
    return cfg;
}

Dataset build_dataset(const ExperimentConfig& config) {
    const DatasetSpec& spec = config.dataset;
    Dataset ds;
    switch (spec.type) {
    case DatasetSpec::Type::Csv:
    case DatasetSpec::Type::PatchCsv: {
        CsvOptions opt;
        opt.label = spec.label;
        opt.train_count = spec.train;
        opt.standardize = spec.standardize;
        opt.seed = spec.seed;
        opt.task = config.learner == LearnerKind::BinaryClassifier ? TaskKind::Classification
                   : config.learner == LearnerKind::Denoiser       ? TaskKind::Denoising
                                                                   : TaskKind::Regression;
        ds = load_csv(spec.path, opt);
        break;
    }
    case DatasetSpec::Type::Keijzer12:
        ds = gen_keijzer12(spec.train, spec.test, spec.seed, spec.lo, spec.hi);
        break;
    case DatasetSpec::Type::NoisyPatches:
        ds = gen_noisy_patches(spec.train, spec.test, spec.patch_side, spec.sigma, spec.seed);
        break;
    }
    if (ds.input_size != config.input_vector_size) {
        throw ConfigError("ind_params.input_vector_size is " +
                          std::to_string(config.input_vector_size) + " but the dataset has " +
                          std::to_string(ds.input_size) + " features");
    }
    return ds;
}

std::shared_ptr<const PrimitiveSet> make_primitives(const ExperimentConfig& config) {
    return std::make_shared<const PrimitiveSet>(config.lowlevel, config.mezzanine);
}

EngineConfig engine_config(const ExperimentConfig& config, int rep,
                           std::shared_ptr<const PrimitiveSet> prims) {
    EngineConfig ec;
    switch (config.dynamics) {
    case ExperimentConfig::Dynamics::SteadyState:
        ec.dynamics = SteadyStateConfig{config.pop_size};
        break;
    case ExperimentConfig::Dynamics::Cellular:
        ec.dynamics = config.cellular;
        break;
    case ExperimentConfig::Dynamics::Island:
        ec.dynamics = config.islands;
        break;
    }
    ec.prims = std::move(prims);
    ec.generations = config.generations;
    ec.tournament_size = config.tournament_size;
    ec.elitism = config.elitism;
    ec.operators = config.operators;
    ec.numeric_sigma = config.numeric_sigma;
    ec.max_depth = config.max_depth;
    ec.online = config.online;
    ec.batch_size = config.batch_size;
    ec.n_workers = config.n_jobs == 0 ? hardware_workers() : config.n_jobs;
    ec.run_seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    return ec;
}

} // namespace gp
