#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alpi/aggregation.hpp"
#include "alpi/analysis.hpp"
#include "alpi/chain.hpp"
#include "alpi/maze.hpp"
#include "alpi/mdp_json.hpp"
#include "alpi/planners.hpp"
#include "alpi/random_mdp.hpp"
#include "alpi/rng.hpp"

namespace alpi {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config schema

struct EnvironmentSpec {
    std::string type = "chain"; // chain | maze | random | file
    int chain_n = 20;
    double chain_gamma = 0.9;
    MazeConfig maze;
    RandomMdpConfig random;
    std::string path;
};

struct VStarSpec {
    std::string type = "exact"; // exact | aggregate | file
    double tol = 1e-10;
    int aggregate_k = 2;
    std::string path;
};

struct PlannerSpec {
    std::string type = "pi"; // pi | hpi | tlpi | qlpi
    int h = 1;               // hpi
    double kappa = 0.0;      // tlpi; 0 means "use kappa_pow"
    int kappa_pow = 0;       // tlpi: kappa = gamma^kappa_pow (exact repeated product)
    double beta = 0.0;       // tlpi raw correction
    double epsilon = -1.0;   // tlpi: when >= 0, beta = epsilon * (kappa + 1)
    std::vector<int> depths; // qlpi deep depths
    std::vector<double> thetas;
    double theta1 = 1.0;
    int order_slack_m = 0;
    VStarSpec vstar;
    std::string label; // optional override for file names / tables
};

struct Pi0Spec {
    std::string type = "constant"; // constant | random
    int action = 0;
};

struct ExperimentConfig {
    EnvironmentSpec environment;
    PlannerSpec planner;
    std::vector<PlannerSpec> sweep; // used by run_sweep; ignored by run_experiment
    std::vector<std::uint64_t> seeds{1};
    LookaheadBackend backend = LookaheadBackend::tree;
    EvalMethod eval_method = EvalMethod::iterative;
    double eval_tol = 1e-10;
    Pi0Spec pi0;
    long max_iters = -1;
    std::string output_dir = "out";
    /// Also emit per-pass contraction histograms (fractions of states per
    /// effective-lookahead bin) plus a pooled variant, one CSV per run.
    bool contraction_histograms = false;
};

namespace detail {

inline LookaheadBackend parse_backend(const std::string& s) {
    if (s == "tree") return LookaheadBackend::tree;
    if (s == "dp") return LookaheadBackend::dp;
    throw ConfigError("config: unknown backend '" + s + "'");
}

inline EvalMethod parse_eval_method(const std::string& s) {
    if (s == "direct") return EvalMethod::direct_solve;
    if (s == "iterative") return EvalMethod::iterative;
    throw ConfigError("config: unknown eval method '" + s + "'");
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

} // namespace detail

inline EnvironmentSpec parse_environment(const nlohmann::json& j) {
    EnvironmentSpec env;
    env.type = detail::get_or<std::string>(j, "type", "chain");
    if (env.type == "chain") {
        env.chain_n = detail::get_or(j, "n", 20);
        env.chain_gamma = detail::get_or(j, "gamma", 0.9);
    } else if (env.type == "maze") {
        env.maze.width = detail::get_or(j, "width", env.maze.width);
        env.maze.height = detail::get_or(j, "height", env.maze.height);
        env.maze.num_goals = detail::get_or(j, "num_goals", env.maze.num_goals);
        env.maze.num_traps = detail::get_or(j, "num_traps", env.maze.num_traps);
        env.maze.gamma = detail::get_or(j, "gamma", env.maze.gamma);
        env.maze.wall_col = detail::get_or(j, "wall_col", env.maze.wall_col);
        env.maze.wall_row = detail::get_or(j, "wall_row", env.maze.wall_row);
    } else if (env.type == "random") {
        env.random.num_states = detail::get_or(j, "num_states", 8);
        env.random.num_actions = detail::get_or(j, "num_actions", 2);
        env.random.gamma = detail::get_or(j, "gamma", 0.9);
        env.random.max_successors = detail::get_or(j, "max_successors", 4);
    } else if (env.type == "file") {
        env.path = detail::get_or<std::string>(j, "path", "");
        if (env.path.empty()) throw ConfigError("config: environment file requires 'path'");
    } else {
        throw ConfigError("config: unknown environment type '" + env.type + "'");
    }
    return env;
}

inline VStarSpec parse_vstar(const nlohmann::json& j) {
    VStarSpec v;
    v.type = detail::get_or<std::string>(j, "type", "exact");
    v.tol = detail::get_or(j, "tol", 1e-10);
    v.aggregate_k = detail::get_or(j, "k", 2);
    v.path = detail::get_or<std::string>(j, "path", "");
    if (v.type != "exact" && v.type != "aggregate" && v.type != "file")
        throw ConfigError("config: unknown vstar source '" + v.type + "'");
    if (v.type == "file" && v.path.empty()) throw ConfigError("config: vstar file requires 'path'");
    return v;
}

inline PlannerSpec parse_planner(const nlohmann::json& j) {
    PlannerSpec p;
    p.type = detail::get_or<std::string>(j, "type", "pi");
    p.label = detail::get_or<std::string>(j, "label", "");
    if (p.type == "hpi") {
        p.h = detail::get_or(j, "h", 1);
    } else if (p.type == "tlpi") {
        p.kappa = detail::get_or(j, "kappa", 0.0);
        p.kappa_pow = detail::get_or(j, "kappa_pow", 0);
        p.beta = detail::get_or(j, "beta", 0.0);
        p.epsilon = detail::get_or(j, "epsilon", -1.0);
        if (p.kappa <= 0.0 && p.kappa_pow < 1)
            throw ConfigError("config: tlpi requires 'kappa' or 'kappa_pow'");
    } else if (p.type == "qlpi") {
        p.depths = detail::get_or(j, "depths", std::vector<int>{});
        p.thetas = detail::get_or(j, "thetas", std::vector<double>{});
        p.theta1 = detail::get_or(j, "theta1", 1.0);
        p.order_slack_m = detail::get_or(j, "m", 0);
        if (p.depths.size() != p.thetas.size())
            throw ConfigError("config: qlpi 'depths' and 'thetas' must have equal length");
    } else if (p.type != "pi") {
        throw ConfigError("config: unknown planner type '" + p.type + "'");
    }
    if (j.contains("vstar")) p.vstar = parse_vstar(j.at("vstar"));
    return p;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("environment")) cfg.environment = parse_environment(j.at("environment"));
    if (j.contains("planner")) cfg.planner = parse_planner(j.at("planner"));
    if (j.contains("sweep")) {
        const auto& sweep = j.at("sweep");
        const auto& list = sweep.is_array() ? sweep : sweep.at("planners");
        for (const auto& p : list) cfg.sweep.push_back(parse_planner(p));
    }
    cfg.seeds = detail::get_or(j, "seeds", std::vector<std::uint64_t>{1});
    if (cfg.seeds.empty()) throw ConfigError("config: 'seeds' must not be empty");
    cfg.backend = detail::parse_backend(detail::get_or<std::string>(j, "backend", "tree"));
    if (j.contains("eval")) {
        cfg.eval_method =
            detail::parse_eval_method(detail::get_or<std::string>(j.at("eval"), "method", "iterative"));
        cfg.eval_tol = detail::get_or(j.at("eval"), "tol", 1e-10);
    }
    if (j.contains("pi0")) {
        cfg.pi0.type = detail::get_or<std::string>(j.at("pi0"), "type", "constant");
        cfg.pi0.action = detail::get_or(j.at("pi0"), "action", 0);
        if (cfg.pi0.type != "constant" && cfg.pi0.type != "random")
            throw ConfigError("config: unknown pi0 type '" + cfg.pi0.type + "'");
    }
    cfg.max_iters = detail::get_or<long>(j, "max_iters", -1);
    cfg.output_dir = detail::get_or<std::string>(j, "output_dir", "out");
    cfg.contraction_histograms = detail::get_or(j, "contraction_histograms", false);
    return cfg;
}

// ---------------------------------------------------------------------------
// Environment construction and per-seed runs

struct BuiltEnvironment {
    TabularMdp mdp;
    std::optional<MazeModel> maze;
    std::string description;
};

inline BuiltEnvironment build_environment(const EnvironmentSpec& env, std::uint64_t seed) {
    if (env.type == "chain") {
        return {build_chain(env.chain_n, env.chain_gamma), std::nullopt,
                "chain(n=" + std::to_string(env.chain_n) + ")"};
    }
    if (env.type == "maze") {
        MazeConfig cfg = env.maze;
        cfg.seed = seed;
        MazeModel model = build_maze(cfg);
        TabularMdp mdp = model.mdp;
        return {std::move(mdp), std::move(model), "maze(seed=" + std::to_string(seed) + ")"};
    }
    if (env.type == "random") {
        RandomMdpConfig cfg = env.random;
        cfg.seed = seed;
        return {random_mdp(cfg), std::nullopt,
                "random(S=" + std::to_string(cfg.num_states) + ",seed=" + std::to_string(seed) + ")"};
    }
    if (env.type == "file") {
        try {
            return {load_mdp(env.path), std::nullopt, "file(" + env.path + ")"};
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    }
    throw ConfigError("config: unknown environment type '" + env.type + "'");
}

inline Policy make_pi0(const TabularMdp& mdp, const Pi0Spec& spec, std::uint64_t seed) {
    Policy pi0(mdp.num_states(), 0);
    if (spec.type == "constant") {
        if (spec.action < 0 || spec.action >= mdp.num_actions())
            throw ConfigError("config: pi0 action out of range");
        std::fill(pi0.begin(), pi0.end(), spec.action);
    } else {
        CounterRng rng = CounterRng(seed).substream(0x9170);
        for (int& a : pi0)
            a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(mdp.num_actions())));
    }
    return pi0;
}

struct PreparedVStar {
    ValueFunction value;
    QueryLedger setup; // simulator queries spent obtaining the approximation
};

/// Resolves a planner's optimal-value input. An aggregate source builds the
/// k x k aggregated model (one query per original state-action row), solves
/// it by value iteration (one query per aggregated state-action pair per
/// sweep), and lifts the result; all of it lands in the setup ledger.
inline PreparedVStar prepare_v_star(const VStarSpec& spec, const BuiltEnvironment& env,
                                    const ExperimentConfig& cfg) {
    (void)cfg;
    PreparedVStar out;
    if (spec.type == "exact") {
        out.value = solve_optimal(env.mdp, spec.tol).value;
        return out;
    }
    if (spec.type == "aggregate") {
        if (!env.maze)
            throw ConfigError("config: aggregate vstar source requires the maze environment");
        AggregationMap map = grid_partition(*env.maze, spec.aggregate_k);
        TabularMdp agg = aggregate_mdp(env.mdp, map);
        out.setup.add_eval(static_cast<std::uint64_t>(env.mdp.num_states()) *
                           static_cast<std::uint64_t>(env.mdp.num_actions()));
        OptimalSolution solved = solve_optimal(agg, spec.tol);
        out.setup.add_eval(static_cast<std::uint64_t>(solved.sweeps) * agg.num_states() *
                           agg.num_actions());
        out.value = lift_value(solved.value, map);
        return out;
    }
    if (spec.type == "file") {
        std::ifstream in(spec.path);
        if (!in) throw IoError("vstar file: cannot open " + spec.path);
        nlohmann::json j;
        in >> j;
        const nlohmann::json& arr = j.is_object() && j.contains("v_star") ? j.at("v_star") : j;
        out.value = arr.get<ValueFunction>();
        return out;
    }
    throw ConfigError("config: unknown vstar source '" + spec.type + "'");
}

/// Stable label used in file names and comparison tables.
inline std::string planner_label(const PlannerSpec& p) {
    if (!p.label.empty()) return p.label;
    if (p.type == "pi") return "pi";
    if (p.type == "hpi") return "hpi" + std::to_string(p.h);
    if (p.type == "tlpi") {
        std::string k = p.kappa_pow >= 1 ? "g" + std::to_string(p.kappa_pow) : num_to_string(p.kappa);
        return "tlpi_" + k;
    }
    std::string label = "qlpi";
    for (std::size_t i = 0; i < p.depths.size(); ++i)
        label += "_h" + std::to_string(p.depths[i]) + "-" + num_to_string(p.thetas[i]);
    if (p.order_slack_m > 0) label += "_m" + std::to_string(p.order_slack_m);
    if (p.vstar.type != "exact") label += "_" + p.vstar.type +
        (p.vstar.type == "aggregate" ? std::to_string(p.vstar.aggregate_k) : "");
    return label;
}

inline PlannerResult run_planner_on(const ExperimentConfig& cfg, const PlannerSpec& spec,
                                    const BuiltEnvironment& env, std::uint64_t seed) {
    PlannerOptions opts;
    opts.backend = cfg.backend;
    opts.eval_method = cfg.eval_method;
    opts.eval_tol = cfg.eval_tol;
    opts.max_iters = cfg.max_iters;
    Policy pi0 = make_pi0(env.mdp, cfg.pi0, seed);

    PlannerResult result;
    if (spec.type == "pi") {
        result = run_pi(env.mdp, pi0, opts);
    } else if (spec.type == "hpi") {
        result = run_h_pi(env.mdp, pi0, spec.h, opts);
    } else if (spec.type == "tlpi") {
        double kappa = spec.kappa;
        if (spec.kappa_pow >= 1) {
            kappa = env.mdp.discount();
            for (int i = 1; i < spec.kappa_pow; ++i) kappa *= env.mdp.discount();
        }
        PreparedVStar vs = prepare_v_star(spec.vstar, env, cfg);
        result = spec.epsilon >= 0.0
                     ? run_tlpi_corrected(env.mdp, pi0, kappa, vs.value, spec.epsilon, opts)
                     : run_tlpi(env.mdp, pi0, kappa, vs.value, spec.beta, opts);
        result.setup_queries = std::move(vs.setup);
    } else if (spec.type == "qlpi") {
        std::vector<std::pair<int, double>> budgets;
        for (std::size_t i = 0; i < spec.depths.size(); ++i)
            budgets.emplace_back(spec.depths[i], spec.thetas[i]);
        QuantileSchedule schedule = QuantileSchedule::with_deep_budgets(budgets);
        schedule.thetas[0] = spec.theta1;
        PreparedVStar vs = prepare_v_star(spec.vstar, env, cfg);
        result = run_qlpi(env.mdp, pi0, schedule, vs.value, spec.order_slack_m, opts);
        result.setup_queries = std::move(vs.setup);
    } else {
        throw ConfigError("config: unknown planner type '" + spec.type + "'");
    }
    result.planner = planner_label(spec);
    return result;
}

// ---------------------------------------------------------------------------
// File output

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open " + tmp.string());
        out << content;
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// Worker-pool size: ALPI_THREADS caps it, hardware concurrency is the default.
inline unsigned pool_size(std::size_t cells) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ALPI_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(cells, 1)));
}

template <typename Fn>
inline void run_pool(std::size_t cells, Fn&& body) {
    const unsigned workers = pool_size(cells);
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& t : pool) t.join();
}

struct SeedRun {
    std::uint64_t seed = 0;
    PlannerResult result;
    std::string error; // empty on success
    bool ok() const { return error.empty(); }
};

inline nlohmann::json summarize_runs(const std::vector<SeedRun>& runs) {
    nlohmann::json per_seed = nlohmann::json::array();
    std::vector<double> queries, iterations;
    bool all_converged = true;
    for (const SeedRun& r : runs) {
        nlohmann::json j;
        j["seed"] = r.seed;
        if (r.ok()) {
            j["converged"] = r.result.converged;
            j["iterations"] = r.result.iterations;
            j["total_queries"] = r.result.total_queries();
            j["final_dist"] = r.result.trace.rows.empty() ? -1.0 : r.result.trace.rows.back().dist_inf;
            j["max_deep_fraction"] = r.result.trace.max_deep_fraction();
            all_converged = all_converged && r.result.converged;
            if (r.result.converged) {
                queries.push_back(static_cast<double>(r.result.total_queries()));
                iterations.push_back(static_cast<double>(r.result.iterations));
            }
        } else {
            j["error"] = r.error;
            all_converged = false;
        }
        per_seed.push_back(std::move(j));
    }
    auto mean = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        return xs.empty() ? 0.0 : m / xs.size();
    };
    auto stdev = [&](const std::vector<double>& xs) {
        if (xs.empty()) return 0.0;
        double m = mean(xs), v = 0.0;
        for (double x : xs) v += (x - m) * (x - m);
        return std::sqrt(v / xs.size());
    };
    nlohmann::json out;
    out["per_seed"] = std::move(per_seed);
    out["all_converged"] = all_converged;
    out["mean_total_queries"] = mean(queries);
    out["std_total_queries"] = stdev(queries);
    out["mean_iterations"] = mean(iterations);
    out["std_iterations"] = stdev(iterations);
    return out;
}

namespace detail {

inline void require_readable(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw IoError(what + ": cannot open " + path);
}

/// Referenced files must exist before any cell starts, and the output
/// directory must be creatable; both are global failures, not per-cell ones.
inline void preflight(const ExperimentConfig& cfg) {
    if (cfg.environment.type == "file") require_readable(cfg.environment.path, "environment");
    auto check_planner = [](const PlannerSpec& p) {
        if (p.vstar.type == "file") require_readable(p.vstar.path, "vstar");
    };
    check_planner(cfg.planner);
    for (const PlannerSpec& p : cfg.sweep) check_planner(p);
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
}

} // namespace detail

/// One planner across all configured seeds; one trace CSV per seed plus a
/// mean/std summary. Returns the per-seed runs for callers that post-process.
inline std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg) {
    detail::preflight(cfg);
    std::vector<SeedRun> runs(cfg.seeds.size());
    run_pool(cfg.seeds.size(), [&](std::size_t i) {
        SeedRun& run = runs[i];
        run.seed = cfg.seeds[i];
        try {
            BuiltEnvironment env = build_environment(cfg.environment, run.seed);
            run.result = run_planner_on(cfg, cfg.planner, env, run.seed);
            write_file_atomic(std::filesystem::path(cfg.output_dir) /
                                  ("trace_" + planner_label(cfg.planner) + "_seed" +
                                   std::to_string(run.seed) + ".csv"),
                              run.result.trace.to_csv());
        } catch (const std::exception& e) {
            run.error = e.what();
        }
    });
    nlohmann::json summary = summarize_runs(runs);
    summary["planner"] = planner_label(cfg.planner);
    summary["environment"] = cfg.environment.type;
    write_file_atomic(std::filesystem::path(cfg.output_dir) / "summary.json", summary.dump(2) + "\n");
    return runs;
}

struct SweepCellResult {
    std::string planner;
    std::vector<SeedRun> runs;
    nlohmann::json summary;
};

/// Cross product of the sweep's planners and the configured seeds. Cells run
/// in the worker pool; a failing cell is recorded and the sweep continues.
/// Emits comparison.csv sorted by mean total queries.
inline std::vector<SweepCellResult> run_sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep.empty()) throw ConfigError("config: sweep requires a 'sweep' planner list");
    detail::preflight(cfg);
    std::vector<SweepCellResult> cells(cfg.sweep.size());
    for (std::size_t p = 0; p < cfg.sweep.size(); ++p) {
        cells[p].planner = planner_label(cfg.sweep[p]);
        cells[p].runs.resize(cfg.seeds.size());
    }
    const std::size_t total = cfg.sweep.size() * cfg.seeds.size();
    run_pool(total, [&](std::size_t cell) {
        const std::size_t p = cell / cfg.seeds.size();
        const std::size_t s = cell % cfg.seeds.size();
        SeedRun& run = cells[p].runs[s];
        run.seed = cfg.seeds[s];
        try {
            BuiltEnvironment env = build_environment(cfg.environment, run.seed);
            run.result = run_planner_on(cfg, cfg.sweep[p], env, run.seed);
            write_file_atomic(std::filesystem::path(cfg.output_dir) /
                                  ("trace_" + cells[p].planner + "_seed" +
                                   std::to_string(run.seed) + ".csv"),
                              run.result.trace.to_csv());
        } catch (const std::exception& e) {
            run.error = e.what();
        }
    });

    nlohmann::json cell_summaries = nlohmann::json::array();
    std::vector<std::pair<double, std::string>> ranking;
    std::string csv = "planner,mean_total_queries,std_total_queries,mean_iterations,converged\n";
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t p = 0; p < cells.size(); ++p) {
        cells[p].summary = summarize_runs(cells[p].runs);
        cells[p].summary["planner"] = cells[p].planner;
        cell_summaries.push_back(cells[p].summary);
        double mean = cells[p].summary["all_converged"].get<bool>()
                          ? cells[p].summary["mean_total_queries"].get<double>()
                          : kInfinity;
        order.emplace_back(mean, p);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [mean, p] : order) {
        const nlohmann::json& s = cells[p].summary;
        csv += cells[p].planner + "," + num_to_string(s["mean_total_queries"].get<double>()) + "," +
               num_to_string(s["std_total_queries"].get<double>()) + "," +
               num_to_string(s["mean_iterations"].get<double>()) + "," +
               (s["all_converged"].get<bool>() ? "1" : "0") + "\n";
    }
    write_file_atomic(std::filesystem::path(cfg.output_dir) / "comparison.csv", csv);
    nlohmann::json summary;
    summary["environment"] = cfg.environment.type;
    summary["cells"] = std::move(cell_summaries);
    write_file_atomic(std::filesystem::path(cfg.output_dir) / "sweep_summary.json",
                      summary.dump(2) + "\n");
    return cells;
}

// ---------------------------------------------------------------------------
// Small CSV reader used by the render subcommand and tests.

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

inline CsvTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

} // namespace alpi
