// Command-line front end: solve / run / sweep / render.
//
// Exit codes: 0 success, 2 invalid config, 3 non-convergence, 4 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alpi/alpi.hpp"

namespace {

nlohmann::json load_config_json(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw alpi::IoError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw alpi::ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

// Flags override top-level config keys; structured pieces stay in the JSON.
struct CommonFlags {
    std::string config_path;
    std::string output_dir;
    std::string backend;
    std::string eval_method;
    double eval_tol = -1.0;
    std::vector<std::uint64_t> seeds;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "experiment config JSON");
        cmd->add_option("-o,--out", output_dir, "output directory (overrides config)");
        cmd->add_option("--backend", backend, "lookahead backend: tree|dp");
        cmd->add_option("--eval", eval_method, "evaluation method: direct|iterative");
        cmd->add_option("--eval-tol", eval_tol, "iterative evaluation tolerance");
        cmd->add_option("--seeds", seeds, "seed list (overrides config)");
    }

    nlohmann::json merged() const {
        nlohmann::json j = load_config_json(config_path);
        if (!output_dir.empty()) j["output_dir"] = output_dir;
        if (!backend.empty()) j["backend"] = backend;
        if (!eval_method.empty() || eval_tol > 0.0) {
            nlohmann::json eval = j.contains("eval") ? j["eval"] : nlohmann::json::object();
            if (!eval_method.empty()) eval["method"] = eval_method;
            if (eval_tol > 0.0) eval["tol"] = eval_tol;
            j["eval"] = eval;
        }
        if (!seeds.empty()) j["seeds"] = seeds;
        return j;
    }
};

int cmd_solve(const CommonFlags& flags, double tol, bool export_mdp, bool export_layout) {
    alpi::ExperimentConfig cfg = alpi::parse_config(flags.merged());
    std::filesystem::create_directories(cfg.output_dir);
    for (std::uint64_t seed : cfg.seeds) {
        alpi::BuiltEnvironment env = alpi::build_environment(cfg.environment, seed);
        alpi::OptimalSolution sol = alpi::solve_optimal(env.mdp, tol);
        double residual =
            alpi::inf_norm_diff(alpi::apply_optimality_operator(env.mdp, sol.value), sol.value);
        nlohmann::json j;
        j["environment"] = env.description;
        j["gamma"] = env.mdp.discount();
        j["v_star"] = sol.value;
        j["policy"] = sol.policy;
        j["residual"] = residual;
        std::string stem = "solution_seed" + std::to_string(seed);
        alpi::write_file_atomic(std::filesystem::path(cfg.output_dir) / (stem + ".json"),
                                j.dump(2) + "\n");
        if (export_mdp)
            alpi::write_file_atomic(std::filesystem::path(cfg.output_dir) /
                                        ("mdp_seed" + std::to_string(seed) + ".json"),
                                    alpi::mdp_to_json(env.mdp).dump(2) + "\n");
        if (export_layout && env.maze)
            alpi::write_file_atomic(std::filesystem::path(cfg.output_dir) /
                                        ("maze_seed" + std::to_string(seed) + ".txt"),
                                    env.maze->render_text());
        std::cout << env.description << ": solved, residual " << residual << "\n";
    }
    return 0;
}

int cmd_run(const CommonFlags& flags) {
    alpi::ExperimentConfig cfg = alpi::parse_config(flags.merged());
    std::vector<alpi::SeedRun> runs = alpi::run_experiment(cfg);
    bool all_ok = true;
    for (const alpi::SeedRun& r : runs) {
        if (!r.ok()) {
            std::cerr << "seed " << r.seed << ": " << r.error << "\n";
            all_ok = false;
        } else if (!r.result.converged) {
            std::cerr << "seed " << r.seed << ": did not converge within the iteration cap\n";
            all_ok = false;
        } else {
            std::cout << "seed " << r.seed << ": " << r.result.iterations << " iterations, "
                      << r.result.total_queries() << " queries\n";
        }
    }
    std::cout << "summary written to " << cfg.output_dir << "/summary.json\n";
    return all_ok ? 0 : 3;
}

int cmd_sweep(const CommonFlags& flags) {
    alpi::ExperimentConfig cfg = alpi::parse_config(flags.merged());
    std::vector<alpi::SweepCellResult> cells = alpi::run_sweep(cfg);
    bool all_ok = true;
    for (const alpi::SweepCellResult& cell : cells) {
        bool ok = cell.summary["all_converged"].get<bool>();
        all_ok = all_ok && ok;
        std::cout << cell.planner << ": mean queries "
                  << cell.summary["mean_total_queries"].get<double>() << (ok ? "" : " [FAILED]")
                  << "\n";
    }
    std::cout << "comparison written to " << cfg.output_dir << "/comparison.csv\n";
    return all_ok ? 0 : 3;
}

int cmd_render(const std::vector<std::string>& inputs, const std::string& output,
               const std::string& kind, bool log_y) {
    if (kind == "trace") {
        std::vector<alpi::svg::Series> series;
        for (const std::string& path : inputs) {
            alpi::CsvTable t = alpi::load_csv(path);
            int xi = t.column("iter"), yi = t.column("dist_inf");
            if (xi < 0 || yi < 0)
                throw alpi::ConfigError("render: " + path + " is not a trace CSV");
            alpi::svg::Series s;
            s.label = std::filesystem::path(path).stem().string();
            for (const auto& row : t.rows) {
                s.x.push_back(std::stod(row[xi]));
                s.y.push_back(std::stod(row[yi]));
            }
            series.push_back(std::move(s));
        }
        alpi::svg::write_line_chart(output, "distance to optimum", "iteration", "dist_inf", series,
                                    log_y);
    } else if (kind == "comparison") {
        if (inputs.size() != 1)
            throw alpi::ConfigError("render: comparison takes exactly one CSV");
        alpi::CsvTable t = alpi::load_csv(inputs[0]);
        int li = t.column("planner"), mi = t.column("mean_total_queries"),
            si = t.column("std_total_queries");
        if (li < 0 || mi < 0)
            throw alpi::ConfigError("render: " + inputs[0] + " is not a comparison CSV");
        std::vector<std::string> labels;
        std::vector<double> values, errors;
        for (const auto& row : t.rows) {
            labels.push_back(row[li]);
            values.push_back(std::stod(row[mi]));
            errors.push_back(si >= 0 ? std::stod(row[si]) : 0.0);
        }
        alpi::svg::write_bar_chart(output, "simulator queries until convergence", "queries", labels,
                                   values, errors);
    } else {
        throw alpi::ConfigError("render: unknown kind '" + kind + "' (trace|comparison)");
    }
    std::cout << "wrote " << output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-lookahead policy iteration toolkit"};
    app.require_subcommand(1);

    CommonFlags solve_flags, run_flags, sweep_flags;
    double solve_tol = 1e-10;
    bool export_mdp = false, export_layout = false;

    CLI::App* solve = app.add_subcommand("solve", "compute the optimal value and policy");
    solve_flags.attach(solve);
    solve->add_option("--tol", solve_tol, "value-iteration tolerance");
    solve->add_flag("--export-mdp", export_mdp, "also write the model in the JSON format");
    solve->add_flag("--export-layout", export_layout, "also write the maze layout as text");

    CLI::App* run = app.add_subcommand("run", "run one planner across seeds");
    run_flags.attach(run);

    CLI::App* sweep = app.add_subcommand("sweep", "run a grid of planners across seeds");
    sweep_flags.attach(sweep);

    CLI::App* render = app.add_subcommand("render", "turn result CSVs into SVG charts");
    std::vector<std::string> render_inputs;
    std::string render_out = "chart.svg", render_kind = "trace";
    bool render_logy = false;
    render->add_option("input", render_inputs, "input CSV file(s)")->required();
    render->add_option("-o,--out", render_out, "output SVG path");
    render->add_option("--kind", render_kind, "trace|comparison");
    render->add_flag("--log-y", render_logy, "logarithmic y axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_flags, solve_tol, export_mdp, export_layout);
        if (run->parsed()) return cmd_run(run_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags);
        if (render->parsed()) return cmd_render(render_inputs, render_out, render_kind, render_logy);
    } catch (const alpi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const alpi::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
