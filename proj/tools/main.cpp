#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "linobs/cli.hpp"
#include "linobs/expr.hpp"
#include "linobs/linalg.hpp"
#include "linobs/observer.hpp"
#include "linobs/series_solver.hpp"

namespace {

void add_problem_flags(CLI::App* cmd, linobs::RunConfig& cfg) {
    cmd->add_option("--benchmark", cfg.benchmark, "built-in problem id (bench1, bench2)");
    cmd->add_option("--problem", cfg.problem_file, "problem definition file");
}

} // namespace

int main(int argc, char** argv) {
    linobs::RunConfig cfg;
    std::string x0_text, z0_text, newton_x0_text;

    CLI::App app{"designs and runs state observers built on learned coordinate transforms"};
    app.require_subcommand(1);

    CLI::App* check = app.add_subcommand("check", "verify design assumptions for a problem");
    add_problem_flags(check, cfg);

    CLI::App* solve = app.add_subcommand("solve", "compute a coordinate transform");
    add_problem_flags(solve, cfg);
    solve->add_option("--solver", cfg.solver, "pinn-greedy | pinn-single | series");
    solve->add_option("--order", cfg.order, "series truncation order (series solver)");
    solve->add_option("--seed", cfg.seed, "network initialization seed");
    solve->add_option("--max-fevals", cfg.max_fevals, "per-stage evaluation budget override");
    solve->add_option("--out", cfg.out_dir, "output directory");
    solve->add_option("--grid-train", cfg.grid_train, "verification grid, e.g. 15x15");

    CLI::App* eval = app.add_subcommand("eval", "score a stored map against the closed form");
    add_problem_flags(eval, cfg);
    eval->add_option("--map", cfg.map_file, "map JSON path, or 'analytic'");
    eval->add_option("--grid-train", cfg.grid_train, "equispaced grid, e.g. 15x15");
    eval->add_option("--grid-test", cfg.grid_test, "chebyshev grid, e.g. 20x20");
    eval->add_option("--out", cfg.out_dir, "output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "run the observer along a trajectory");
    add_problem_flags(simulate, cfg);
    simulate->add_option("--map", cfg.map_file, "map JSON path, or 'analytic'");
    simulate->add_option("--horizon", cfg.horizon, "number of time steps");
    simulate->add_option("--x0", x0_text, "plant start, e.g. --x0=-0.2,-0.2 (default: domain midpoint)");
    simulate->add_option("--z0", z0_text, "filter start (default: zeros)");
    simulate->add_option("--newton-x0", newton_x0_text, "first inversion guess (default: 0.1,...)");
    simulate->add_option("--out", cfg.out_dir, "output directory");

    CLI::App* uq = app.add_subcommand("uq", "repeat training across seeds and aggregate errors");
    add_problem_flags(uq, cfg);
    uq->add_option("--solver", cfg.solver, "pinn-greedy | pinn-single");
    uq->add_option("--runs", cfg.runs, "number of independent trainings (>= 2)");
    uq->add_option("--seed", cfg.seed, "base seed; run i uses seed + i");
    uq->add_option("--workers", cfg.workers, "concurrent trainings (0: hardware)");
    uq->add_option("--max-fevals", cfg.max_fevals, "per-stage evaluation budget override");
    uq->add_option("--grid-test", cfg.grid_test, "chebyshev scoring grid, e.g. 20x20");
    uq->add_option("--out", cfg.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!x0_text.empty()) cfg.x0 = linobs::parse_number_list(x0_text);
        if (!z0_text.empty()) cfg.z0 = linobs::parse_number_list(z0_text);
        if (!newton_x0_text.empty()) cfg.newton_x0 = linobs::parse_number_list(newton_x0_text);

        if (check->parsed()) return linobs::cmd_check(cfg, std::cout);
        if (solve->parsed()) return linobs::cmd_solve(cfg, std::cout);
        if (eval->parsed()) return linobs::cmd_eval(cfg, std::cout);
        if (simulate->parsed()) return linobs::cmd_simulate(cfg, std::cout);
        if (uq->parsed()) return linobs::cmd_uq(cfg, std::cout);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const linobs::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const linobs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const linobs::NewtonFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const linobs::SeriesResonanceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
