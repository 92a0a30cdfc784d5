#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "linobs/benchmarks.hpp"
#include "linobs/lm.hpp"
#include "linobs/metrics.hpp"
#include "linobs/mlp.hpp"
#include "linobs/pinn.hpp"
#include "linobs/system.hpp"

namespace linobs {

/// Bad command-line usage or an inconsistent run configuration. Exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverKind { PinnGreedy, PinnSingle, Series };

/// Maps "pinn-greedy" / "pinn-single" / "series"; throws UsageError otherwise.
SolverKind parse_solver(const std::string& name);

/// Parses a grid shape such as "15x15" or "20" (replicated per dimension).
std::vector<int> parse_grid(const std::string& text);

/// Parses numbers separated by whitespace and/or commas ("-0.2,-0.2").
/// Throws std::invalid_argument naming the offending token.
std::vector<double> parse_number_list(const std::string& text);

/// One fully resolved problem: the system, the target observer, the training
/// domain, and (when known) closed-form transform components for scoring.
struct Problem {
    std::string id;
    DiscreteSystem system;
    ObserverSpec observer;
    Vec domain_lo;
    Vec domain_hi;
    std::vector<double> schedule;        // nested lower bounds; may be empty
    std::vector<Expr> exact_transform;   // empty when no closed form is known
    std::vector<Expr> exact_inverse;     // empty when no closed form is known

    bool has_oracle() const { return !exact_transform.empty(); }
};

/// Loads a problem definition file (INI-style [system]/[observer]/[domain]
/// sections, optional [schedule] and [oracle]). Throws UsageError with a
/// line-numbered message on malformed input.
Problem problem_from_file(const std::string& path);

Problem problem_from_benchmark(const Benchmark& bm);

/// Options shared by the command entry points; populated from the CLI.
struct RunConfig {
    std::string benchmark;            // built-in problem id
    std::string problem_file;         // or a problem definition file
    std::string solver = "pinn-greedy";
    int order = 6;                    // series truncation order
    std::uint64_t seed = 1;
    int runs = 20;
    int horizon = 150;
    std::string out_dir = "out";
    std::string map_file;             // eval/simulate: stored map, or "analytic"
    std::string grid_train = "15x15";
    std::string grid_test = "20x20";
    int workers = 0;                  // 0: hardware concurrency
    long max_fevals = 0;              // per-stage LM budget override; 0 = default
    std::vector<double> x0;           // simulate: plant start (default 0.1,...)
    std::vector<double> z0;           // simulate: observer start (default zeros)
    std::vector<double> newton_x0;    // simulate: first inversion guess
    double max_seconds = 0;           // reserved; 0 = no budget
};

/// Picks exactly one problem source from cfg. Throws UsageError when both or
/// neither of --benchmark/--problem are given.
Problem resolve_problem(const RunConfig& cfg);

/// Training configuration shared by solve/uq and the test campaigns.
MlpConfig default_mlp_config(int state_dim);
LmOptions default_lm_options();

/// Command entry points. Each writes human-readable progress to `out` and
/// returns the process exit code: 0 ok (or warnings), 2 assumption failure,
/// 3 numerical failure, 4 statistical quality breach. Usage problems throw.
int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_uq(const RunConfig& cfg, std::ostream& out);

/// One training replicate inside a seed-sweep campaign.
struct UqRun {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;                 // failure diagnostic when !ok
    double final_cost = 0;
    std::vector<Norms> component_norms; // vs oracle on the test grid, per output
};

struct UqCampaign {
    std::vector<UqRun> runs;
    int failures = 0;
    // stats[j] summarizes the j-th transform component across successful runs.
    std::vector<ErrorStats> stats;
};

/// Trains `runs` replicates with seeds base_seed..base_seed+runs-1 and scores
/// each against the closed-form transform on a Chebyshev test grid.
UqCampaign run_uq_campaign(const Problem& prob, SolverKind solver,
                           const MlpConfig& mlp_cfg, const LmOptions& lm_opts,
                           int runs, std::uint64_t base_seed, int workers,
                           const std::vector<int>& test_grid,
                           std::ostream* progress = nullptr);

} // namespace linobs
