#include "linobs/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "linobs/format.hpp"
#include "linobs/io.hpp"
#include "linobs/observer.hpp"
#include "linobs/parallel.hpp"
#include "linobs/series_solver.hpp"

namespace fs = std::filesystem;

namespace linobs {

namespace {

using nlohmann::json;

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    return s.substr(i);
}

std::string fmt_complex(const std::complex<double>& v) {
    std::string s = fmt_double(v.real());
    if (std::abs(v.imag()) > 1e-13) {
        s += (v.imag() < 0 ? " - " : " + ");
        s += fmt_double(std::abs(v.imag()));
        s += "i";
    }
    return s;
}

/// Controllability matrix [b, a b, ..., a^(n-1) b] for the filter pair.
Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
    const int n = a.rows();
    Matrix c(n, n);
    Vec col(n);
    for (int i = 0; i < n; ++i) col[i] = b(i, 0);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) c(i, k) = col[i];
        if (k + 1 < n) col = a * col;
    }
    return c;
}

GridSpec grid_over(const Problem& prob, GridKind kind, const std::vector<int>& counts) {
    GridSpec spec;
    spec.kind = kind;
    const int n = prob.system.n;
    std::vector<int> c = counts;
    if (static_cast<int>(c.size()) == 1 && n > 1) c.assign(n, c[0]);
    if (static_cast<int>(c.size()) != n)
        throw UsageError("grid has " + std::to_string(c.size()) + " dimensions, problem has " +
                         std::to_string(n));
    for (int i = 0; i < n; ++i) {
        spec.intervals.push_back({prob.domain_lo[i], prob.domain_hi[i]});
        spec.counts.push_back(c[i]);
    }
    return spec;
}

json norms_to_json(const Norms& nm) {
    return json{{"l1", nm.l1}, {"l2", nm.l2}, {"linf", nm.linf}};
}

json percentiles_to_json(const PercentileStats& ps) {
    return json{{"median", ps.median}, {"p5", ps.p5}, {"p95", ps.p95}};
}

void dump_json_file(const std::string& path, const json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

/// Per-component error norms of `map` against the closed-form transform.
std::vector<Norms> score_against_oracle(const TransformMap& map, const Problem& prob,
                                        const std::vector<Vec>& grid) {
    const int n = prob.system.n;
    const std::vector<Vec> fields = error_field(map, ExprTransform(prob.exact_transform), grid);
    std::vector<Norms> out(n);
    for (int j = 0; j < n; ++j) out[j] = norms(fields[j]);
    return out;
}

std::string csv_sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r' || c == '"') c = ' ';
    }
    return s;
}

struct CheckOutcome {
    bool fail = false;
    bool warn = false;
};

CheckOutcome print_check(const Problem& prob, std::ostream& out) {
    CheckOutcome res;
    const DiscreteSystem& sys = prob.system;
    const ObserverSpec& obs = prob.observer;
    const int n = sys.n;

    out << "problem: " << prob.id << "\n";
    out << "state dimension: " << n << "\n";

    const Vec origin(n, 0.0);
    double eq_res = std::abs(eval(sys.h, origin));
    for (const Expr& c : sys.phi) eq_res = std::max(eq_res, std::abs(eval(c, origin)));
    out << "equilibrium: PASS (residual " << fmt_double(eq_res) << ")\n";

    const LinearizationData lin = linearize(sys, obs);

    out << "plant eigenvalues:";
    for (const auto& v : eigenvalues(lin.f)) out << " " << fmt_complex(v);
    out << "\n";
    out << "filter eigenvalues:";
    for (const auto& v : eigenvalues(obs.a)) out << " " << fmt_complex(v);
    out << "\n";

    const auto obsv = check_observability(lin);
    out << "observability: " << (obsv.observable ? "PASS" : "FAIL") << " (rank " << obsv.rank
        << " of " << n << ")\n";
    if (!obsv.observable) res.fail = true;

    const int ctrb_rank = rank(controllability_matrix(obs.a, lin.b));
    out << "controllability: " << (ctrb_rank == n ? "PASS" : "FAIL") << " (rank " << ctrb_rank
        << " of " << n << ")\n";
    if (ctrb_rank != n) res.fail = true;

    const auto issues = observer_issues(obs);
    if (issues.empty()) {
        out << "filter spec: PASS\n";
    } else {
        res.fail = true;
        for (const std::string& msg : issues) out << "filter spec: FAIL (" << msg << ")\n";
    }

    const auto reso = check_resonance(lin, obs);
    switch (reso.status) {
        case ResonanceStatus::Pass:
            out << "resonance: PASS (" << reso.detail << ")\n";
            break;
        case ResonanceStatus::Warning:
            res.warn = true;
            out << "resonance: WARNING (" << reso.detail << ")\n";
            break;
        case ResonanceStatus::Fail:
            res.fail = true;
            out << "resonance: FAIL (" << reso.detail << ")\n";
            break;
    }

    out << "overall: " << (res.fail ? "FAIL" : res.warn ? "WARNING" : "PASS") << "\n";
    return res;
}

/// Section-keyed key/value view of a problem definition file.
struct IniData {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key) > 0;
    }
    std::string get(const std::string& path, const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end())
            throw UsageError(path + ": missing section [" + sec + "]");
        auto k = s->second.find(key);
        if (k == s->second.end())
            throw UsageError(path + ": missing key '" + key + "' in section [" + sec + "]");
        return k->second.first;
    }
};

IniData parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open problem file " + path);
    IniData data;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw UsageError(path + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw UsageError(path + ":" + std::to_string(lineno) + ": empty section name");
            data.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw UsageError(path + ":" + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
        auto [it, fresh] = data.sections[section].emplace(key, std::make_pair(value, lineno));
        if (!fresh)
            throw UsageError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                             "' (first at line " + std::to_string(it->second.second) + ")");
    }
    return data;
}

Expr parse_expr_at(const std::string& path, const IniData& ini, const std::string& sec,
                   const std::string& key, int arity) {
    const std::string text = ini.get(path, sec, key);
    const int line = ini.sections.at(sec).at(key).second;
    try {
        return parse(text, arity);
    } catch (const ParseError& e) {
        throw UsageError(path + ":" + std::to_string(line) + ": in '" + key + "': " + e.what());
    }
}

} // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::string spaced = text;
    for (char& c : spaced)
        if (c == ',') c = ' ';
    std::vector<double> out;
    std::istringstream is(spaced);
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + tok + "'");
        }
        if (used != tok.size()) throw std::invalid_argument("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

SolverKind parse_solver(const std::string& name) {
    if (name == "pinn-greedy") return SolverKind::PinnGreedy;
    if (name == "pinn-single") return SolverKind::PinnSingle;
    if (name == "series") return SolverKind::Series;
    throw UsageError("unknown solver '" + name + "' (expected pinn-greedy, pinn-single, or series)");
}

std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> counts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto x = text.find('x', pos);
        const std::string tok = text.substr(pos, x == std::string::npos ? x : x - pos);
        int v = 0;
        std::size_t used = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw UsageError("bad grid spec '" + text + "' (expected e.g. 15x15)");
        }
        if (used != tok.size() || v < 2)
            throw UsageError("bad grid spec '" + text + "' (counts must be integers >= 2)");
        counts.push_back(v);
        if (x == std::string::npos) break;
        pos = x + 1;
    }
    if (counts.empty()) throw UsageError("empty grid spec");
    return counts;
}

Problem problem_from_benchmark(const Benchmark& bm) {
    Problem prob;
    prob.id = bm.id;
    prob.system = bm.system;
    prob.observer = bm.observer;
    prob.domain_lo = bm.domain_lo;
    prob.domain_hi = bm.domain_hi;
    prob.schedule = bm.greedy_schedule;
    prob.exact_transform = bm.exact_transform;
    prob.exact_inverse = bm.exact_inverse;
    return prob;
}

Problem problem_from_file(const std::string& path) {
    const IniData ini = parse_ini(path);
    Problem prob;
    prob.id = fs::path(path).stem().string();

    int n = 0;
    {
        const std::string ntext = ini.get(path, "system", "n");
        try {
            std::size_t used = 0;
            n = std::stoi(ntext, &used);
            if (used != ntext.size()) throw std::invalid_argument(ntext);
        } catch (const std::exception&) {
            throw UsageError(path + ": [system] n must be an integer, got '" + ntext + "'");
        }
        if (n < 1 || n > 8) throw UsageError(path + ": [system] n out of range [1, 8]");
    }

    std::vector<Expr> phi;
    for (int i = 1; i <= n; ++i)
        phi.push_back(parse_expr_at(path, ini, "system", "phi" + std::to_string(i), n));
    Expr h = parse_expr_at(path, ini, "system", "h", n);

    Vec equilibrium;
    if (ini.has("system", "equilibrium")) {
        try {
            equilibrium = parse_number_list(ini.get(path, "system", "equilibrium"));
        } catch (const std::invalid_argument& e) {
            throw UsageError(path + ": [system] equilibrium: " + e.what());
        }
        if (static_cast<int>(equilibrium.size()) != n)
            throw UsageError(path + ": [system] equilibrium must have n entries");
    }
    try {
        prob.system = DiscreteSystem::create(std::move(phi), std::move(h), std::move(equilibrium));
    } catch (const std::exception& e) {
        throw UsageError(path + ": invalid system: " + e.what());
    }

    {
        const std::string atext = ini.get(path, "observer", "a");
        std::vector<Vec> rows;
        std::size_t pos = 0;
        while (pos <= atext.size()) {
            const auto semi = atext.find(';', pos);
            const std::string row = atext.substr(pos, semi == std::string::npos ? semi : semi - pos);
            try {
                rows.push_back(parse_number_list(row));
            } catch (const std::invalid_argument& e) {
                throw UsageError(path + ": [observer] a: " + e.what());
            }
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        if (static_cast<int>(rows.size()) != n)
            throw UsageError(path + ": [observer] a must have n rows separated by ';'");
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n)
                throw UsageError(path + ": [observer] a row " + std::to_string(i + 1) +
                                 " must have n entries");
            for (int j = 0; j < n; ++j) a(i, j) = rows[i][j];
        }
        prob.observer.a = std::move(a);
    }
    for (int i = 1; i <= n; ++i)
        prob.observer.b.push_back(parse_expr_at(path, ini, "observer", "b" + std::to_string(i), 1));

    try {
        prob.domain_lo = parse_number_list(ini.get(path, "domain", "lo"));
        prob.domain_hi = parse_number_list(ini.get(path, "domain", "hi"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(path + ": [domain]: " + e.what());
    }
    if (static_cast<int>(prob.domain_lo.size()) != n ||
        static_cast<int>(prob.domain_hi.size()) != n)
        throw UsageError(path + ": [domain] lo and hi must each have n entries");
    for (int i = 0; i < n; ++i)
        if (!(prob.domain_lo[i] < prob.domain_hi[i]))
            throw UsageError(path + ": [domain] requires lo < hi componentwise");

    if (ini.has("schedule", "stages")) {
        try {
            prob.schedule = parse_number_list(ini.get(path, "schedule", "stages"));
        } catch (const std::invalid_argument& e) {
            throw UsageError(path + ": [schedule] stages: " + e.what());
        }
        ContinuationSchedule sched{prob.schedule};
        try {
            sched.validate();
        } catch (const std::exception& e) {
            throw UsageError(path + ": [schedule]: " + e.what());
        }
    }

    if (ini.has("oracle", "t1")) {
        for (int i = 1; i <= n; ++i)
            prob.exact_transform.push_back(
                parse_expr_at(path, ini, "oracle", "t" + std::to_string(i), n));
        if (ini.has("oracle", "tinv1"))
            for (int i = 1; i <= n; ++i)
                prob.exact_inverse.push_back(
                    parse_expr_at(path, ini, "oracle", "tinv" + std::to_string(i), n));
    }

    return prob;
}

Problem resolve_problem(const RunConfig& cfg) {
    const bool have_bm = !cfg.benchmark.empty();
    const bool have_file = !cfg.problem_file.empty();
    if (have_bm == have_file)
        throw UsageError("exactly one of --benchmark and --problem is required");
    if (have_bm) {
        try {
            return problem_from_benchmark(get_benchmark(cfg.benchmark));
        } catch (const std::invalid_argument&) {
            std::string known;
            for (const std::string& id : benchmark_ids()) {
                if (!known.empty()) known += ", ";
                known += id;
            }
            throw UsageError("unknown benchmark '" + cfg.benchmark + "' (known: " + known + ")");
        }
    }
    return problem_from_file(cfg.problem_file);
}

MlpConfig default_mlp_config(int state_dim) {
    MlpConfig cfg;
    cfg.input_dim = state_dim;
    cfg.output_dim = state_dim;
    cfg.hidden1 = 5;
    cfg.hidden2 = 5;
    return cfg;
}

LmOptions default_lm_options() { return LmOptions{}; }

int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const Problem prob = resolve_problem(cfg);
    return print_check(prob, out).fail ? 2 : 0;
}

namespace {

TrainResult run_pinn(const Problem& prob, SolverKind kind, const MlpConfig& mcfg,
                     const LmOptions& lm_opts, std::uint64_t seed) {
    if (kind == SolverKind::PinnGreedy) {
        if (prob.schedule.empty())
            throw UsageError("problem '" + prob.id +
                             "' has no continuation schedule; use --solver pinn-single");
        for (double hi : prob.domain_hi)
            if (hi != 0.0)
                throw UsageError("continuation stages are anchored at the origin; "
                                 "this problem's domain is not, use --solver pinn-single");
        ContinuationSchedule sched{prob.schedule};
        return greedy_train(prob.system, prob.observer, sched, mcfg, lm_opts, seed);
    }
    const CollocationSet colloc =
        make_collocation(prob.domain_lo, prob.domain_hi, kCollocationPerDim);
    const LinearizationData lin = linearize(prob.system, prob.observer);
    const PhaseTarget phase = make_phase_target(lin, prob.observer.a);
    Vec p0 = mlp_init_glorot(mcfg, seed);
    TrainResult res = train(prob.system, prob.observer, mcfg, colloc, phase, std::move(p0), lm_opts);
    res.map.seed = seed;
    return res;
}

void write_stage_csv(const std::string& path, const std::vector<StageReport>& stages) {
    std::ostringstream os;
    os << "stage,lower_bound,final_cost,mean_square_residual,iterations,fevals,reason\n";
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const StageReport& s = stages[i];
        os << (i + 1) << "," << fmt_double(s.lower_bound) << "," << fmt_double(s.final_cost) << ","
           << fmt_double(s.mean_square_residual) << "," << s.iterations << "," << s.fevals << ","
           << to_string(s.reason) << "\n";
    }
    write_text_file(path, os.str());
}

VerifyReport verify_and_save(const TransformMap& map, const Problem& prob,
                             const std::vector<int>& counts, const std::string& path) {
    const GridSpec spec = grid_over(prob, GridKind::Equispaced, counts);
    const VerifyReport rep = verify_transform(map, prob.system, prob.observer, make_grid(spec));
    json doc{{"grid", spec.counts},
             {"max_residual", rep.max_residual},
             {"origin_norm", rep.origin_norm}};
    dump_json_file(path, doc);
    return rep;
}

} // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Problem prob = resolve_problem(cfg);
    const SolverKind kind = parse_solver(cfg.solver);

    {
        std::ostringstream check_out;
        if (print_check(prob, check_out).fail) {
            out << check_out.str();
            out << "assumption check FAILED; not solving\n";
            return 2;
        }
    }

    fs::create_directories(cfg.out_dir);
    const std::string map_path = (fs::path(cfg.out_dir) / "map.json").string();
    const std::string verify_path = (fs::path(cfg.out_dir) / "verify.json").string();
    const std::vector<int> train_counts = parse_grid(cfg.grid_train);

    if (kind == SolverKind::Series) {
        if (cfg.order < 1) throw UsageError("--order must be >= 1");
        out << "solving order-" << cfg.order << " series for " << prob.id << "\n";
        const PolyMap pm = solve_series(prob.system, prob.observer, cfg.order);
        save_poly_map(map_path, pm);
        const PolyTransform tmap(pm);
        const VerifyReport rep = verify_and_save(tmap, prob, train_counts, verify_path);
        out << "map: " << map_path << "\n";
        out << "verification: max equation residual " << fmt_double(rep.max_residual)
            << ", origin norm " << fmt_double(rep.origin_norm) << "\n";
        return 0;
    }

    const MlpConfig mcfg = default_mlp_config(prob.system.n);
    LmOptions lm_opts = default_lm_options();
    if (cfg.max_fevals > 0) lm_opts.max_fevals = cfg.max_fevals;
    out << "training " << cfg.solver << " on " << prob.id << " (seed " << cfg.seed << ")\n";
    TrainResult res = run_pinn(prob, kind, mcfg, lm_opts, cfg.seed);
    res.map.source = prob.id;

    for (std::size_t i = 0; i < res.stages.size(); ++i) {
        const StageReport& s = res.stages[i];
        out << "stage " << (i + 1) << "/" << res.stages.size() << " lb=" << fmt_double(s.lower_bound)
            << " cost=" << fmt_double(s.final_cost) << " msr=" << fmt_double(s.mean_square_residual)
            << " iters=" << s.iterations << " reason=" << to_string(s.reason) << "\n";
    }

    save_trained_map(map_path, res.map);
    write_stage_csv((fs::path(cfg.out_dir) / "stages.csv").string(), res.stages);
    const VerifyReport rep = verify_and_save(res.map, prob, train_counts, verify_path);
    out << "map: " << map_path << "\n";
    out << "verification: max equation residual " << fmt_double(rep.max_residual)
        << ", origin norm " << fmt_double(rep.origin_norm) << "\n";
    return 0;
}

namespace {

std::unique_ptr<TransformMap> load_map_for(const Problem& prob, const std::string& map_file) {
    if (map_file.empty()) throw UsageError("--map is required (path or 'analytic')");
    if (map_file == "analytic") {
        if (!prob.has_oracle())
            throw UsageError("problem '" + prob.id + "' has no closed-form transform");
        return std::make_unique<ExprTransform>(prob.exact_transform);
    }
    std::unique_ptr<TransformMap> map = load_transform(map_file);
    if (map->input_dim() != prob.system.n || map->output_dim() != prob.system.n)
        throw UsageError("map " + map_file + " is " + std::to_string(map->input_dim()) + "->" +
                         std::to_string(map->output_dim()) + ", problem needs " +
                         std::to_string(prob.system.n) + "->" + std::to_string(prob.system.n));
    return map;
}

} // namespace

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const Problem prob = resolve_problem(cfg);
    if (!prob.has_oracle())
        throw UsageError("eval scores against a closed-form transform; problem '" + prob.id +
                         "' does not declare one");
    const std::unique_ptr<TransformMap> map = load_map_for(prob, cfg.map_file);
    const int n = prob.system.n;
    const ExprTransform oracle(prob.exact_transform);

    fs::create_directories(cfg.out_dir);
    json norms_doc;
    const struct {
        const char* name;
        GridKind kind;
        const std::string* counts;
    } passes[] = {
        {"train", GridKind::Equispaced, &cfg.grid_train},
        {"test", GridKind::ChebyshevLobatto, &cfg.grid_test},
    };
    for (const auto& pass : passes) {
        const GridSpec spec = grid_over(prob, pass.kind, parse_grid(*pass.counts));
        const std::vector<Vec> grid = make_grid(spec);
        const std::vector<Vec> fields = error_field(*map, oracle, grid);
        std::vector<Vec> rows(grid.size(), Vec(n));
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (int j = 0; j < n; ++j) rows[i][j] = fields[j][i];
        std::ostringstream csv;
        write_error_field_csv(csv, grid, rows);
        write_text_file((fs::path(cfg.out_dir) / ("field_" + std::string(pass.name) + ".csv")).string(),
                        csv.str());
        json per_component;
        for (int j = 0; j < n; ++j) {
            const Norms nm = norms(fields[j]);
            per_component["T" + std::to_string(j + 1)] = norms_to_json(nm);
            out << pass.name << " T" << (j + 1) << ": L1 " << fmt_double(nm.l1) << "  L2 "
                << fmt_double(nm.l2) << "  Linf " << fmt_double(nm.linf) << "\n";
        }
        norms_doc[pass.name] = std::move(per_component);
    }
    const std::string norms_path = (fs::path(cfg.out_dir) / "norms.json").string();
    dump_json_file(norms_path, norms_doc);
    out << "norms: " << norms_path << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Problem prob = resolve_problem(cfg);
    const std::unique_ptr<TransformMap> map = load_map_for(prob, cfg.map_file);
    const int n = prob.system.n;

    Vec x0 = cfg.x0;
    if (x0.empty()) {
        x0.resize(n);
        for (int i = 0; i < n; ++i) x0[i] = 0.5 * (prob.domain_lo[i] + prob.domain_hi[i]);
    } else if (static_cast<int>(x0.size()) != n) {
        throw UsageError("--x0 must have " + std::to_string(n) + " entries");
    } else {
        for (int i = 0; i < n; ++i)
            if (x0[i] < prob.domain_lo[i] || x0[i] > prob.domain_hi[i]) {
                out << "note: x0 lies outside the training domain\n";
                break;
            }
    }
    Vec z0 = cfg.z0;
    if (z0.empty()) z0.assign(n, 0.0);
    else if (static_cast<int>(z0.size()) != n)
        throw UsageError("--z0 must have " + std::to_string(n) + " entries");
    Vec guess = cfg.newton_x0;
    if (guess.empty()) guess.assign(n, 0.1);
    else if (static_cast<int>(guess.size()) != n)
        throw UsageError("--newton-x0 must have " + std::to_string(n) + " entries");

    if (cfg.horizon < 0) throw UsageError("--horizon must be >= 0");

    const Trajectory traj =
        simulate(prob.system, prob.observer, *map, x0, z0, cfg.horizon, NewtonOptions{}, guess);

    fs::create_directories(cfg.out_dir);
    const std::string traj_path = (fs::path(cfg.out_dir) / "trajectory.csv").string();
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(traj_path, csv.str());
    out << "trajectory: " << traj_path << " (" << traj.size() << " steps)\n";
    if (traj.size() > 0)
        out << "final |e_x|_inf = " << fmt_double(inf_norm(traj.ex.back())) << "\n";
    else
        out << "final |e_x|_inf = n/a (horizon 0)\n";
    return 0;
}

UqCampaign run_uq_campaign(const Problem& prob, SolverKind solver, const MlpConfig& mlp_cfg,
                           const LmOptions& lm_opts, int runs, std::uint64_t base_seed, int workers,
                           const std::vector<int>& test_grid, std::ostream* progress) {
    if (runs < 2) throw UsageError("a campaign needs at least 2 runs");
    if (solver == SolverKind::Series)
        throw UsageError("campaigns sweep training seeds; the series solver is deterministic");
    if (!prob.has_oracle())
        throw UsageError("campaigns score against a closed-form transform; problem '" + prob.id +
                         "' does not declare one");
    if (solver == SolverKind::PinnGreedy && prob.schedule.empty())
        throw UsageError("problem '" + prob.id +
                         "' has no continuation schedule; use --solver pinn-single");

    const GridSpec spec = grid_over(prob, GridKind::ChebyshevLobatto, test_grid);
    const std::vector<Vec> grid = make_grid(spec);

    UqCampaign camp;
    camp.runs.resize(runs);
    if (workers <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        workers = hc > 0 ? static_cast<int>(hc) : 1;
    }

    std::mutex progress_mutex;
    parallel_for(runs, workers, [&](int i) {
        UqRun& run = camp.runs[i];
        run.seed = base_seed + static_cast<std::uint64_t>(i);
        try {
            const TrainResult res = run_pinn(prob, solver, mlp_cfg, lm_opts, run.seed);
            run.final_cost = res.stages.empty() ? 0.0 : res.stages.back().final_cost;
            run.component_norms = score_against_oracle(res.map, prob, grid);
            run.ok = true;
        } catch (const std::exception& e) {
            run.ok = false;
            run.error = e.what();
        }
        if (progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            *progress << "run " << (i + 1) << "/" << runs << " seed=" << run.seed;
            if (run.ok) {
                *progress << " linf=";
                for (std::size_t j = 0; j < run.component_norms.size(); ++j)
                    *progress << (j ? "," : "") << fmt_double(run.component_norms[j].linf);
            } else {
                *progress << " FAILED: " << run.error;
            }
            *progress << "\n" << std::flush;
        }
    });

    const int n = prob.system.n;
    std::vector<std::vector<Norms>> per_component(n);
    for (const UqRun& run : camp.runs) {
        if (!run.ok) {
            ++camp.failures;
            continue;
        }
        for (int j = 0; j < n; ++j) per_component[j].push_back(run.component_norms[j]);
    }
    if (!per_component[0].empty() && per_component[0].size() >= 2)
        for (int j = 0; j < n; ++j) camp.stats.push_back(aggregate_norms(per_component[j]));
    return camp;
}

int cmd_uq(const RunConfig& cfg, std::ostream& out) {
    const Problem prob = resolve_problem(cfg);
    const SolverKind kind = parse_solver(cfg.solver);
    if (cfg.runs < 2) throw UsageError("--runs must be >= 2");

    const MlpConfig mcfg = default_mlp_config(prob.system.n);
    LmOptions lm_opts = default_lm_options();
    if (cfg.max_fevals > 0) lm_opts.max_fevals = cfg.max_fevals;
    out << "campaign: " << cfg.runs << " runs of " << cfg.solver << " on " << prob.id
        << " (seeds " << cfg.seed << ".." << (cfg.seed + static_cast<std::uint64_t>(cfg.runs) - 1)
        << ")\n";
    const UqCampaign camp = run_uq_campaign(prob, kind, mcfg, lm_opts, cfg.runs, cfg.seed,
                                            cfg.workers, parse_grid(cfg.grid_test), &out);

    fs::create_directories(cfg.out_dir);
    const int n = prob.system.n;
    {
        std::ostringstream os;
        os << "run,seed,status,final_cost";
        for (int j = 1; j <= n; ++j)
            os << ",l1_T" << j << ",l2_T" << j << ",linf_T" << j;
        os << ",error\n";
        for (std::size_t i = 0; i < camp.runs.size(); ++i) {
            const UqRun& run = camp.runs[i];
            os << (i + 1) << "," << run.seed << "," << (run.ok ? "ok" : "failed") << ",";
            if (run.ok) {
                os << fmt_double(run.final_cost);
                for (int j = 0; j < n; ++j)
                    os << "," << fmt_double(run.component_norms[j].l1) << ","
                       << fmt_double(run.component_norms[j].l2) << ","
                       << fmt_double(run.component_norms[j].linf);
                os << ",";
            } else {
                for (int j = 0; j < 3 * n; ++j) os << ",";
                os << "," << csv_sanitize(run.error);
            }
            os << "\n";
        }
        write_text_file((fs::path(cfg.out_dir) / "runs.csv").string(), os.str());
    }

    json doc;
    doc["runs"] = static_cast<int>(camp.runs.size());
    doc["failures"] = camp.failures;
    doc["test_grid"] = parse_grid(cfg.grid_test);
    if (!camp.stats.empty()) {
        json stats;
        for (int j = 0; j < n; ++j) {
            const ErrorStats& es = camp.stats[j];
            stats["T" + std::to_string(j + 1)] = json{{"runs", es.runs},
                                                      {"l1", percentiles_to_json(es.l1)},
                                                      {"l2", percentiles_to_json(es.l2)},
                                                      {"linf", percentiles_to_json(es.linf)}};
        }
        doc["stats"] = std::move(stats);
    }
    const std::string stats_path = (fs::path(cfg.out_dir) / "stats.json").string();
    dump_json_file(stats_path, doc);

    out << "failures: " << camp.failures << "/" << camp.runs.size() << "\n";
    for (int j = 0; j < static_cast<int>(camp.stats.size()); ++j) {
        const ErrorStats& es = camp.stats[j];
        out << "T" << (j + 1) << " Linf: median " << fmt_double(es.linf.median) << " (p5 "
            << fmt_double(es.linf.p5) << ", p95 " << fmt_double(es.linf.p95) << ")\n";
    }
    out << "stats: " << stats_path << "\n";

    if (5 * camp.failures > static_cast<int>(camp.runs.size())) {
        out << "failure rate above 20%\n";
        return 4;
    }
    return 0;
}

} // namespace linobs
