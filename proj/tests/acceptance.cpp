// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits 0 only if every selected criterion passes. Criteria
// numbers may be passed as arguments to run a subset, e.g. `acceptance 1 4 8`.
//
// Thresholds are fixed here, in code. The stochastic training criteria (6, 7,
// 10) share one seed-sweep campaign and a per-stage evaluation budget chosen
// so the whole suite stays desk-sized; on a multi-core machine the campaign
// runs its replicates concurrently.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "linobs/benchmarks.hpp"
#include "linobs/cli.hpp"
#include "linobs/linalg.hpp"
#include "linobs/lm.hpp"
#include "linobs/metrics.hpp"
#include "linobs/observer.hpp"
#include "linobs/pinn.hpp"
#include "linobs/series_solver.hpp"
#include "linobs/system.hpp"
#include "linobs/transform_map.hpp"

namespace {

using namespace linobs;

// Per-stage LM evaluation budget for the training campaigns. Chosen as the
// smallest power-of-ten-ish budget at which the greedy median clears the
// quality bar with margin; the full production default (500000) gives the
// same medians but multiplies the suite runtime several-fold.
constexpr long kCampaignFevals = 200000;
constexpr std::uint64_t kCampaignBaseSeed = 1;
constexpr std::uint64_t kObserverDemoSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---- shared expensive artifacts, built once ----

const PolyMap& series6(const std::string& id) {
    static std::map<std::string, PolyMap> cache;
    auto it = cache.find(id);
    if (it == cache.end()) {
        const Benchmark& bm = get_benchmark(id);
        it = cache.emplace(id, solve_series(bm.system, bm.observer, 6)).first;
    }
    return it->second;
}

LmOptions campaign_lm_options() {
    LmOptions opts = default_lm_options();
    opts.max_fevals = kCampaignFevals;
    return opts;
}

// 40 greedy replicates when criterion 7 is in the selected set, 20 otherwise.
// Seeds are base..base+runs-1, so the first 20 runs of the 40-run campaign
// are exactly the 20-run campaign.
int g_greedy_runs_needed = 20;

const UqCampaign& greedy_campaign() {
    static UqCampaign campaign;
    static bool built = false;
    if (!built) {
        const Problem prob = problem_from_benchmark(get_benchmark("bench1"));
        campaign = run_uq_campaign(prob, SolverKind::PinnGreedy, default_mlp_config(prob.system.n),
                                   campaign_lm_options(), g_greedy_runs_needed, kCampaignBaseSeed,
                                   0, {20, 20});
        built = true;
    }
    return campaign;
}

const UqCampaign& single_campaign() {
    static UqCampaign campaign;
    static bool built = false;
    if (!built) {
        const Problem prob = problem_from_benchmark(get_benchmark("bench1"));
        campaign = run_uq_campaign(prob, SolverKind::PinnSingle, default_mlp_config(prob.system.n),
                                   campaign_lm_options(), 20, kCampaignBaseSeed, 0, {20, 20});
        built = true;
    }
    return campaign;
}

// Median of one component's error norm over the first `count` successful runs.
double campaign_median(const UqCampaign& c, int count, int component,
                       double Norms::*norm) {
    std::vector<double> vals;
    const int limit = std::min<int>(count, static_cast<int>(c.runs.size()));
    for (int i = 0; i < limit; ++i)
        if (c.runs[i].ok) vals.push_back(c.runs[i].component_norms[component].*norm);
    return percentile(std::move(vals), 0.5);
}

// ---- criteria ----

// Jacobian anchor: the first-order matrix equation solved at the origin must
// reproduce the known anchors for both example problems, fast.
Outcome criterion1() {
    struct Case {
        const char* id;
        Matrix expected;
    };
    const Case cases[] = {
        {"bench1", Matrix::from_rows({{1.0, 1.0}, {0.0, 1.0}})},
        {"bench2", Matrix::from_rows({{1.0, 0.9}, {2.5, 2.5}})},
    };
    double max_err = 0.0;
    double worst_us = 0.0;
    for (const Case& c : cases) {
        const Benchmark& bm = get_benchmark(c.id);
        const LinearizationData lin = linearize(bm.system, bm.observer);
        const Matrix rhs = lin.b * lin.h;
        Matrix j;
        double best_us = 1e18;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            j = sylvester_solve(lin.f, bm.observer.a, rhs);
            const auto t1 = std::chrono::steady_clock::now();
            best_us = std::min(best_us, std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        worst_us = std::max(worst_us, best_us);
        for (int r = 0; r < 2; ++r)
            for (int col = 0; col < 2; ++col)
                max_err = std::max(max_err, std::abs(j(r, col) - c.expected(r, col)));
    }
    Outcome out;
    out.pass = max_err <= 1e-8 && worst_us < 1000.0;
    out.detail = "anchor error " + fmt(max_err) + " (tol 1e-8), solve time " + fmt(worst_us) +
                 " us (limit 1000)";
    return out;
}

// Spectra of the plant and filter linearizations against the four reference
// values. The fourth reference, 0.0515, is inconsistent with its own matrix:
// [[0.5,0.3],[0.5,0.4]] has trace 0.9 and determinant 0.05, so its smaller
// eigenvalue is (0.9 - sqrt(0.61))/2 = 0.0594875..., which misses 0.0515 by
// 8e-3. The check still pins the reference value; expect one red entry.
Outcome criterion2() {
    const Benchmark& bm = get_benchmark("bench1");
    const LinearizationData lin = linearize(bm.system, bm.observer);
    const auto lf = eigenvalues(lin.f);
    const auto la = eigenvalues(bm.observer.a);
    const double actual[4] = {lf[0].real(), lf[1].real(), la[0].real(), la[1].real()};
    const double expected[4] = {0.7702, 0.1298, 0.8405, 0.0515};
    double max_err = 0.0;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        const double err = std::abs(actual[i] - expected[i]);
        max_err = std::max(max_err, err);
        if (!detail.empty()) detail += ", ";
        detail += fmt(actual[i]) + std::string(" vs ") + fmt(expected[i]);
    }
    Outcome out;
    out.pass = max_err <= 1e-3;
    out.detail = detail + "; max deviation " + fmt(max_err) + " (tol 1e-3)";
    return out;
}

// The closed-form transforms satisfy the defining equations on the training
// grids to round-off.
Outcome criterion3() {
    double worst = 0.0;
    for (const char* id : {"bench1", "bench2"}) {
        const Benchmark& bm = get_benchmark(id);
        const ExprTransform tmap(bm.exact_transform);
        const CollocationSet grid = make_collocation(bm.domain_lo, bm.domain_hi, 15);
        const VerifyReport rep = verify_transform(tmap, bm.system, bm.observer, grid.points);
        worst = std::max({worst, rep.max_residual, rep.origin_norm});
    }
    Outcome out;
    out.pass = worst <= 1e-12;
    out.detail = "max equation defect " + fmt(worst) + " (tol 1e-12)";
    return out;
}

// Order-6 coefficients against the Taylor expansion of the closed forms, plus
// the exact-zero column: the second output of bench1 is linear, so all its
// degree>=2 coefficients must vanish.
Outcome criterion4() {
    double max_err = 0.0;
    double max_nonlinear = 0.0;
    for (const char* id : {"bench1", "bench2"}) {
        const Benchmark& bm = get_benchmark(id);
        const PolyMap& pm = series6(id);
        const Vec center(bm.system.n, 0.0);
        for (std::size_t i = 0; i < pm.components.size(); ++i) {
            const TruncatedSeries ref = series_eval(bm.exact_transform[i], center, 6);
            const auto got = pm.components[i].coeffs();
            const auto want = ref.coeffs();
            for (std::size_t m = 0; m < got.size(); ++m)
                max_err = std::max(max_err, std::abs(got[m] - want[m]));
        }
        if (bm.id == "bench1") {
            const TruncatedSeries& t2 = pm.components[1];
            const SeriesLayout& layout = t2.layout();
            for (int m = 0; m < layout.size(); ++m)
                if (layout.degree(m) >= 2)
                    max_nonlinear = std::max(max_nonlinear, std::abs(t2.coeffs()[m]));
        }
    }
    Outcome out;
    out.pass = max_err <= 1e-8 && max_nonlinear <= 1e-10;
    out.detail = "coefficient error " + fmt(max_err) + " (tol 1e-8), linear-output residue " +
                 fmt(max_nonlinear) + " (tol 1e-10)";
    return out;
}

// Error magnitude of the truncated series on the scoring grids. The wide
// brackets absorb grid and pipeline variation around the reference magnitudes.
Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    Norms n1, n2;
    for (const char* id : {"bench1", "bench2"}) {
        const Benchmark& bm = get_benchmark(id);
        const PolyMap& pm = series6(id);
        GridSpec spec;
        spec.kind = GridKind::ChebyshevLobatto;
        for (int d = 0; d < bm.system.n; ++d) {
            spec.intervals.push_back({bm.domain_lo[d], bm.domain_hi[d]});
            spec.counts.push_back(20);
        }
        Vec field;
        for (const Vec& x : make_grid(spec))
            field.push_back(eval_polymap(pm, x)[0] - eval(bm.exact_transform[0], x));
        (bm.id == "bench1" ? n1 : n2) = norms(field);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = n1.linf >= 1.0 && n1.linf <= 6.0 && n1.l1 >= 30.0 && n1.l1 <= 140.0 &&
               n2.linf >= 5.0 && n2.linf <= 40.0 && secs < 60.0;
    out.detail = "bench1 Linf " + fmt(n1.linf) + " in [1,6], L1 " + fmt(n1.l1) +
                 " in [30,140]; bench2 Linf " + fmt(n2.linf) + " in [5,40]; " + fmt(secs) + " s";
    return out;
}

// Campaign quality: greedy median beats the bar and beats single-domain
// training by at least 5x.
Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    const UqCampaign& greedy = greedy_campaign();
    const UqCampaign& single = single_campaign();
    const double g_med = campaign_median(greedy, 20, 0, &Norms::linf);
    const double s_med = campaign_median(single, 20, 0, &Norms::linf);
    const double mins =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    Outcome out;
    out.pass = greedy.failures == 0 && single.failures == 0 && g_med <= 0.6 &&
               g_med * 5.0 <= s_med;
    out.detail = "greedy median Linf " + fmt(g_med) + " (bar 0.6), single-domain median " +
                 fmt(s_med) + " (ratio " + fmt(s_med / g_med) + ", need >= 5); " +
                 std::to_string(greedy.failures + single.failures) + " failures; " + fmt(mins) +
                 " min";
    return out;
}

// Median stability: the first-20 medians agree with the 40-run medians for
// every component and every norm.
Outcome criterion7() {
    const UqCampaign& c = greedy_campaign();
    Outcome out;
    if (static_cast<int>(c.runs.size()) < 40) {
        out.detail = "campaign holds fewer than 40 runs";
        return out;
    }
    double worst = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        for (double Norms::*norm : {&Norms::l1, &Norms::l2, &Norms::linf}) {
            const double m20 = campaign_median(c, 20, comp, norm);
            const double m40 = campaign_median(c, 40, comp, norm);
            worst = std::max(worst, std::abs(m20 - m40) / m40);
        }
    }
    out.pass = worst <= 0.5;
    out.detail = "max relative median shift 20-vs-40 runs " + fmt(worst) + " (tol 0.5)";
    return out;
}

// Newton round trips on the closed-form maps, plus the reference 5-iteration
// inversion of z=0 from (0.1, 0.1).
Outcome criterion8() {
    int worst_iters = 0;
    double worst_err = 0.0;
    std::mt19937_64 rng(2026);
    NewtonOptions tight;
    tight.abs_tol = 1e-9;
    tight.rel_tol = 1e-9;
    for (const char* id : {"bench1", "bench2"}) {
        const Benchmark& bm = get_benchmark(id);
        const ExprTransform tmap(bm.exact_transform);
        for (int trial = 0; trial < 100; ++trial) {
            Vec x(bm.system.n);
            for (int d = 0; d < bm.system.n; ++d) {
                std::uniform_real_distribution<double> u(bm.domain_lo[d], bm.domain_hi[d]);
                x[d] = u(rng);
            }
            const Vec z = tmap.eval(x);
            Vec warm(x);
            for (double& v : warm) v *= 0.9;
            int iters = 0;
            const Vec back = newton_invert(tmap, z, warm, tight, &iters);
            worst_iters = std::max(worst_iters, iters);
            for (int d = 0; d < bm.system.n; ++d)
                worst_err = std::max(worst_err, std::abs(back[d] - x[d]));
        }
    }
    const Benchmark& bm1 = get_benchmark("bench1");
    const ExprTransform tmap1(bm1.exact_transform);
    int demo_iters = 0;
    const Vec zero{0.0, 0.0};
    const Vec start{0.1, 0.1};
    const Vec origin = newton_invert(tmap1, zero, start, {}, &demo_iters);
    const double demo_err = inf_norm(origin);
    Outcome out;
    out.pass = worst_err <= 1e-6 && worst_iters <= 10 && demo_err <= 1e-6 && demo_iters <= 5;
    out.detail = "round-trip error " + fmt(worst_err) + " (tol 1e-6) in <= " +
                 std::to_string(worst_iters) + " iterations (cap 10); origin recovery in " +
                 std::to_string(demo_iters) + " iterations (cap 5)";
    return out;
}

// Exact transforms leave zero defect in the filter-error recursion, and the
// simulated error contracts at the filter's dominant rate.
Outcome criterion9() {
    const Vec z0{0.0, 0.0};
    double worst_defect = 0.0;
    for (const char* id : {"bench1", "bench2"}) {
        const Benchmark& bm = get_benchmark(id);
        const ExprTransform tmap(bm.exact_transform);
        const Vec x0{-0.2, -0.2};
        worst_defect = std::max(
            worst_defect, error_dynamics_check(bm.system, bm.observer, tmap, x0, z0, 40));
    }
    const Benchmark& bm1 = get_benchmark("bench1");
    const ExprTransform tmap1(bm1.exact_transform);
    const Vec x0{-0.495, 0.35};
    const Vec guess{0.1, 0.1};
    const Trajectory traj = simulate(bm1.system, bm1.observer, tmap1, x0, z0, 41, {}, guess);
    // log-linear fit of |e_z(t)| over t in [5, 40]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int t = 5; t <= 40; ++t) {
        const double y = std::log(inf_norm(traj.ez[t]));
        sx += t;
        sy += y;
        sxx += static_cast<double>(t) * t;
        sxy += t * y;
        ++count;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double rate = std::exp(slope);
    Outcome out;
    out.pass = worst_defect <= 1e-12 && rate >= 0.80 && rate <= 0.88;
    out.detail = "recursion defect " + fmt(worst_defect) + " (tol 1e-12), empirical decay rate " +
                 fmt(rate) + " in [0.80, 0.88]";
    return out;
}

// A trained network drives the observer: the reconstructed state settles to
// the true state and stays there.
Outcome criterion10() {
    const Benchmark& bm = get_benchmark("bench1");
    const ContinuationSchedule sched{bm.greedy_schedule};
    const TrainResult tr = greedy_train(bm.system, bm.observer, sched,
                                        default_mlp_config(bm.system.n), campaign_lm_options(),
                                        kObserverDemoSeed);
    const Vec x0{-0.2, -0.2};
    const Vec z0{0.0, 0.0};
    const Vec guess{0.1, 0.1};
    const Trajectory traj = simulate(bm.system, bm.observer, tr.map, x0, z0, 60, {}, guess);
    double settled = 0.0;
    for (std::size_t t = 20; t < traj.size(); ++t)
        settled = std::max(settled, inf_norm(traj.ex[t]));
    Outcome out;
    out.pass = settled <= 5e-2;
    out.detail = "max reconstruction error for t >= 20: " + fmt(settled) + " (tol 5e-2)";
    return out;
}

// Optimizer sanity on the classic curved valley, including monotonicity of
// the accepted-cost sequence (recovered by truncating the deterministic run
// at increasing iteration caps).
Outcome criterion11() {
    const ResidualFn rosenbrock = [](std::span<const double> x, Vec& r) {
        r.assign(2, 0.0);
        r[0] = 10.0 * (x[1] - x[0] * x[0]);
        r[1] = 1.0 - x[0];
    };
    LmOptions opts;
    opts.max_iters = 200;
    const LmResult res = minimize(rosenbrock, {-1.2, 1.0}, opts);
    const double err = std::max(std::abs(res.x[0] - 1.0), std::abs(res.x[1] - 1.0));
    bool monotone = true;
    double prev = 1e300;
    for (long cap = 1; cap <= std::min<long>(res.iterations, 60); ++cap) {
        LmOptions truncated = opts;
        truncated.max_iters = cap;
        const double cost = minimize(rosenbrock, {-1.2, 1.0}, truncated).cost;
        if (cost > prev) monotone = false;
        prev = cost;
    }
    Outcome out;
    out.pass = err <= 1e-6 && res.iterations <= 200 && monotone;
    out.detail = "solution error " + fmt(err) + " (tol 1e-6) in " +
                 std::to_string(res.iterations) + " iterations (cap 200); accepted cost " +
                 std::string(monotone ? "monotone" : "NOT monotone");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > 11) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1..11]\n", argv[0]);
            return 1;
        }
        selected.insert(k);
    }
    if (selected.empty())
        for (int k = 1; k <= 11; ++k) selected.insert(k);
    if (selected.count(7)) g_greedy_runs_needed = 40;

    Outcome (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                               criterion5, criterion6, criterion7, criterion8,
                               criterion9, criterion10, criterion11};
    int failed = 0;
    for (int k : selected) {
        Outcome out;
        try {
            out = criteria[k - 1]();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d: %s  %s\n", k, out.pass ? "PASS" : "FAIL", out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    if (failed) std::printf("%d of %zu criteria failed\n", failed, selected.size());
    return failed ? 1 : 0;
}
