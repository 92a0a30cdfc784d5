#include <doctest.h>

#include <cmath>
#include <vector>

#include "linobs/linalg.hpp"
#include "linobs/lm.hpp"

using namespace linobs;

namespace {

void rosenbrock(std::span<const double> x, Vec& out) {
    out.resize(2);
    out[0] = 10.0 * (x[1] - x[0] * x[0]);
    out[1] = 1.0 - x[0];
}

} // namespace

TEST_CASE("the banana valley is crossed in well under 200 iterations") {
    LmOptions opts;
    const LmResult res = minimize(rosenbrock, {-1.2, 1.0}, opts);
    CHECK(res.iterations <= 200);
    CHECK(std::abs(res.x[0] - 1.0) <= 1e-6);
    CHECK(std::abs(res.x[1] - 1.0) <= 1e-6);
    CHECK(res.cost <= 1e-12);
}

TEST_CASE("cost at a budget cap never beats a larger cap") {
    // deterministic path: the k-iteration run is a prefix of the (k+1)-iteration run
    double prev = std::numeric_limits<double>::infinity();
    for (long caps : {1L, 2L, 5L, 10L, 25L, 60L}) {
        LmOptions opts;
        opts.max_iters = caps;
        const LmResult res = minimize(rosenbrock, {-1.2, 1.0}, opts);
        CHECK(res.cost <= prev);
        prev = res.cost;
    }
}

TEST_CASE("a linear least-squares problem lands on the normal-equations solution") {
    const Matrix a = Matrix::from_rows({{1, 0}, {0, 2}, {1, 1}});
    const Vec b{1, 2, 3};
    auto fn = [&](std::span<const double> x, Vec& out) {
        out.resize(3);
        for (int i = 0; i < 3; ++i) out[i] = a(i, 0) * x[0] + a(i, 1) * x[1] - b[i];
    };
    Matrix ata(2, 2);
    Vec atb(2);
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            double s = 0;
            for (int i = 0; i < 3; ++i) s += a(i, p) * a(i, q);
            ata(p, q) = s;
        }
        double s = 0;
        for (int i = 0; i < 3; ++i) s += a(i, p) * b[i];
        atb[p] = s;
    }
    const Vec exact = lu_solve(ata, atb);
    const LmResult res = minimize(fn, {0.0, 0.0}, LmOptions{});
    CHECK(res.x[0] == doctest::Approx(exact[0]).epsilon(1e-8));
    CHECK(res.x[1] == doctest::Approx(exact[1]).epsilon(1e-8));
}

TEST_CASE("forward-difference jacobian approximates the analytic one") {
    auto fn = [](std::span<const double> x, Vec& out) {
        out.resize(2);
        out[0] = x[0] * x[0];
        out[1] = x[0] * x[1];
    };
    const Vec x{3.0, 2.0};
    const Matrix j = fd_jacobian(fn, x, 1e-5);
    CHECK(j(0, 0) == doctest::Approx(6.0).epsilon(1e-4));
    CHECK(j(0, 1) == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(j(1, 0) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(j(1, 1) == doctest::Approx(3.0).epsilon(1e-4));
    CHECK_THROWS_AS(fd_jacobian(fn, x, 0.0), std::invalid_argument);
}

TEST_CASE("budget caps are honored and reported") {
    LmOptions opts;
    opts.max_iters = 3;
    LmResult res = minimize(rosenbrock, {-1.2, 1.0}, opts);
    CHECK(res.reason == LmStop::MaxIter);
    CHECK(res.iterations == 3);

    opts = LmOptions{};
    opts.max_fevals = 10;
    res = minimize(rosenbrock, {-1.2, 1.0}, opts);
    CHECK(res.reason == LmStop::MaxFeval);
    CHECK(res.fevals <= 10);
}

TEST_CASE("a flat relative-improvement gate stops the walk early") {
    LmOptions loose;
    loose.rel_cost_tol = 0.5;
    const LmResult early = minimize(rosenbrock, {-1.2, 1.0}, loose);
    const LmResult full = minimize(rosenbrock, {-1.2, 1.0}, LmOptions{});
    CHECK(early.reason == LmStop::RelCostTol);
    CHECK(early.iterations < full.iterations);
    CHECK(early.cost >= full.cost);

    LmOptions bad;
    bad.rel_cost_tol = 1.5;
    CHECK_THROWS_AS(minimize(rosenbrock, {-1.2, 1.0}, bad), std::invalid_argument);
}

TEST_CASE("a parameter the residual ignores does not derail the solve") {
    // second coordinate is dead: its jacobian column is identically zero
    auto fn = [](std::span<const double> x, Vec& out) {
        out.resize(1);
        out[0] = x[0] - 1.0;
    };
    const LmResult res = minimize(fn, {5.0, 7.0}, LmOptions{});
    CHECK(res.cost <= 1e-14);
    CHECK(std::abs(res.x[0] - 1.0) <= 1e-6);
    CHECK(res.x[1] == doctest::Approx(7.0));  // frozen, not dragged
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(minimize(rosenbrock, {}, LmOptions{}), std::invalid_argument);
    auto empty = [](std::span<const double>, Vec& out) { out.clear(); };
    CHECK_THROWS_AS(minimize(empty, {1.0}, LmOptions{}), std::invalid_argument);
    LmOptions opts;
    opts.max_fevals = 1;
    CHECK_THROWS_AS(minimize(rosenbrock, {0.0, 0.0}, opts), std::invalid_argument);
}

TEST_CASE("an already-converged start returns immediately") {
    const LmResult res = minimize(rosenbrock, {1.0, 1.0}, LmOptions{});
    CHECK(res.reason == LmStop::CostTol);
    CHECK(res.iterations == 0);
    CHECK(res.fevals == 1);
}

TEST_CASE("stop reasons have stable names") {
    CHECK(std::string(to_string(LmStop::StepTol)) == "step-tol");
    CHECK(std::string(to_string(LmStop::CostTol)) == "cost-tol");
    CHECK(std::string(to_string(LmStop::RelCostTol)) == "rel-cost-tol");
    CHECK(std::string(to_string(LmStop::MaxIter)) == "max-iter");
    CHECK(std::string(to_string(LmStop::MaxFeval)) == "max-feval");
    CHECK(std::string(to_string(LmStop::Singular)) == "singular");
}
