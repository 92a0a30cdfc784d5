#include <doctest.h>

#include <cmath>
#include <vector>

#include "linobs/benchmarks.hpp"
#include "linobs/series_solver.hpp"

using namespace linobs;

TEST_CASE("order-6 expansion matches the closed-form transform coefficientwise") {
    for (const auto& id : benchmark_ids()) {
        const Benchmark& bm = get_benchmark(id);
        const PolyMap pm = solve_series(bm.system, bm.observer, 6);
        REQUIRE(pm.components.size() == 2);
        CHECK(pm.order() == 6);
        const Vec origin{0.0, 0.0};
        for (int c = 0; c < 2; ++c) {
            const TruncatedSeries ref = series_eval(bm.exact_transform[c], origin, 6);
            const auto got = pm.components[c].coeffs();
            REQUIRE(got.size() == ref.coeffs().size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(std::abs(got[i] - ref.coeffs()[i]) <= 1e-8);
        }
    }
}

TEST_CASE("a linear component stays exactly linear through the solve") {
    const Benchmark& bm = get_benchmark("bench1");
    const PolyMap pm = solve_series(bm.system, bm.observer, 6);
    const TruncatedSeries& t2 = pm.components[1];
    for (int i = 0; i < t2.layout().size(); ++i)
        if (t2.layout().degree(i) >= 2) CHECK(std::abs(t2.coeffs()[i]) <= 1e-10);
}

TEST_CASE("degree-one coefficients reproduce the anchor jacobian") {
    const Benchmark& bm = get_benchmark("bench1");
    const PolyMap pm = solve_series(bm.system, bm.observer, 3);
    const int i10[]{1, 0}, i01[]{0, 1};
    CHECK(pm.components[0].coeff(i10) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pm.components[0].coeff(i01) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pm.components[1].coeff(i10) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pm.components[1].coeff(i01) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pm.components[0].constant_term() == doctest::Approx(0.0));
}

TEST_CASE("an eigenvalue product collision aborts the degree solve") {
    // plant eigenvalues (0.5, 0.5); filter eigenvalue 0.25 collides at degree 2
    DiscreteSystem sys = DiscreteSystem::create({parse("0.5*x1+x2^2", 2), parse("0.5*x2", 2)},
                                                parse("x1", 2));
    ObserverSpec obs;
    obs.a = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.9}});
    obs.b = {parse("y", 1), parse("y", 1)};
    try {
        solve_series(sys, obs, 4);
        CHECK(false);
    } catch (const SeriesResonanceError& e) {
        CHECK(e.degree() == 2);
    }
}

TEST_CASE("polynomial transform evaluates and differentiates its series") {
    const Benchmark& bm = get_benchmark("bench1");
    PolyMap pm = solve_series(bm.system, bm.observer, 6);
    const PolyTransform map(pm);
    const Vec x{-0.12, -0.07};
    const Vec direct = eval_polymap(map.poly(), x);
    const Vec via = map.eval(x);
    CHECK(via[0] == doctest::Approx(direct[0]).epsilon(1e-15));
    CHECK(via[1] == doctest::Approx(direct[1]).epsilon(1e-15));
    // exact jacobian at the origin equals the anchor
    const Matrix j0 = map.jacobian(std::vector<double>{0.0, 0.0});
    CHECK(j0(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j0(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j0(1, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j0(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
    // and away from it matches finite differences
    const double h = 1e-6;
    const Matrix j = map.jacobian(x);
    for (int k = 0; k < 2; ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const Vec fp = map.eval(xp), fm = map.eval(xm);
        for (int i = 0; i < 2; ++i)
            CHECK(j(i, k) == doctest::Approx((fp[i] - fm[i]) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("truncation error grows toward the singular corner") {
    const Benchmark& bm = get_benchmark("bench1");
    const PolyTransform map(solve_series(bm.system, bm.observer, 6));
    const Vec near{-0.05, -0.05}, far{-0.45, -0.45};
    const double e_near =
        std::abs(map.eval(near)[0] - eval(bm.exact_transform[0], near));
    const double e_far = std::abs(map.eval(far)[0] - eval(bm.exact_transform[0], far));
    CHECK(e_near < 1e-6);
    CHECK(e_far > 0.1);
    CHECK(e_far > 1e3 * e_near);
}
