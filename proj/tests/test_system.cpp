#include <doctest.h>

#include <cmath>
#include <vector>

#include "linobs/benchmarks.hpp"
#include "linobs/system.hpp"

using namespace linobs;

TEST_CASE("benchmark registry knows its ids") {
    const auto ids = benchmark_ids();
    CHECK(ids.size() == 2);
    CHECK(ids[0] == "bench1");
    CHECK(ids[1] == "bench2");
    CHECK_THROWS_AS(get_benchmark("nope"), std::invalid_argument);
}

TEST_CASE("plant step matches hand-computed values") {
    const Benchmark& bm = get_benchmark("bench1");
    const Vec s1 = step(bm.system, std::vector<double>{0.1, 0.1});
    CHECK(s1[0] == doctest::Approx(-0.015616311797377019).epsilon(1e-14));
    CHECK(s1[1] == doctest::Approx(0.1311607783969774).epsilon(1e-14));
    const Vec s2 = step(bm.system, std::vector<double>{-0.2, -0.2});
    CHECK(s2[0] == doctest::Approx(0.072231955785741431).epsilon(1e-14));
    CHECK(s2[1] == doctest::Approx(-0.33541281188299527).epsilon(1e-14));

    const Benchmark& b2 = get_benchmark("bench2");
    const Vec s3 = step(b2.system, std::vector<double>{0.1, 0.0});
    CHECK(s3[0] == doctest::Approx(0.047619047619047616).epsilon(1e-14));
    CHECK(s3[1] == doctest::Approx(0.0));
}

TEST_CASE("origin is a fixed point of both benchmarks") {
    for (const auto& id : benchmark_ids()) {
        const Benchmark& bm = get_benchmark(id);
        const Vec s = step(bm.system, std::vector<double>{0.0, 0.0});
        CHECK(std::abs(s[0]) <= 1e-12);
        CHECK(std::abs(s[1]) <= 1e-12);
        CHECK(std::abs(eval(bm.system.h, std::vector<double>{0.0, 0.0})) <= 1e-12);
    }
}

TEST_CASE("system construction rejects a broken fixed point") {
    CHECK_THROWS_AS(DiscreteSystem::create({parse("x1+1", 2), parse("x2", 2)}, parse("x1", 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiscreteSystem::create({parse("x1", 2), parse("x2", 2)}, parse("x1+1", 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiscreteSystem::create({parse("x1", 1)}, parse("x1+x2", 2)),
                    std::invalid_argument);
}

TEST_CASE("linearization of the logarithmic benchmark") {
    const Benchmark& bm = get_benchmark("bench1");
    const LinearizationData lin = linearize(bm.system, bm.observer);
    CHECK(lin.f(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(lin.f(0, 1) == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(lin.f(1, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(lin.f(1, 1) == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(lin.h(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(lin.h(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lin.b(0, 0) == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK(lin.b(1, 0) == doctest::Approx(0.0).epsilon(1e-9));

    const auto ev = eigenvalues(lin.f);
    CHECK(ev[0].real() == doctest::Approx(0.77015621187164252).epsilon(1e-9));
    CHECK(ev[1].real() == doctest::Approx(0.12984378812835756).epsilon(1e-9));
    const auto ea = eigenvalues(bm.observer.a);
    CHECK(ea[0].real() == doctest::Approx(0.84051248379533272).epsilon(1e-12));
    CHECK(ea[1].real() == doctest::Approx(0.059487516204667301).epsilon(1e-12));
}

TEST_CASE("linearization of the rational benchmark") {
    const Benchmark& bm = get_benchmark("bench2");
    const LinearizationData lin = linearize(bm.system, bm.observer);
    CHECK(lin.f(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(lin.f(0, 1) == doctest::Approx(-0.9).epsilon(1e-9));
    CHECK(lin.f(1, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(lin.f(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
    const auto ev = eigenvalues(lin.f);
    CHECK(ev[0].real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev[1].real() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("observability holds for both benchmarks") {
    for (const auto& id : benchmark_ids()) {
        const Benchmark& bm = get_benchmark(id);
        const auto rep = check_observability(linearize(bm.system, bm.observer));
        CHECK(rep.observable);
        CHECK(rep.rank == 2);
    }
}

TEST_CASE("observability fails for a blind output") {
    // h reads x1 but x2 never feeds back into x1
    DiscreteSystem sys = DiscreteSystem::create({parse("0.5*x1", 2), parse("0.5*x2", 2)},
                                                parse("x1", 2));
    ObserverSpec obs;
    obs.a = Matrix::from_rows({{0.1, 0.0}, {0.0, 0.2}});
    obs.b = {parse("y", 1), parse("y", 1)};
    const auto rep = check_observability(linearize(sys, obs));
    CHECK_FALSE(rep.observable);
    CHECK(rep.rank == 1);
}

TEST_CASE("eigenvalue products are checked up to the finite degree bound") {
    const Benchmark& bm = get_benchmark("bench1");
    const auto rep = check_resonance(linearize(bm.system, bm.observer), bm.observer);
    CHECK(rep.status == ResonanceStatus::Pass);
    CHECK(rep.detail.find("12") != std::string::npos);
}

TEST_CASE("a plant eigenvalue on the unit circle downgrades the check to a warning") {
    const Benchmark& bm = get_benchmark("bench2");
    const auto rep = check_resonance(linearize(bm.system, bm.observer), bm.observer);
    CHECK(rep.status == ResonanceStatus::Warning);
}

TEST_CASE("an exact eigenvalue product match is flagged") {
    // plant eigenvalues 0.5, 0.5; filter eigenvalue 0.25 = 0.5^2
    DiscreteSystem sys = DiscreteSystem::create({parse("0.5*x1", 2), parse("0.5*x2", 2)},
                                                parse("x1", 2));
    ObserverSpec obs;
    obs.a = Matrix::from_rows({{0.25, 0.0}, {0.0, 0.9}});
    obs.b = {parse("y", 1), parse("y", 1)};
    const auto rep = check_resonance(linearize(sys, obs), obs);
    CHECK(rep.status == ResonanceStatus::Fail);
    REQUIRE(rep.multi_index.size() == 2);
    CHECK(rep.multi_index[0] + rep.multi_index[1] == 2);
    // the flagged filter eigenvalue really equals 0.5^2
    const auto lam = eigenvalues(obs.a);
    REQUIRE(rep.lambda_index >= 0);
    CHECK(std::abs(lam[rep.lambda_index] - 0.25) <= 1e-9);
}

TEST_CASE("observer misconfigurations are reported as text") {
    CHECK(observer_issues(get_benchmark("bench1").observer).empty());
    ObserverSpec bad;
    bad.a = Matrix::from_rows({{1.5, 0.0}, {0.0, 0.1}});
    bad.b = {parse("y", 1), parse("y+1", 1)};
    const auto issues = observer_issues(bad);
    CHECK(issues.size() == 2);
}

TEST_CASE("exact transforms and inverses round-trip on sample points") {
    for (const auto& id : benchmark_ids()) {
        const Benchmark& bm = get_benchmark(id);
        for (double f : {0.1, 0.45, 0.9}) {
            const Vec x{bm.domain_lo[0] * f, bm.domain_lo[1] * f * 0.75};
            const Vec z = exact_transform_at(bm, x);
            const Vec back = exact_inverse_at(bm, z);
            CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-10));
            CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-10));
        }
    }
}

TEST_CASE("greedy schedules shrink strictly toward the domain corner") {
    for (const auto& id : benchmark_ids()) {
        const Benchmark& bm = get_benchmark(id);
        REQUIRE(!bm.greedy_schedule.empty());
        CHECK(bm.greedy_schedule.front() == doctest::Approx(-0.1));
        CHECK(bm.greedy_schedule.back() == doctest::Approx(bm.domain_lo[0]));
        for (std::size_t i = 1; i < bm.greedy_schedule.size(); ++i)
            CHECK(bm.greedy_schedule[i] < bm.greedy_schedule[i - 1]);
    }
    CHECK(get_benchmark("bench1").greedy_schedule.size() == 18);
    CHECK(get_benchmark("bench2").greedy_schedule.size() == 19);
}
