#include "linobs/benchmarks.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace linobs {

namespace {

Benchmark make_bench1() {
    Benchmark bm;
    bm.id = "bench1";
    bm.title = "logarithmic transform system";
    bm.system = DiscreteSystem::create(
        {parse("exp(0.2*x2/(1+x2))*sqrt(1+x1+x2)-1-0.4*x2-0.5*ln(1+x1+x2)", 2),
         parse("0.5*ln(1+x1+x2)+0.4*x2", 2)},
        parse("x2", 2));
    bm.observer.a = Matrix::from_rows({{0.5, 0.3}, {0.5, 0.4}});
    bm.observer.b = {parse("0.2*y/(1+y)-0.3*y", 1), parse("0", 1)};
    bm.domain_lo = {-0.495, -0.495};
    bm.domain_hi = {0.0, 0.0};
    for (int i = 1; i <= 4; ++i) bm.greedy_schedule.push_back(-i / 10.0);
    for (int i = 41; i <= 49; ++i) bm.greedy_schedule.push_back(-i / 100.0);
    for (int i = 491; i <= 495; ++i) bm.greedy_schedule.push_back(-i / 1000.0);
    bm.exact_transform = {parse("ln(1+x1+x2)", 2), parse("x2", 2)};
    bm.exact_inverse = {parse("exp(x1)-x2-1", 2), parse("x2", 2)};
    return bm;
}

Benchmark make_bench2() {
    Benchmark bm;
    bm.id = "bench2";
    bm.title = "rational transform system with a unit-circle plant eigenvalue";
    bm.system = DiscreteSystem::create(
        {parse("(0.5*x1/(1+x1)-0.9*x2)/(1-0.5*x1/(1+x1)+0.9*x2)", 2), parse("x2", 2)},
        parse("x1", 2));
    bm.observer.a = Matrix::from_rows({{0.0, 0.0}, {0.0, 0.1}});
    bm.observer.b = {parse("0.5*y/(1+y)", 1), parse("y/(1+y)", 1)};
    bm.domain_lo = {-0.91, -0.91};
    bm.domain_hi = {0.0, 0.0};
    for (int i = 1; i <= 8; ++i) bm.greedy_schedule.push_back(-i / 10.0);
    for (int i = 81; i <= 91; ++i) bm.greedy_schedule.push_back(-i / 100.0);
    bm.exact_transform = {parse("x1/(1+x1)+0.9*x2", 2), parse("2.5*(x1/(1+x1)+x2)", 2)};
    bm.exact_inverse = {parse("(10*x1-3.6*x2)/(1-10*x1+3.6*x2)", 2), parse("4*x2-10*x1", 2)};
    return bm;
}

const std::map<std::string, Benchmark>& registry() {
    static std::once_flag flag;
    static std::map<std::string, Benchmark> reg;
    std::call_once(flag, [] {
        reg.emplace("bench1", make_bench1());
        reg.emplace("bench2", make_bench2());
    });
    return reg;
}

} // namespace

const Benchmark& get_benchmark(const std::string& id) {
    const auto& reg = registry();
    const auto it = reg.find(id);
    if (it == reg.end()) throw std::invalid_argument("unknown benchmark id: " + id);
    return it->second;
}

std::vector<std::string> benchmark_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, bm] : registry()) ids.push_back(id);
    return ids;
}

Vec exact_transform_at(const Benchmark& bm, std::span<const double> x) {
    Vec out(bm.exact_transform.size());
    for (std::size_t i = 0; i < bm.exact_transform.size(); ++i)
        out[i] = eval(bm.exact_transform[i], x);
    return out;
}

Vec exact_inverse_at(const Benchmark& bm, std::span<const double> z) {
    Vec out(bm.exact_inverse.size());
    for (std::size_t i = 0; i < bm.exact_inverse.size(); ++i)
        out[i] = eval(bm.exact_inverse[i], z);
    return out;
}

} // namespace linobs
