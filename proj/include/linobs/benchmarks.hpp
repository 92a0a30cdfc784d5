#pragma once

#include <string>
#include <vector>

#include "linobs/system.hpp"

namespace linobs {

/// A registered example problem: system + observer + training domain +
/// closed-form transform pair used as ground truth, plus the nested-domain
/// schedule (per-stage lower bounds; every subdomain is [lo, 0]^n).
struct Benchmark {
    std::string id;
    std::string title;
    DiscreteSystem system;
    ObserverSpec observer;
    Vec domain_lo;
    Vec domain_hi;
    std::vector<double> greedy_schedule;
    std::vector<Expr> exact_transform;  // components of T, inputs x1..xn
    std::vector<Expr> exact_inverse;    // components of T^-1, inputs are z positionally
};

const Benchmark& get_benchmark(const std::string& id);
std::vector<std::string> benchmark_ids();

Vec exact_transform_at(const Benchmark& bm, std::span<const double> x);
Vec exact_inverse_at(const Benchmark& bm, std::span<const double> z);

} // namespace linobs
