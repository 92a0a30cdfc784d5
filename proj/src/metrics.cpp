#include "linobs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linobs {

Vec grid_nodes(GridKind kind, double lo, double hi, int count) {
    if (count < 2) throw std::invalid_argument("grid_nodes: count must be >= 2");
    if (!(lo < hi)) throw std::invalid_argument("grid_nodes: interval must be nonempty");
    Vec nodes(count);
    if (kind == GridKind::Equispaced) {
        const double step = (hi - lo) / (count - 1);
        for (int i = 0; i < count; ++i) nodes[i] = lo + i * step;
        nodes[count - 1] = hi;
    } else {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int i = 0; i < count; ++i)
            nodes[i] = mid + half * std::cos(std::numbers::pi * i / (count - 1));
        std::reverse(nodes.begin(), nodes.end());
        nodes[0] = lo;
        nodes[count - 1] = hi;
    }
    return nodes;
}

std::vector<Vec> make_grid(const GridSpec& spec) {
    const int dims = static_cast<int>(spec.intervals.size());
    if (dims == 0 || spec.counts.size() != spec.intervals.size())
        throw std::invalid_argument("make_grid: intervals and counts must align");
    std::vector<Vec> axes(dims);
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) {
        axes[d] = grid_nodes(spec.kind, spec.intervals[d][0], spec.intervals[d][1], spec.counts[d]);
        total *= axes[d].size();
    }
    std::vector<Vec> points;
    points.reserve(total);
    std::vector<int> idx(dims, 0);
    Vec p(dims);
    while (true) {
        for (int d = 0; d < dims; ++d) p[d] = axes[d][idx[d]];
        points.push_back(p);
        int d = dims - 1;
        while (d >= 0 && ++idx[d] == static_cast<int>(axes[d].size())) {
            idx[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return points;
}

std::vector<Vec> error_field(const TransformMap& map, const TransformMap& oracle,
                             const std::vector<Vec>& grid) {
    const int n = map.output_dim();
    std::vector<Vec> fields(n, Vec(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec got = map.eval(grid[i]);
        const Vec want = oracle.eval(grid[i]);
        for (int j = 0; j < n; ++j) fields[j][i] = got[j] - want[j];
    }
    return fields;
}

Norms norms(std::span<const double> field) {
    Norms out;
    double sq = 0.0;
    for (double v : field) {
        const double a = std::abs(v);
        out.l1 += a;
        sq += v * v;
        out.linf = std::max(out.linf, a);
    }
    out.l2 = std::sqrt(sq);
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile: p must be in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

PercentileStats percentile_stats(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("percentile_stats: empty sample");
    std::sort(values.begin(), values.end());
    const auto at = [&](double p) {
        const double pos = p * (values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= values.size()) return values.back();
        const double frac = pos - lo;
        return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
    };
    return {at(0.05), at(0.5), at(0.95)};
}

ErrorStats aggregate_norms(std::span<const Norms> per_run) {
    if (per_run.size() < 2)
        throw std::invalid_argument("aggregate_norms: need at least two runs");
    std::vector<double> l1, l2, linf;
    for (const Norms& n : per_run) {
        l1.push_back(n.l1);
        l2.push_back(n.l2);
        linf.push_back(n.linf);
    }
    ErrorStats out;
    out.runs = static_cast<int>(per_run.size());
    out.l1 = percentile_stats(std::move(l1));
    out.l2 = percentile_stats(std::move(l2));
    out.linf = percentile_stats(std::move(linf));
    return out;
}

} // namespace linobs
