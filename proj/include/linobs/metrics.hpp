#pragma once

#include <array>
#include <span>
#include <vector>

#include "linobs/linalg.hpp"
#include "linobs/transform_map.hpp"

namespace linobs {

enum class GridKind { Equispaced, ChebyshevLobatto };

/// Tensor-product grid: per-dimension interval [lo, hi] and point count.
struct GridSpec {
    GridKind kind = GridKind::Equispaced;
    std::vector<std::array<double, 2>> intervals;
    std::vector<int> counts;
};

/// One-dimensional nodes, ascending. Equispaced includes both endpoints;
/// Chebyshev-Lobatto nodes are the cosine-spaced extrema, also including both
/// endpoints. Both require count >= 2.
Vec grid_nodes(GridKind kind, double lo, double hi, int count);

/// All grid points, the first dimension varying slowest.
std::vector<Vec> make_grid(const GridSpec& spec);

/// Pointwise difference map(x) - oracle(x) over the grid, one field per
/// output component: result[j][i] is component j at grid point i. Domain
/// errors from either map propagate.
std::vector<Vec> error_field(const TransformMap& map, const TransformMap& oracle,
                             const std::vector<Vec>& grid);

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// Unnormalized norms of a sampled field: sum of absolute values, root of the
/// sum of squares, and max absolute value.
Norms norms(std::span<const double> field);

struct PercentileStats {
    double p5 = 0.0;
    double median = 0.0;
    double p95 = 0.0;
};

/// Percentiles by linear interpolation on the sorted sample at fractional
/// 0-based index p*(N-1).
PercentileStats percentile_stats(std::vector<double> values);
double percentile(std::vector<double> values, double p);

/// Aggregated spread of per-run error norms over a repeated-training campaign.
struct ErrorStats {
    int runs = 0;
    PercentileStats l1;
    PercentileStats l2;
    PercentileStats linf;
};

ErrorStats aggregate_norms(std::span<const Norms> per_run);

} // namespace linobs
