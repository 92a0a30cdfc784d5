#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "linobs/metrics.hpp"
#include "linobs/observer.hpp"
#include "linobs/pinn.hpp"
#include "linobs/series_solver.hpp"

namespace linobs {

/// JSON round-trip for trained networks and polynomial maps. Output is
/// deterministic: keys are sorted and floats use shortest round-trip form.
void save_trained_map(const std::string& path, const TrainedMap& map);
TrainedMap load_trained_map(const std::string& path);

void save_poly_map(const std::string& path, const PolyMap& map);
PolyMap load_poly_map(const std::string& path);

/// Loads either kind based on the document's "type" field.
std::unique_ptr<TransformMap> load_transform(const std::string& path);

/// Columns: t, x1..xn, y, z1..zn, xhat1..xhatn, ez_inf, ex_inf, newton_iters.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Columns: x1..xn, e1..em (one error column per map component).
void write_error_field_csv(std::ostream& os, const std::vector<Vec>& points,
                           const std::vector<Vec>& errors);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace linobs
