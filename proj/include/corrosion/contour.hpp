#pragma once

#include "corrosion/geometry.hpp"

#include <vector>

namespace corrosion {

using Polyline = std::vector<Point>;

/// Marching-squares level set of a field sampled at the nodes of a regular
/// nx × ny lattice (index j * nx + i). Non-finite samples count as below the
/// level. Returns chained polylines; closed ones repeat their first vertex.
std::vector<Polyline> marching_squares(const std::vector<double>& values, const std::vector<Point>& points, int nx,
                                       int ny, double level);

} // namespace corrosion
