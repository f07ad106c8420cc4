#pragma once

#include <vector>

namespace corrosion {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached n-point rule on [0, 1]; nodes ascending.
const GaussRule& gauss_legendre(int n);

} // namespace corrosion
