#pragma once

#include "corrosion/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>

namespace corrosion {

/// Φ(x, y) = -log|x - y| / (2π). Throws SingularEvaluation when x == y.
double phi(const Point& x, const Point& y);

/// ∂Φ(x, y)/∂ν(x) = -(x - y)·ν(x) / (2π |x - y|²).
double dphi_dnu(const Point& x, const Point& y, const Point& nu_x);

/// Gradient of Φ(·, y) at x.
Point grad_phi(const Point& x, const Point& y);

/// Kernel of a layer operator.
///  Single:        Φ(x, y)                 (S)
///  AdjointDouble: ∂Φ(x, y)/∂ν(x)          (T, normal at the target)
///  Double:        ∂Φ(x, y)/∂ν(y)          (normal at the source)
enum class LayerKind { Single, AdjointDouble, Double };

struct KernelEval {
    double value = 0.0;
    bool is_singular = false;
};

/// Kernel value with a flag instead of an exception for coincident points.
KernelEval kernel(LayerKind kind, const Point& x, const Point& nu_x, const Point& y, const Point& nu_y);

/// A point where a layer potential is evaluated. `normal` is only used by
/// AdjointDouble. When the point lies on the source arc, `t_on_arc` holds its
/// parameter there and the panels containing it are integrated with the
/// singular rule.
struct Target {
    Point x;
    Point normal = Point::Zero();
    std::optional<double> t_on_arc;
};

/// Distance thresholds (in units of the source panel's arc length) that pick
/// the quadrature rule for a (target, panel) pair.
struct QuadratureTiers {
    double near = 1.0; ///< below: adaptive bisection with 16-point Gauss
    double mid = 6.0;  ///< below: one 16-point Gauss rule; above: the 3 panel nodes
};

const QuadratureTiers& default_tiers();

/// ∫_panel K(target, y) L_k(y) ds(y) for the three local Lagrange basis
/// functions L_k of the panel.
std::array<double, 3> panel_integrals(LayerKind kind, const PanelQuadrature& quad, int panel, const Target& target,
                                      const QuadratureTiers& tiers = default_tiers());

/// Single-layer integral over `panel` with the target on that panel at
/// parameter t (log-splitting rule).
std::array<double, 3> singular_panel_integral(const PanelQuadrature& quad, int panel, double t);

/// Row r such that r·φ is the layer potential of the piecewise-quadratic
/// density with node values φ, evaluated at the target. Returns true when the
/// target was within the near-singular cutoff of some panel.
bool layer_row(LayerKind kind, const PanelQuadrature& sources, const Target& target, Eigen::Ref<Eigen::RowVectorXd> out,
               const QuadratureTiers& tiers = default_tiers());

/// Matrix of the layer operator from densities on `sources` to the nodes of
/// `targets` (normals of `targets` used for AdjointDouble). `same_arc` marks
/// targets lying on the source arc.
Eigen::MatrixXd layer_matrix(LayerKind kind, const PanelQuadrature& targets, const PanelQuadrature& sources,
                             bool same_arc, int jobs = 1);

} // namespace corrosion
