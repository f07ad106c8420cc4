#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace corrosion {

using Point = Eigen::Vector2d;

/// Location of a point relative to the healthy object D and the corroded part Ω.
enum class Region { Omega, Healthy, Outside };

const char* to_string(Region r);

/// Parametrized open arc x(t), t in [t_begin, t_end].
///
/// The normal is `orientation * (x2', -x1') / |x'|`; with orientation +1 the
/// arc is traversed counterclockwise around the domain it bounds and the
/// normal points out of that domain.
class BoundaryCurve {
public:
    using PointMap = std::function<Point(double)>;

    BoundaryCurve() = default;
    BoundaryCurve(std::string name, double t_begin, double t_end, PointMap position, PointMap derivative,
                  std::vector<double> corners = {}, int n_panels = 1, int orientation = 1);

    const std::string& name() const { return name_; }
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    int n_panels() const { return n_panels_; }
    int orientation() const { return orientation_; }
    const std::vector<double>& corners() const { return corners_; }

    Point position(double t) const { return position_(t); }
    Point derivative(double t) const { return derivative_(t); }
    double speed(double t) const { return derivative_(t).norm(); }
    Point normal(double t) const;

    Point front() const { return position_(t_begin_); }
    Point back() const { return position_(t_end_); }

    BoundaryCurve with_panels(int n_panels) const;
    BoundaryCurve renamed(std::string name) const;

    /// n+1 equally spaced samples in parameter, endpoints included.
    std::vector<Point> sample(int n) const;

private:
    std::string name_;
    double t_begin_ = 0.0;
    double t_end_ = 1.0;
    PointMap position_;
    PointMap derivative_;
    std::vector<double> corners_;
    int n_panels_ = 1;
    int orientation_ = 1;
};

/// Polyline through `vertices`, parametrized proportionally to arc length on
/// [t_begin, t_end]. Interior vertices become corner parameters. With
/// t_begin == t_end the parameter is the arc length itself.
BoundaryCurve make_polyline(std::string name, std::vector<Point> vertices, int n_panels,
                            double t_begin = 0.0, double t_end = 0.0);

/// (c1 + a cos t, c2 + b sin t) for t in [t_begin, t_end].
BoundaryCurve make_ellipse_arc(std::string name, Point center, double a, double b, double t_begin, double t_end,
                               int n_panels);

BoundaryCurve make_circle_arc(std::string name, Point center, double radius, double t_begin, double t_end,
                              int n_panels);

/// One quadrature / collocation node.
struct QuadratureNode {
    double t = 0.0;      ///< parameter value
    Point x;             ///< position
    Point normal;        ///< unit normal
    double speed = 0.0;  ///< |x'(t)|
    double weight = 0.0; ///< Gauss weight in parameter (not arc length)
};

/// Three-point Gauss-Legendre panel rule on an arc. The quadrature nodes are
/// also the collocation nodes; node i lives on panel i / 3.
class PanelQuadrature {
public:
    static constexpr int kNodesPerPanel = 3;
    /// Relative position of the first node inside a panel.
    static const double kCollocationOffset;

    explicit PanelQuadrature(BoundaryCurve curve);

    const BoundaryCurve& curve() const { return curve_; }
    int n_panels() const { return static_cast<int>(breaks_.size()) - 1; }
    std::size_t size() const { return nodes_.size(); }

    const QuadratureNode& node(std::size_t i) const { return nodes_[i]; }
    std::span<const QuadratureNode> nodes() const { return nodes_; }

    double panel_begin(int p) const { return breaks_[p]; }
    double panel_end(int p) const { return breaks_[p + 1]; }
    double panel_parameter_length(int p) const { return breaks_[p + 1] - breaks_[p]; }
    double panel_arclength(int p) const { return arclength_[p]; }
    const std::vector<double>& breaks() const { return breaks_; }

    /// Cheap lower-bound-ish estimate of dist(x, panel p).
    double distance_to_panel(int p, const Point& x) const;

    /// Panel containing parameter t (clamped to the arc).
    int locate(double t) const;

    /// Sum of w_i |x'(t_i)| f_i.
    double integrate(const Eigen::VectorXd& values) const;
    double total_length() const;

    /// Quadratic Lagrange basis through the three panel nodes, evaluated at
    /// relative position r in [0, 1].
    static std::array<double, 3> local_basis(double r);

    /// Evaluates the piecewise-quadratic interpolant of node values at t.
    double interpolate(const Eigen::VectorXd& values, double t) const;

private:
    BoundaryCurve curve_;
    std::vector<double> breaks_;
    std::vector<QuadratureNode> nodes_;
    std::vector<double> arclength_;
    std::vector<std::array<Point, 5>> probes_;
};

PanelQuadrature build_panels(const BoundaryCurve& curve);

/// Node values of f.
Eigen::VectorXd sample(const PanelQuadrature& quad, const std::function<double(const QuadratureNode&)>& f);

/// Forward-problem description: healthy object D bounded by Γ_N ∪ Γ_D and the
/// corroded object D∖Ω̄ bounded by Γ_N ∪ Γ_C.
struct ProblemSpec {
    BoundaryCurve gamma_n;
    BoundaryCurve gamma_d;
    BoundaryCurve gamma_c;
    /// Corrosion coefficient as a function of the Γ_C parameter.
    std::function<double(double)> gamma;
    /// Exact classification used only for validation and scoring.
    std::function<Region(const Point&)> region;
    /// True membership in D (known a priori); used to decide where the mixed
    /// Green's function is defined.
    std::function<bool(const Point&)> in_domain;

    /// Γ_C aliases Γ_D with a Dirichlet condition (Ω = ∅).
    bool dirichlet_on_c = false;

    /// Canonical JSON text of the description (hash input).
    std::string description;

    // Defaults used by the pipeline front-ends.
    int example_id = 0;
    double basis_frequency = 1.0;
    std::array<double, 4> imaging_bounds{0.0, 1.0, 0.0, 1.0}; ///< xmin, xmax, ymin, ymax
    double fm_level = 0.0;
    double lsm_level = 0.0;

    ProblemSpec with_panels(int n_panels) const;
    ProblemSpec with_gamma(double value) const;

    double gamma_min() const;
    double gamma_max() const;

    /// Short stable hash of `description`.
    std::string hash() const;
};

/// Throws ConfigError naming the violated invariant.
void validate(const ProblemSpec& spec);

/// The three reference geometries (1: square, 2: quarter disk wedge, 3: ellipse)
/// with constant corrosion coefficient.
ProblemSpec make_example(int id, int n_panels, double gamma = 0.5);

/// Ω = ∅ variant of `spec`: Γ_C := Γ_D with a Dirichlet condition.
ProblemSpec make_degenerate(const ProblemSpec& spec);

/// Winding number of the closed polygon `loop` around `p`.
int winding_number(std::span<const Point> loop, const Point& p);

/// Signed area of the closed polygon (positive when counterclockwise).
double signed_area(std::span<const Point> loop);

} // namespace corrosion
