#include "corrosion/kernels.hpp"

#include "corrosion/errors.hpp"
#include "corrosion/parallel.hpp"
#include "corrosion/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace corrosion {

namespace {

constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;
constexpr int kGaussPoints = 16;
constexpr int kMaxDepth = 30;
constexpr int kGrading = 3; // u = w^3 near the log singularity

using Acc = std::array<double, 3>;

void add(Acc& a, const Acc& b)
{
    for (int k = 0; k < 3; ++k)
        a[k] += b[k];
}

double max_abs_diff(const Acc& a, const Acc& b)
{
    double d = 0.0;
    for (int k = 0; k < 3; ++k)
        d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

double max_abs(const Acc& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

double kernel_value(LayerKind kind, const Point& x, const Point& nu_x, const Point& y, const Point& nu_y)
{
    const Point d = x - y;
    const double r2 = d.squaredNorm();
    switch (kind) {
    case LayerKind::Single:
        return -0.5 * kInv2Pi * std::log(r2);
    case LayerKind::AdjointDouble:
        return -kInv2Pi * d.dot(nu_x) / r2;
    case LayerKind::Double:
        return kInv2Pi * d.dot(nu_y) / r2;
    }
    return 0.0;
}

struct PanelView {
    const PanelQuadrature& quad;
    int panel;
    double a;
    double b;

    PanelView(const PanelQuadrature& q, int p) : quad(q), panel(p), a(q.panel_begin(p)), b(q.panel_end(p)) {}

    std::array<double, 3> basis(double s) const { return PanelQuadrature::local_basis((s - a) / (b - a)); }
};

// Three basis integrals plus a magnitude scale used by the adaptive rule:
// ∫ |Φ| J for the single layer and ∫ J / (2π r) for the double layers. The
// latter bounds the kernel even where (x - y)·ν cancels to roundoff.
struct Sums {
    Acc acc{};
    double mass = 0.0;
};

// Adds w * K(x, y(s)) * J(s) * L_k(s) to acc.
void accumulate(LayerKind kind, const PanelView& v, const Target& target, double s, double w, Sums& out)
{
    const BoundaryCurve& c = v.quad.curve();
    const Point y = c.position(s);
    const Point dy = c.derivative(s);
    const double j = dy.norm();
    Point nu_y = Point::Zero();
    if (kind == LayerKind::Double)
        nu_y = c.orientation() * Point(dy.y(), -dy.x()) / j;
    const double kval = kernel_value(kind, target.x, target.normal, y, nu_y);
    const double f = w * j * kval;
    const auto l = v.basis(s);
    for (int k = 0; k < 3; ++k)
        out.acc[k] += f * l[k];
    out.mass += w * j * (kind == LayerKind::Single ? std::abs(kval) : kInv2Pi / (target.x - y).norm());
}

Sums gauss_sums(LayerKind kind, const PanelView& v, const Target& target, double lo, double hi)
{
    const auto& rule = gauss_legendre(kGaussPoints);
    Sums out;
    const double h = hi - lo;
    for (int i = 0; i < kGaussPoints; ++i)
        accumulate(kind, v, target, lo + h * rule.nodes[i], h * rule.weights[i], out);
    return out;
}

Acc gauss(LayerKind kind, const PanelView& v, const Target& target, double lo, double hi)
{
    return gauss_sums(kind, v, target, lo, hi).acc;
}

Acc adaptive(LayerKind kind, const PanelView& v, const Target& target, double lo, double hi, const Acc& whole,
             double tol, int depth)
{
    const double mid = 0.5 * (lo + hi);
    const Acc left = gauss(kind, v, target, lo, mid);
    const Acc right = gauss(kind, v, target, mid, hi);
    Acc sum = left;
    add(sum, right);
    if (depth >= kMaxDepth || max_abs_diff(sum, whole) <= tol)
        return sum;
    Acc out = adaptive(kind, v, target, lo, mid, left, tol, depth + 1);
    add(out, adaptive(kind, v, target, mid, hi, right, tol, depth + 1));
    return out;
}

Acc adaptive(LayerKind kind, const PanelView& v, const Target& target)
{
    // Absolute tolerance fixed from the whole-panel magnitude so that roundoff
    // in small subintervals cannot force further splitting.
    const Sums whole = gauss_sums(kind, v, target, v.a, v.b);
    const double tol = 1e-13 * std::max(whole.mass, max_abs(whole.acc));
    return adaptive(kind, v, target, v.a, v.b, whole.acc, tol, 0);
}

// Single layer over [t, end] (or [end, t]) with the target at x(t):
//   -(h/2π) [ ∫ Q(u) du + F(0)(log h - 1) ],
//   Q(u) = log|x(t) - x(s)| F(u) - log(h u) F(0),  s = t ± h u,  F = L_k J,
// with the remainder integrated on the graded variable u = w^3.
Acc single_layer_side(const PanelView& v, const Target& target, double t, double end)
{
    const double h = std::abs(end - t);
    // a sliver below roundoff contributes O(h log h) and would evaluate log 0
    if (h <= 1e-13 * (v.b - v.a))
        return {};
    const double dir = end > t ? 1.0 : -1.0;
    const BoundaryCurve& c = v.quad.curve();
    const double j0 = c.speed(t);
    const auto l0 = v.basis(t);
    const double log_h = std::log(h);

    const auto& rule = gauss_legendre(kGaussPoints);
    Acc q{};
    for (int i = 0; i < kGaussPoints; ++i) {
        const double w = rule.nodes[i];
        const double u = std::pow(w, kGrading);
        const double du = kGrading * std::pow(w, kGrading - 1) * rule.weights[i];
        const double s = t + dir * h * u;
        const double log_r = std::log((target.x - c.position(s)).norm());
        const double log_hu = log_h + std::log(u);
        const double j = c.speed(s);
        const auto l = v.basis(s);
        for (int k = 0; k < 3; ++k)
            q[k] += du * (log_r * l[k] * j - log_hu * l0[k] * j0);
    }
    Acc out{};
    for (int k = 0; k < 3; ++k)
        out[k] = -kInv2Pi * h * (q[k] + l0[k] * j0 * (log_h - 1.0));
    return out;
}

Acc self_panel(LayerKind kind, const PanelView& v, const Target& target, double t)
{
    t = std::clamp(t, v.a, v.b);
    if (kind == LayerKind::Single) {
        Acc out = single_layer_side(v, target, t, v.a);
        add(out, single_layer_side(v, target, t, v.b));
        return out;
    }
    // The double-layer kernels are bounded on a smooth panel; splitting at the
    // target keeps the integrand smooth on each half.
    Acc out{};
    const double sliver = 1e-13 * (v.b - v.a);
    if (t - v.a > sliver)
        add(out, gauss(kind, v, target, v.a, t));
    if (v.b - t > sliver)
        add(out, gauss(kind, v, target, t, v.b));
    return out;
}

Acc node_rule(LayerKind kind, const PanelQuadrature& quad, int panel, const Target& target)
{
    Acc out{};
    for (int k = 0; k < 3; ++k) {
        const auto& n = quad.node(static_cast<std::size_t>(panel) * 3 + k);
        out[k] = n.weight * n.speed * kernel_value(kind, target.x, target.normal, n.x, n.normal);
    }
    return out;
}

enum class Tier { Self, Near, Mid, Far };

Tier choose_tier(const PanelQuadrature& quad, int panel, const Target& target, const QuadratureTiers& tiers)
{
    if (target.t_on_arc) {
        const double t = *target.t_on_arc;
        if (quad.panel_begin(panel) <= t && t <= quad.panel_end(panel))
            return Tier::Self;
    }
    const double len = quad.panel_arclength(panel);
    const double dist = quad.distance_to_panel(panel, target.x);
    if (dist < tiers.near * len)
        return Tier::Near;
    if (dist < tiers.mid * len)
        return Tier::Mid;
    return Tier::Far;
}

Acc integrate_panel(LayerKind kind, const PanelQuadrature& quad, int panel, const Target& target, Tier tier)
{
    const PanelView v(quad, panel);
    switch (tier) {
    case Tier::Self:
        return self_panel(kind, v, target, *target.t_on_arc);
    case Tier::Near:
        return adaptive(kind, v, target);
    case Tier::Mid:
        return gauss(kind, v, target, v.a, v.b);
    case Tier::Far:
        return node_rule(kind, quad, panel, target);
    }
    return {};
}

} // namespace

double phi(const Point& x, const Point& y)
{
    const double r = (x - y).norm();
    if (r == 0.0)
        throw SingularEvaluation("phi: coincident points");
    return -kInv2Pi * std::log(r);
}

double dphi_dnu(const Point& x, const Point& y, const Point& nu_x)
{
    const Point d = x - y;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0)
        throw SingularEvaluation("dphi_dnu: coincident points");
    return -kInv2Pi * d.dot(nu_x) / r2;
}

Point grad_phi(const Point& x, const Point& y)
{
    const Point d = x - y;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0)
        throw SingularEvaluation("grad_phi: coincident points");
    return -kInv2Pi * d / r2;
}

KernelEval kernel(LayerKind kind, const Point& x, const Point& nu_x, const Point& y, const Point& nu_y)
{
    if ((x - y).squaredNorm() == 0.0)
        return {0.0, true};
    return {kernel_value(kind, x, nu_x, y, nu_y), false};
}

const QuadratureTiers& default_tiers()
{
    static const QuadratureTiers tiers;
    return tiers;
}

std::array<double, 3> panel_integrals(LayerKind kind, const PanelQuadrature& quad, int panel, const Target& target,
                                      const QuadratureTiers& tiers)
{
    return integrate_panel(kind, quad, panel, target, choose_tier(quad, panel, target, tiers));
}

std::array<double, 3> singular_panel_integral(const PanelQuadrature& quad, int panel, double t)
{
    Target target{quad.curve().position(t), Point::Zero(), t};
    return self_panel(LayerKind::Single, PanelView(quad, panel), target, t);
}

bool layer_row(LayerKind kind, const PanelQuadrature& sources, const Target& target, Eigen::Ref<Eigen::RowVectorXd> out,
               const QuadratureTiers& tiers)
{
    bool near = false;
    for (int p = 0; p < sources.n_panels(); ++p) {
        const Tier tier = choose_tier(sources, p, target, tiers);
        near = near || tier == Tier::Near;
        const Acc v = integrate_panel(kind, sources, p, target, tier);
        for (int k = 0; k < 3; ++k)
            out[3 * p + k] = v[k];
    }
    return near;
}

Eigen::MatrixXd layer_matrix(LayerKind kind, const PanelQuadrature& targets, const PanelQuadrature& sources,
                             bool same_arc, int jobs)
{
    const auto rows = static_cast<Eigen::Index>(targets.size());
    const auto cols = static_cast<Eigen::Index>(sources.size());
    // Row-major scratch so that parallel workers write disjoint contiguous rows.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(rows, cols);
    parallel_for(targets.size(), jobs, [&](std::size_t i) {
        const auto& n = targets.node(i);
        Target target{n.x, n.normal, same_arc ? std::optional<double>(n.t) : std::nullopt};
        layer_row(kind, sources, target, m.row(static_cast<Eigen::Index>(i)));
    });
    return m;
}

} // namespace corrosion
