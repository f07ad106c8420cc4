#include "corrosion/geometry.hpp"

#include "corrosion/errors.hpp"
#include "corrosion/hash.hpp"
#include "corrosion/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace corrosion {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Point& p, const Point& a, const Point& b)
{
    const Point e = b - a;
    const double ee = e.squaredNorm();
    const double r = ee > 0.0 ? std::clamp((p - a).dot(e) / ee, 0.0, 1.0) : 0.0;
    return (p - a - r * e).norm();
}

// Segments closer than tol count as intersecting (touching or overlapping).
bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2, double tol)
{
    // Signed distances to the other segment's line; a proper crossing needs
    // both endpoints clearly on opposite sides.
    const double lp = (p2 - p1).norm(), lq = (q2 - q1).norm();
    const double d1 = cross(p2 - p1, q1 - p1) / lp;
    const double d2 = cross(p2 - p1, q2 - p1) / lp;
    const double d3 = cross(q2 - q1, p1 - q1) / lq;
    const double d4 = cross(q2 - q1, p2 - q1) / lq;
    auto opposite = [tol](double a, double b) { return (a > tol && b < -tol) || (a < -tol && b > tol); };
    if (opposite(d1, d2) && opposite(d3, d4))
        return true;
    const double dist = std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                                  point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
    return dist < tol;
}

std::vector<double> panel_breaks(const BoundaryCurve& curve)
{
    const int n = curve.n_panels();
    if (n < 1)
        throw ConfigError(curve.name() + ": panel count must be positive");
    const double t0 = curve.t_begin();
    const double t1 = curve.t_end();
    if (!(t1 > t0))
        throw ConfigError(curve.name() + ": empty parameter interval");
    const double h = (t1 - t0) / n;

    // Snap corners to the nearest uniform break, then spread the breaks of each
    // smooth piece evenly between its anchors.
    std::vector<std::pair<int, double>> anchors{{0, t0}};
    for (double c : curve.corners()) {
        if (!(c > t0 && c < t1))
            throw ConfigError(curve.name() + ": corner parameter outside the open interval");
        const int idx = static_cast<int>(std::lround((c - t0) / h));
        if (idx <= anchors.back().first || idx >= n)
            throw ConfigError(curve.name() + ": corner density exceeds panel count");
        anchors.emplace_back(idx, c);
    }
    anchors.emplace_back(n, t1);

    std::vector<double> breaks(n + 1);
    for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
        const auto [i0, s0] = anchors[a];
        const auto [i1, s1] = anchors[a + 1];
        for (int i = i0; i <= i1; ++i)
            breaks[i] = s0 + (s1 - s0) * static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
    }
    return breaks;
}

std::vector<Point> closed_loop(const BoundaryCurve& a, const BoundaryCurve& b, int per_arc)
{
    std::vector<Point> loop;
    auto first = a.sample(per_arc);
    auto second = b.sample(per_arc);
    loop.insert(loop.end(), first.begin(), first.end() - 1);
    loop.insert(loop.end(), second.begin(), second.end() - 1);
    return loop;
}

double diameter(std::span<const Point> pts)
{
    double d = 0.0;
    Point lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    d = (hi - lo).norm();
    return d;
}

void validate_loop(const BoundaryCurve& a, const BoundaryCurve& b, const std::string& what)
{
    const double scale = diameter(closed_loop(a, b, 16));
    const double tol = 1e-9 * std::max(scale, 1.0);
    if ((a.back() - b.front()).norm() > tol || (b.back() - a.front()).norm() > tol)
        throw ConfigError(what + ": " + a.name() + " and " + b.name() + " do not form a closed curve");

    const auto loop = closed_loop(a, b, 64);
    if (signed_area(loop) <= 0.0)
        throw ConfigError(what + ": boundary is not counterclockwise (outward normal convention)");

    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n], tol))
                throw ConfigError(what + ": " + a.name() + " and " + b.name() +
                                  " overlap or self-intersect");
        }
    }
}

void set_example_levels(ProblemSpec& spec, double gamma)
{
    const bool small = gamma < 1.0;
    switch (spec.example_id) {
    case 1:
        spec.fm_level = 1.5;
        spec.lsm_level = -0.5;
        break;
    case 2:
        spec.fm_level = small ? 0.25 : -1.0;
        spec.lsm_level = small ? -1.0 : -1.5;
        break;
    case 3:
        spec.fm_level = small ? 2.5 : 1.5;
        spec.lsm_level = 0.0;
        break;
    default:
        break;
    }
}

std::string update_description(const std::string& text, const char* key, const nlohmann::json& value)
{
    nlohmann::json j = text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
    j[key] = value;
    return j.dump();
}

} // namespace

const char* to_string(Region r)
{
    switch (r) {
    case Region::Omega:
        return "omega";
    case Region::Healthy:
        return "healthy";
    case Region::Outside:
        return "outside";
    }
    return "unknown";
}

// ---------------------------------------------------------------- curves

BoundaryCurve::BoundaryCurve(std::string name, double t_begin, double t_end, PointMap position,
                             PointMap derivative, std::vector<double> corners, int n_panels, int orientation)
    : name_(std::move(name)), t_begin_(t_begin), t_end_(t_end), position_(std::move(position)),
      derivative_(std::move(derivative)), corners_(std::move(corners)), n_panels_(n_panels),
      orientation_(orientation >= 0 ? 1 : -1)
{
    std::sort(corners_.begin(), corners_.end());
}

Point BoundaryCurve::normal(double t) const
{
    const Point d = derivative_(t);
    return orientation_ * Point(d.y(), -d.x()) / d.norm();
}

BoundaryCurve BoundaryCurve::with_panels(int n_panels) const
{
    BoundaryCurve copy = *this;
    copy.n_panels_ = n_panels;
    return copy;
}

BoundaryCurve BoundaryCurve::renamed(std::string name) const
{
    BoundaryCurve copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

std::vector<Point> BoundaryCurve::sample(int n) const
{
    std::vector<Point> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
        pts.push_back(position_(t_begin_ + (t_end_ - t_begin_) * i / n));
    return pts;
}

BoundaryCurve make_polyline(std::string name, std::vector<Point> vertices, int n_panels, double t_begin,
                            double t_end)
{
    if (vertices.size() < 2)
        throw ConfigError(name + ": polyline needs at least two vertices");
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const double len = (vertices[i] - vertices[i - 1]).norm();
        if (!(len > 0.0))
            throw ConfigError(name + ": repeated polyline vertex");
        cumulative.push_back(cumulative.back() + len);
    }
    const double total = cumulative.back();
    if (t_end == t_begin)
        t_end = t_begin + total;
    const double scale = total / (t_end - t_begin); // arc length per unit parameter

    auto segment_of = [cumulative](double s) {
        auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end() - 1, s);
        return static_cast<std::size_t>(it - cumulative.begin()) - 1;
    };
    auto position = [=](double t) -> Point {
        const double s = std::clamp((t - t_begin) * scale, 0.0, total);
        const std::size_t k = segment_of(s);
        const double r = (s - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
        return vertices[k] + r * (vertices[k + 1] - vertices[k]);
    };
    auto derivative = [=](double t) -> Point {
        const double s = std::clamp((t - t_begin) * scale, 0.0, total);
        const std::size_t k = segment_of(s);
        const Point d = vertices[k + 1] - vertices[k];
        return d / d.norm() * scale;
    };
    std::vector<double> corners;
    for (std::size_t i = 1; i + 1 < cumulative.size(); ++i)
        corners.push_back(t_begin + cumulative[i] / scale);
    return BoundaryCurve(std::move(name), t_begin, t_end, position, derivative, std::move(corners), n_panels);
}

BoundaryCurve make_ellipse_arc(std::string name, Point center, double a, double b, double t_begin, double t_end,
                               int n_panels)
{
    if (!(a > 0.0 && b > 0.0))
        throw ConfigError(name + ": ellipse semi-axes must be positive");
    auto position = [=](double t) -> Point { return center + Point(a * std::cos(t), b * std::sin(t)); };
    auto derivative = [=](double t) -> Point { return Point(-a * std::sin(t), b * std::cos(t)); };
    return BoundaryCurve(std::move(name), t_begin, t_end, position, derivative, {}, n_panels);
}

BoundaryCurve make_circle_arc(std::string name, Point center, double radius, double t_begin, double t_end,
                              int n_panels)
{
    return make_ellipse_arc(std::move(name), center, radius, radius, t_begin, t_end, n_panels);
}

// ---------------------------------------------------------------- panels

const double PanelQuadrature::kCollocationOffset = (1.0 - std::sqrt(3.0 / 5.0)) / 2.0;

PanelQuadrature::PanelQuadrature(BoundaryCurve curve) : curve_(std::move(curve)), breaks_(panel_breaks(curve_))
{
    const auto& rule = gauss_legendre(kNodesPerPanel);
    const int n = n_panels();
    nodes_.reserve(static_cast<std::size_t>(n) * kNodesPerPanel);
    arclength_.resize(n);
    probes_.resize(n);
    for (int p = 0; p < n; ++p) {
        const double a = breaks_[p];
        const double h = breaks_[p + 1] - a;
        double len = 0.0;
        for (int k = 0; k < kNodesPerPanel; ++k) {
            QuadratureNode q;
            q.t = a + h * rule.nodes[k];
            q.x = curve_.position(q.t);
            q.speed = curve_.speed(q.t);
            if (!(q.speed > 0.0) || !std::isfinite(q.speed))
                throw ConfigError(curve_.name() + ": degenerate parametrization at a quadrature node");
            q.normal = curve_.normal(q.t);
            q.weight = h * rule.weights[k];
            len += q.weight * q.speed;
            nodes_.push_back(q);
        }
        arclength_[p] = len;
        for (int k = 0; k < 5; ++k)
            probes_[p][k] = curve_.position(a + h * k / 4.0);
    }
}

double PanelQuadrature::distance_to_panel(int p, const Point& x) const
{
    double d = std::numeric_limits<double>::infinity();
    const auto& pr = probes_[p];
    for (int k = 0; k + 1 < 5; ++k) {
        // distance to the chord between consecutive probes
        const Point e = pr[k + 1] - pr[k];
        const double ee = e.squaredNorm();
        double r = ee > 0.0 ? (x - pr[k]).dot(e) / ee : 0.0;
        r = std::clamp(r, 0.0, 1.0);
        d = std::min(d, (x - pr[k] - r * e).norm());
    }
    return d;
}

int PanelQuadrature::locate(double t) const
{
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    int p = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(p, 0, n_panels() - 1);
}

double PanelQuadrature::integrate(const Eigen::VectorXd& values) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        sum += nodes_[i].weight * nodes_[i].speed * values[static_cast<Eigen::Index>(i)];
    return sum;
}

double PanelQuadrature::total_length() const
{
    double sum = 0.0;
    for (double l : arclength_)
        sum += l;
    return sum;
}

std::array<double, 3> PanelQuadrature::local_basis(double r)
{
    const double r0 = kCollocationOffset, r1 = 0.5, r2 = 1.0 - kCollocationOffset;
    return {(r - r1) * (r - r2) / ((r0 - r1) * (r0 - r2)), (r - r0) * (r - r2) / ((r1 - r0) * (r1 - r2)),
            (r - r0) * (r - r1) / ((r2 - r0) * (r2 - r1))};
}

double PanelQuadrature::interpolate(const Eigen::VectorXd& values, double t) const
{
    const int p = locate(t);
    const auto l = local_basis((t - breaks_[p]) / (breaks_[p + 1] - breaks_[p]));
    const Eigen::Index base = static_cast<Eigen::Index>(p) * kNodesPerPanel;
    return l[0] * values[base] + l[1] * values[base + 1] + l[2] * values[base + 2];
}

PanelQuadrature build_panels(const BoundaryCurve& curve) { return PanelQuadrature(curve); }

Eigen::VectorXd sample(const PanelQuadrature& quad, const std::function<double(const QuadratureNode&)>& f)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(quad.size()));
    for (std::size_t i = 0; i < quad.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = f(quad.node(i));
    return v;
}

// ---------------------------------------------------------------- problem spec

ProblemSpec ProblemSpec::with_panels(int n_panels) const
{
    ProblemSpec copy = *this;
    copy.gamma_n = gamma_n.with_panels(n_panels);
    copy.gamma_d = gamma_d.with_panels(n_panels);
    copy.gamma_c = gamma_c.with_panels(n_panels);
    copy.description = update_description(description, "nf", n_panels);
    return copy;
}

ProblemSpec ProblemSpec::with_gamma(double value) const
{
    ProblemSpec copy = *this;
    copy.gamma = [value](double) { return value; };
    copy.description = update_description(description, "gamma", value);
    set_example_levels(copy, value);
    return copy;
}

double ProblemSpec::gamma_min() const
{
    const PanelQuadrature q(gamma_c);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& node : q.nodes()) {
        const double g = gamma(node.t);
        if (!std::isfinite(g))
            return std::numeric_limits<double>::quiet_NaN();
        m = std::min(m, g);
    }
    return m;
}

double ProblemSpec::gamma_max() const
{
    const PanelQuadrature q(gamma_c);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& node : q.nodes()) {
        const double g = gamma(node.t);
        if (!std::isfinite(g))
            return std::numeric_limits<double>::quiet_NaN();
        m = std::max(m, g);
    }
    return m;
}

std::string ProblemSpec::hash() const { return sha256_hex(description).substr(0, 16); }

void validate(const ProblemSpec& spec)
{
    if (!spec.gamma || !spec.region || !spec.in_domain)
        throw ConfigError("problem spec is missing the coefficient or region callbacks");
    for (const BoundaryCurve* c : {&spec.gamma_n, &spec.gamma_d, &spec.gamma_c})
        (void)PanelQuadrature(*c); // panel count, corners, nondegenerate speed

    if (!spec.dirichlet_on_c) {
        const double lo = spec.gamma_min();
        const double hi = spec.gamma_max();
        if (!(lo > 0.0) || !std::isfinite(hi))
            throw ConfigError("corrosion coefficient must be finite and positive at every Gamma_C node "
                              "(0 < gamma_min <= gamma <= gamma_max)");
    }
    validate_loop(spec.gamma_n, spec.gamma_d, "healthy object");
    validate_loop(spec.gamma_n, spec.gamma_c, "corroded object");
}

ProblemSpec make_example(int id, int n_panels, double gamma)
{
    if (n_panels < 4)
        throw ConfigError("make_example: n_f must be at least 4");
    ProblemSpec spec;
    spec.example_id = id;
    switch (id) {
    case 1: {
        const double L = 2.0 * kPi;
        spec.gamma_n = BoundaryCurve(
            "Gamma_N", 0.0, L, [L](double t) -> Point { return {L - t, 0.0}; },
            [](double) -> Point { return {-1.0, 0.0}; }, {}, n_panels);
        spec.gamma_d = make_polyline("Gamma_D", {{0.0, 0.0}, {0.0, -L}, {L, -L}, {L, 0.0}}, n_panels);
        spec.gamma_c = make_polyline(
            "Gamma_C", {{0.0, 0.0}, {kPi / 2, -1.5 * kPi}, {1.5 * kPi, -1.5 * kPi}, {L, 0.0}}, n_panels);
        spec.in_domain = [L](const Point& z) { return z.x() > 0 && z.x() < L && z.y() < 0 && z.y() > -L; };
        auto inside_d = spec.in_domain;
        spec.region = [inside_d, L](const Point& z) {
            if (!inside_d(z))
                return Region::Outside;
            const bool trapezoid = z.y() >= -1.5 * kPi && z.x() >= -z.y() / 3.0 && z.x() <= L + z.y() / 3.0;
            return trapezoid ? Region::Healthy : Region::Omega;
        };
        spec.basis_frequency = 1.0;
        spec.imaging_bounds = {0.0, L, -L, 0.0};
        break;
    }
    case 2: {
        spec.gamma_n = make_circle_arc("Gamma_N", {0.0, 0.0}, 1.0, 0.0, kPi / 2, n_panels);
        spec.gamma_d = make_polyline("Gamma_D", {{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}}, n_panels);
        spec.gamma_c = make_polyline("Gamma_C", {{0.0, 1.0}, {1.0, 0.0}}, n_panels);
        spec.in_domain = [](const Point& z) { return z.x() > 0 && z.y() > 0 && z.squaredNorm() < 1.0; };
        auto inside_d = spec.in_domain;
        spec.region = [inside_d](const Point& z) {
            if (!inside_d(z))
                return Region::Outside;
            return z.x() + z.y() >= 1.0 ? Region::Healthy : Region::Omega;
        };
        spec.basis_frequency = 4.0;
        spec.imaging_bounds = {0.0, 1.0, 0.0, 1.0};
        break;
    }
    case 3: {
        spec.gamma_n = make_ellipse_arc("Gamma_N", {0.0, 0.0}, 1.1, 1.0, 0.0, kPi, n_panels);
        spec.gamma_d = make_ellipse_arc("Gamma_D", {0.0, 0.0}, 1.1, 1.0, kPi, 2.0 * kPi, n_panels);
        spec.gamma_c = make_ellipse_arc("Gamma_C", {0.0, 0.0}, 1.1, 0.5, kPi, 2.0 * kPi, n_panels);
        spec.in_domain = [](const Point& z) {
            return z.x() * z.x() / 1.21 + z.y() * z.y() < 1.0;
        };
        auto inside_d = spec.in_domain;
        spec.region = [inside_d](const Point& z) {
            if (!inside_d(z))
                return Region::Outside;
            if (z.y() >= 0.0 || z.x() * z.x() / 1.21 + 4.0 * z.y() * z.y() <= 1.0)
                return Region::Healthy;
            return Region::Omega;
        };
        spec.basis_frequency = 2.0;
        spec.imaging_bounds = {-1.1, 1.1, -1.1, 1.1};
        break;
    }
    default:
        throw ConfigError("unknown example id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
    spec.gamma = [gamma](double) { return gamma; };
    spec.description = nlohmann::json{{"example", id}, {"gamma", gamma}, {"nf", n_panels}}.dump();
    set_example_levels(spec, gamma);
    validate(spec);
    return spec;
}

ProblemSpec make_degenerate(const ProblemSpec& spec)
{
    ProblemSpec copy = spec;
    copy.gamma_c = spec.gamma_d.renamed("Gamma_C");
    copy.dirichlet_on_c = true;
    copy.region = [in = spec.in_domain](const Point& z) { return in(z) ? Region::Healthy : Region::Outside; };
    copy.description = update_description(spec.description, "degenerate", true);
    return copy;
}

int winding_number(std::span<const Point> loop, const Point& p)
{
    int wn = 0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = loop[i];
        const Point& b = loop[(i + 1) % n];
        const double side = cross(b - a, p - a);
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && side > 0)
                ++wn;
        } else if (b.y() <= p.y() && side < 0) {
            --wn;
        }
    }
    return wn;
}

double signed_area(std::span<const Point> loop)
{
    double area = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i)
        area += cross(loop[i], loop[(i + 1) % n]);
    return 0.5 * area;
}

} // namespace corrosion
