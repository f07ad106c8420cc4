#include "corrosion/diagnostics.hpp"

#include "corrosion/errors.hpp"
#include "corrosion/imaging.hpp"
#include "corrosion/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace corrosion {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double max_panel_length(const ProblemSpec& spec)
{
    double len = 0.0;
    for (const BoundaryCurve* c : {&spec.gamma_n, &spec.gamma_d, &spec.gamma_c}) {
        const PanelQuadrature q(*c);
        for (int p = 0; p < q.n_panels(); ++p)
            len = std::max(len, q.panel_arclength(p));
    }
    return len;
}

double clearance(const std::vector<const PanelQuadrature*>& arcs, const Point& z)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto* arc : arcs)
        for (int p = 0; p < arc->n_panels(); ++p)
            d = std::min(d, arc->distance_to_panel(p, z));
    return d;
}

struct GreenOnArc {
    VectorXd value;
    VectorXd normal_derivative;
};

// 𝔾(·,z) and ∂_ν𝔾(·,z) at the nodes of `arc`, which lies in D except possibly
// for coinciding with Γ_D (degenerate spec), in which case the interior limit
// of the normal derivative carries the jump φ/2.
GreenOnArc green_on_arc(const DensitySolution& green, const PanelQuadrature& arc, bool on_gamma_d)
{
    const Point z = *green.source;
    GreenOnArc out{VectorXd(static_cast<Index>(arc.size())), VectorXd(static_cast<Index>(arc.size()))};
    Eigen::RowVectorXd row_n(green.phi_n.size()), row_b(green.phi_b.size());
    for (std::size_t i = 0; i < arc.size(); ++i) {
        const auto& node = arc.node(i);
        const Target off{node.x, node.normal, std::nullopt};
        const Target on{node.x, node.normal, on_gamma_d ? std::optional<double>(node.t) : std::nullopt};
        const auto ii = static_cast<Index>(i);

        layer_row(LayerKind::Single, *green.arc_n, off, row_n);
        layer_row(LayerKind::Single, *green.arc_b, on, row_b);
        out.value[ii] = row_n.dot(green.phi_n) + row_b.dot(green.phi_b) + phi(node.x, z);

        layer_row(LayerKind::AdjointDouble, *green.arc_n, off, row_n);
        layer_row(LayerKind::AdjointDouble, *green.arc_b, on, row_b);
        double dn = row_n.dot(green.phi_n) + row_b.dot(green.phi_b) + dphi_dnu(node.x, z, node.normal);
        if (on_gamma_d)
            dn += 0.5 * green.phi_b[ii];
        out.normal_derivative[ii] = dn;
    }
    return out;
}

void require_same_geometry(const ProblemSpec& a, const ProblemSpec& b)
{
    auto same = [](const BoundaryCurve& x, const BoundaryCurve& y) {
        if (x.n_panels() != y.n_panels() || x.t_begin() != y.t_begin() || x.t_end() != y.t_end())
            return false;
        const auto px = x.sample(32), py = y.sample(32);
        for (std::size_t i = 0; i < px.size(); ++i)
            if ((px[i] - py[i]).norm() > 1e-12 * (1.0 + px[i].norm()))
                return false;
        return true;
    };
    if (!same(a.gamma_n, b.gamma_n) || !same(a.gamma_c, b.gamma_c))
        throw ConfigError("monotonicity check needs two specs that differ only in gamma");
}

} // namespace

nlohmann::json DiagnosticReport::to_json() const
{
    return {{"name", name},           {"measured", measured}, {"tolerance", tolerance},
            {"pass", pass},           {"provenance", provenance}, {"quantities", quantities}};
}

DiagnosticReport check_representation(const HealthySolver& healthy, const CorrodedSolver& corroded,
                                      const ProblemSpec& spec, const BoundaryFunction& g, const Point& z,
                                      double tolerance)
{
    if (!spec.dirichlet_on_c) {
        if (spec.region(z) != Region::Healthy)
            throw DomainError("representation probe must lie in D minus the closure of Omega");
        double len = 0.0;
        for (int p = 0; p < corroded.arc_c().n_panels(); ++p)
            len = std::max(len, corroded.arc_c().panel_arclength(p));
        if (clearance({&corroded.arc_c()}, z) < 2.0 * len)
            throw DomainError("representation probe is closer than two panel lengths to Gamma_C");
    }
    const VectorXd current = sample_current(healthy.arc_n(), g);
    const DensitySolution d0 = healthy.solve_density(current);
    const DensitySolution d = corroded.solve_density(current);
    const double u0 = evaluate_interior(d0, z).value;
    const double u = evaluate_interior(d, z).value;
    const double lhs = -(u - u0);

    const DensitySolution green = healthy.green_density(z);
    const GreenOnArc gc = green_on_arc(green, corroded.arc_c(), spec.dirichlet_on_c);
    const VectorXd uc = corroded.trace_c(d);
    const VectorXd integrand =
        uc.cwiseProduct(gc.normal_derivative + corroded.gamma_nodes().cwiseProduct(gc.value));
    const double rhs = corroded.arc_c().integrate(integrand);

    DiagnosticReport r;
    r.name = "representation";
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-10 * std::abs(u0)});
    r.measured = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    r.tolerance = tolerance;
    r.pass = r.measured <= tolerance;
    r.provenance = spec.hash();
    r.quantities = {{"z", {z.x(), z.y()}}, {"lhs", lhs},         {"rhs", rhs},
                    {"u0_z", u0},          {"u_z", u},           {"nf", spec.gamma_n.n_panels()}};
    return r;
}

DiagnosticReport check_representation(const ProblemSpec& spec, const BoundaryFunction& g, const Point& z,
                                      double tolerance, int jobs)
{
    const HealthySolver healthy(spec, jobs);
    const CorrodedSolver corroded(spec, jobs);
    return check_representation(healthy, corroded, spec, g, z, tolerance);
}

DiagnosticReport check_monotonicity(const ProblemSpec& spec1, const ProblemSpec& spec2,
                                    const std::vector<BoundaryFunction>& currents, double tolerance, int jobs)
{
    require_same_geometry(spec1, spec2);
    if (currents.empty())
        throw std::invalid_argument("monotonicity check needs at least one current");
    const CorrodedSolver c1(spec1, jobs);
    const CorrodedSolver c2(spec2, jobs);
    const VectorXd dgamma = c1.gamma_nodes() - c2.gamma_nodes();

    double min_slack = std::numeric_limits<double>::infinity();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < currents.size(); ++k) {
        const VectorXd g = sample_current(c1.arc_n(), currents[k]);
        const DensitySolution d1 = c1.solve_density(g);
        const DensitySolution d2 = c2.solve_density(g);
        const VectorXd un1 = c1.trace(d1).values, un2 = c2.trace(d2).values;
        const VectorXd uc1 = c1.trace_c(d1), uc2 = c2.trace_c(d2);

        // ordering (γ1, γ2) and the swapped one
        const double lhs12 = c1.arc_c().integrate(dgamma.cwiseProduct(uc2.cwiseAbs2()));
        const double rhs12 = c1.arc_n().integrate(g.cwiseProduct(un2 - un1));
        const double lhs21 = c1.arc_c().integrate((-dgamma).cwiseProduct(uc1.cwiseAbs2()));
        const double rhs21 = c1.arc_n().integrate(g.cwiseProduct(un1 - un2));
        const double s12 = lhs12 - rhs12, s21 = lhs21 - rhs21;
        min_slack = std::min({min_slack, s12, s21});
        rows.push_back({{"current", k},
                        {"lhs", lhs12},
                        {"rhs", rhs12},
                        {"slack", s12},
                        {"lhs_swapped", lhs21},
                        {"rhs_swapped", rhs21},
                        {"slack_swapped", s21}});
    }
    DiagnosticReport r;
    r.name = "monotonicity";
    r.measured = min_slack;
    r.tolerance = tolerance;
    r.pass = min_slack >= -tolerance;
    r.provenance = spec1.hash() + "," + spec2.hash();
    r.quantities = {{"currents", rows}, {"gamma1_max", spec1.gamma_max()}, {"gamma2_max", spec2.gamma_max()}};
    return r;
}

DiagnosticReport check_selfadjoint(const ProblemSpec& spec, const FourierBasis& basis, const std::vector<int>& nfs,
                                   double tolerance, Measure measure, int jobs)
{
    if (nfs.empty())
        throw std::invalid_argument("self-adjointness check needs at least one n_f");
    std::vector<double> defects;
    for (int nf : nfs)
        defects.push_back(assemble_gap_matrix(spec.with_panels(nf), basis, measure, jobs).symmetry_defect());
    bool decreasing = true;
    for (std::size_t i = 1; i < defects.size(); ++i)
        decreasing = decreasing && defects[i] < defects[i - 1];
    DiagnosticReport r;
    r.name = "selfadjoint";
    r.measured = defects.back();
    r.tolerance = tolerance;
    r.pass = decreasing && defects.back() <= tolerance;
    r.provenance = spec.hash();
    r.quantities = {{"nf", nfs}, {"symmetry_defect", defects}, {"strictly_decreasing", decreasing}};
    return r;
}

double picard_growth_ratio(const GapSVD& svd, const VectorXd& b, const std::vector<int>& truncations)
{
    if (truncations.empty())
        throw std::invalid_argument("no truncation levels");
    auto partial = [&](int count) {
        double s = 0.0;
        const int n = std::min<int>(count, static_cast<int>(svd.sigma.size()));
        for (int j = 0; j < n; ++j) {
            if (svd.sigma[j] <= 0.0)
                break;
            const double c = svd.U.col(j).dot(b);
            s += c * c / svd.sigma[j];
        }
        return s;
    };
    const double first = partial(truncations.front());
    const double last = partial(truncations.back());
    if (first == last)
        return 1.0;
    return first > 0.0 ? last / first : std::numeric_limits<double>::infinity();
}

DiagnosticReport check_range_dichotomy(const GapSVD& svd, const RhsProvider& rhs, const std::vector<Point>& z_inside,
                                       const std::vector<Point>& z_outside, const std::vector<int>& truncations)
{
    if (z_inside.empty() || z_outside.empty())
        throw std::invalid_argument("range dichotomy check needs points inside and outside Omega");
    std::vector<double> inside, outside;
    for (const auto& z : z_inside)
        inside.push_back(picard_growth_ratio(svd, rhs(z), truncations));
    for (const auto& z : z_outside)
        outside.push_back(picard_growth_ratio(svd, rhs(z), truncations));
    const double mi = median(inside), mo = median(outside);
    DiagnosticReport r;
    r.name = "range_dichotomy";
    r.measured = mo - mi;
    r.tolerance = 0.0;
    r.pass = mo > mi;
    r.quantities = {{"truncations", truncations}, {"ratios_inside", inside}, {"ratios_outside", outside},
                    {"median_inside", mi},        {"median_outside", mo}};
    return r;
}

std::vector<Point> default_probes(const ProblemSpec& spec, Region region, std::size_t count, double min_clearance)
{
    const PanelQuadrature qn(spec.gamma_n), qd(spec.gamma_d), qc(spec.gamma_c);
    const std::vector<const PanelQuadrature*> arcs{&qn, &qd, &qc};
    const double need = min_clearance * max_panel_length(spec);

    Point lo = spec.gamma_n.front(), hi = lo;
    for (const BoundaryCurve* c : {&spec.gamma_n, &spec.gamma_d})
        for (const auto& p : c->sample(64)) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    const double diam = (hi - lo).norm();

    struct Candidate {
        Point p;
        double clear;
    };
    std::vector<Candidate> candidates;
    constexpr int n = 48;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point p(lo.x() + (i + 0.5) * (hi.x() - lo.x()) / n, lo.y() + (j + 0.5) * (hi.y() - lo.y()) / n);
            if (!spec.in_domain(p) || spec.region(p) != region)
                continue;
            const double c = clearance(arcs, p);
            if (c >= need)
                candidates.push_back({p, c});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.clear > b.clear; });

    std::vector<Point> chosen;
    for (double spread = 0.25 * diam; chosen.size() < count && !candidates.empty(); spread *= 0.5) {
        for (const auto& c : candidates) {
            if (chosen.size() >= count)
                break;
            const bool far = std::all_of(chosen.begin(), chosen.end(),
                                         [&](const Point& q) { return (q - c.p).norm() >= spread; });
            if (far)
                chosen.push_back(c.p);
        }
        if (spread < 1e-9 * diam)
            break;
    }
    return chosen;
}

BoundaryFunction cosine_current(const ProblemSpec& spec, int n)
{
    const double k = spec.basis_frequency;
    const double t0 = spec.gamma_n.t_begin();
    return [k, t0, n](const QuadratureNode& q) { return std::cos(k * n * (q.t - t0)); };
}

std::vector<DiagnosticReport> run_diagnostics(const ProblemSpec& spec, const VerifyOptions& o)
{
    std::vector<DiagnosticReport> out;
    const FourierBasis basis = make_basis(spec, o.nb);
    auto healthy = std::make_shared<const HealthySolver>(spec, o.jobs);
    const CorrodedSolver corroded(spec, o.jobs);

    // Representation formula: worst defect over probes x currents.
    {
        DiagnosticReport worst;
        worst.name = "representation";
        worst.tolerance = o.representation_tolerance;
        worst.provenance = spec.hash();
        nlohmann::json cases = nlohmann::json::array();
        const auto probes = default_probes(spec, Region::Healthy, o.probes);
        for (const auto& z : probes) {
            for (int n = 1; n <= 3; ++n) {
                DiagnosticReport r = check_representation(*healthy, corroded, spec, cosine_current(spec, n), z,
                                                          o.representation_tolerance);
                r.quantities["current_index"] = n;
                cases.push_back(r.quantities);
                worst.measured = std::max(worst.measured, r.measured);
            }
        }
        worst.pass = !probes.empty() && worst.measured <= worst.tolerance;
        worst.quantities = {{"cases", cases}};
        out.push_back(worst);
    }

    // Monotonicity against the coefficient scaled by 4.
    {
        ProblemSpec other = spec;
        other.gamma = [g = spec.gamma](double t) { return 4.0 * g(t); };
        other.description = spec.description + "#gamma*4";
        std::vector<BoundaryFunction> currents;
        for (int n = 1; n <= o.currents; ++n)
            currents.push_back(cosine_current(spec, n));
        out.push_back(check_monotonicity(other, spec, currents, o.monotonicity_tolerance, o.jobs));
    }

    // Self-adjointness under refinement.
    {
        const int nf = spec.gamma_n.n_panels();
        std::vector<int> nfs;
        for (int f : {nf / 4, nf / 2, nf})
            if (f >= 4 && (nfs.empty() || f > nfs.back()))
                nfs.push_back(f);
        out.push_back(check_selfadjoint(spec, basis, nfs, o.symmetry_tolerance, o.measure, o.jobs));
    }

    // Range dichotomy surrogate.
    {
        const NtdGapMatrix B = assemble_gap_matrix(*healthy, corroded, spec, basis, o.measure);
        const GapSVD svd = gap_svd(B);
        const GreenRhsProvider rhs(healthy, basis, o.measure);
        int retained = 0;
        for (Index j = 0; j < svd.sigma.size(); ++j)
            retained += svd.sigma[j] > 1e-5 ? 1 : 0;
        std::vector<int> truncations;
        for (int t = 1; t <= std::max(retained, 2); ++t)
            truncations.push_back(t);
        DiagnosticReport r = check_range_dichotomy(svd, rhs, default_probes(spec, Region::Omega, 9),
                                                   default_probes(spec, Region::Healthy, 9), truncations);
        r.provenance = spec.hash();
        out.push_back(r);
    }
    return out;
}

} // namespace corrosion
