#pragma once

#include "corrosion/bem.hpp"
#include "corrosion/geometry.hpp"
#include "corrosion/ntd.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace corrosion {

/// Outcome of one numerical check. `measured` is a defect (pass when
/// measured <= tolerance) or a slack (pass when measured >= -tolerance).
struct DiagnosticReport {
    std::string name;
    nlohmann::json quantities = nlohmann::json::object();
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string provenance;

    nlohmann::json to_json() const;
};

/// -(u - u0)(z) against ∫_{Γ_C} u [∂_ν𝔾(·,z) + γ 𝔾(·,z)] ds for one current.
/// The relative defect is |L - R| / max(|L|, |R|, 1e-10 |u0(z)|).
DiagnosticReport check_representation(const ProblemSpec& spec, const BoundaryFunction& g, const Point& z,
                                      double tolerance = 1e-2, int jobs = 1);

/// Same with solvers already built (lets callers sweep probes and currents).
DiagnosticReport check_representation(const HealthySolver& healthy, const CorrodedSolver& corroded,
                                      const ProblemSpec& spec, const BoundaryFunction& g, const Point& z,
                                      double tolerance = 1e-2);

/// ∫_{Γ_C}(γ1 − γ2)|u_{γ2}|² ds − ∫_{Γ_N} g (Λ_{γ2} − Λ_{γ1}) g ds for every
/// current, in both orderings of (spec1, spec2). Reports the minimum slack.
DiagnosticReport check_monotonicity(const ProblemSpec& spec1, const ProblemSpec& spec2,
                                    const std::vector<BoundaryFunction>& currents, double tolerance = 1e-6,
                                    int jobs = 1);

/// Symmetry defect of B for each n_f; passes when strictly decreasing and the
/// last value is within tolerance.
DiagnosticReport check_selfadjoint(const ProblemSpec& spec, const FourierBasis& basis,
                                   const std::vector<int>& nfs = {75, 150, 300}, double tolerance = 1e-2,
                                   Measure measure = Measure::ArcLength, int jobs = 1);

/// Picard partial sums over `truncations` (numbers of retained singular
/// values); growth ratio = last / first. Passes when the median ratio over
/// z_outside exceeds the median over z_inside.
DiagnosticReport check_range_dichotomy(const GapSVD& svd, const RhsProvider& rhs,
                                       const std::vector<Point>& z_inside, const std::vector<Point>& z_outside,
                                       const std::vector<int>& truncations);

/// Growth ratio of the Picard partial sums of one right-hand side.
double picard_growth_ratio(const GapSVD& svd, const Eigen::VectorXd& b, const std::vector<int>& truncations);

/// Up to `count` points of D∖Ω̄ kept at least `min_clearance` panel lengths
/// from every boundary arc, spread out greedily. Deterministic.
std::vector<Point> default_probes(const ProblemSpec& spec, Region region, std::size_t count,
                                  double min_clearance = 2.0);

/// Current cos(k n (t - t_begin)) on Γ_N.
BoundaryFunction cosine_current(const ProblemSpec& spec, int n);

struct VerifyOptions {
    std::size_t probes = 3;
    int currents = 5;
    int nb = 19;
    double representation_tolerance = 1e-2;
    double monotonicity_tolerance = 1e-6;
    double symmetry_tolerance = 1e-2;
    Measure measure = Measure::ArcLength;
    int jobs = 1;
};

/// All checks for one spec (used by the verify subcommand).
std::vector<DiagnosticReport> run_diagnostics(const ProblemSpec& spec, const VerifyOptions& options);

} // namespace corrosion
