#include "corrosion/ntd.hpp"

#include "corrosion/errors.hpp"
#include "corrosion/kernels.hpp"
#include "corrosion/parallel.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace corrosion {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(Measure m) { return m == Measure::ArcLength ? "arc_length" : "parameter"; }

Measure parse_measure(const std::string& text)
{
    if (text == "arc_length" || text == "arclength")
        return Measure::ArcLength;
    if (text == "parameter")
        return Measure::Parameter;
    throw ConfigError("unknown measure '" + text + "' (expected arc_length or parameter)");
}

double FourierBasis::operator()(int n, double t) const { return std::cos(k * n * (t - t_begin)); }

FourierBasis make_basis(const ProblemSpec& spec, int nb)
{
    if (nb < 0)
        throw ConfigError("basis size N_B must be nonnegative");
    return FourierBasis{nb, spec.basis_frequency, spec.gamma_n.t_begin(), spec.gamma_n.t_end()};
}

MatrixXd basis_values(const PanelQuadrature& arc_n, const FourierBasis& basis)
{
    MatrixXd v(static_cast<Index>(arc_n.size()), basis.size());
    for (std::size_t i = 0; i < arc_n.size(); ++i)
        for (int n = 0; n < basis.size(); ++n)
            v(static_cast<Index>(i), n) = basis(n, arc_n.node(i).t);
    return v;
}

MatrixXd basis_projector(const PanelQuadrature& arc_n, const FourierBasis& basis, Measure measure)
{
    MatrixXd p = basis_values(arc_n, basis);
    for (std::size_t i = 0; i < arc_n.size(); ++i) {
        const auto& q = arc_n.node(i);
        p.row(static_cast<Index>(i)) *= q.weight * (measure == Measure::ArcLength ? q.speed : 1.0);
    }
    return p;
}

double NtdGapMatrix::symmetry_defect() const
{
    const double norm = B.norm();
    return norm > 0.0 ? (B - B.transpose()).norm() / norm : 0.0;
}

NtdGapMatrix assemble_gap_matrix(const HealthySolver& healthy, const CorrodedSolver& corroded,
                                 const ProblemSpec& spec, const FourierBasis& basis, Measure measure)
{
    const PanelQuadrature& arc_n = healthy.arc_n();
    const MatrixXd currents = basis_values(arc_n, basis);
    const MatrixXd proj = basis_projector(arc_n, basis, measure);
    const MatrixXd u0 = healthy.solve_traces(currents);
    const MatrixXd u = corroded.solve_traces(currents);
    for (Index n = 0; n < currents.cols(); ++n) {
        if (!u0.col(n).allFinite() || !u.col(n).allFinite())
            throw SolverError("non-finite Gamma_N trace for basis function n=" + std::to_string(n));
    }

    NtdGapMatrix out;
    out.B = proj.transpose() * (u - u0);
    out.basis = basis;
    out.spec_hash = spec.hash();
    out.nf = spec.gamma_n.n_panels();
    out.measure = measure;
    out.healthy_norm = (proj.transpose() * u0).norm();
    return out;
}

NtdGapMatrix assemble_gap_matrix(const ProblemSpec& spec, const FourierBasis& basis, Measure measure, int jobs)
{
    const HealthySolver healthy(spec, jobs);
    const CorrodedSolver corroded(spec, jobs);
    return assemble_gap_matrix(healthy, corroded, spec, basis, measure);
}

MatrixXd RhsProvider::batch(std::span<const Point> zs, int jobs) const
{
    MatrixXd out(size(), static_cast<Index>(zs.size()));
    parallel_for(zs.size(), jobs, [&](std::size_t j) { out.col(static_cast<Index>(j)) = (*this)(zs[j]); });
    return out;
}

GreenRhsProvider::GreenRhsProvider(std::shared_ptr<const HealthySolver> healthy, const FourierBasis& basis,
                                   Measure measure)
    : healthy_(std::move(healthy)), projector_(basis_projector(healthy_->arc_n(), basis, measure))
{
    // b = Pᵀ (Tr A⁻¹ r(z) + Φ_N(z)) = (A⁻ᵀ Trᵀ P)ᵀ r(z) + Pᵀ Φ_N(z)
    const MatrixXd lifted = healthy_->trace_operator().transpose() * projector_;
    folded_ = healthy_->solve_transposed(lifted).transpose();
}

VectorXd GreenRhsProvider::operator()(const Point& z) const
{
    healthy_->check_source(z);
    const PanelQuadrature& arc_n = healthy_->arc_n();
    VectorXd direct(static_cast<Index>(arc_n.size()));
    for (std::size_t i = 0; i < arc_n.size(); ++i)
        direct[static_cast<Index>(i)] = phi(arc_n.node(i).x, z);
    return folded_ * healthy_->green_rhs(z) + projector_.transpose() * direct;
}

VectorXd assemble_rhs(const ProblemSpec& spec, const FourierBasis& basis, const Point& z, Measure measure)
{
    const HealthySolver healthy(spec);
    const TraceField trace = healthy.green_trace(z);
    return basis_projector(healthy.arc_n(), basis, measure).transpose() * trace.values;
}

GapSVD gap_svd(const MatrixXd& B)
{
    const MatrixXd sym = 0.5 * (B + B.transpose());
    Eigen::JacobiSVD<MatrixXd> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

GapSVD gap_svd(const NtdGapMatrix& B) { return gap_svd(B.B); }

} // namespace corrosion
