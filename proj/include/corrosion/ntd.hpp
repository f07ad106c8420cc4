#pragma once

#include "corrosion/bem.hpp"
#include "corrosion/geometry.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string>

namespace corrosion {

/// Measure used in the Galerkin integrals over Γ_N.
enum class Measure { ArcLength, Parameter };

const char* to_string(Measure m);
Measure parse_measure(const std::string& text);

/// φ_n(t) = cos(k n (t - t_begin)), n = 0..nb.
struct FourierBasis {
    int nb = 19;
    double k = 1.0;
    double t_begin = 0.0;
    double t_end = 1.0;

    Eigen::Index size() const { return nb + 1; }
    double operator()(int n, double t) const;
};

/// Basis on the Γ_N parameter interval with the spec's frequency multiplier.
FourierBasis make_basis(const ProblemSpec& spec, int nb = 19);

/// Node values φ_n(t_i): one column per basis function.
Eigen::MatrixXd basis_values(const PanelQuadrature& arc_n, const FourierBasis& basis);

/// Pᵀ f approximates (∫ φ_m f ds)_m for node values f.
Eigen::MatrixXd basis_projector(const PanelQuadrature& arc_n, const FourierBasis& basis, Measure measure);

/// Galerkin matrix of Λ − Λ₀.
struct NtdGapMatrix {
    Eigen::MatrixXd B;
    FourierBasis basis;
    std::string spec_hash;
    int nf = 0;
    Measure measure = Measure::ArcLength;
    /// ‖B₀‖_F for the Galerkin matrix B₀ of Λ₀ alone (scale for B).
    double healthy_norm = 0.0;

    /// ‖B − Bᵀ‖_F / ‖B‖_F (0 for B = 0).
    double symmetry_defect() const;
};

NtdGapMatrix assemble_gap_matrix(const ProblemSpec& spec, const FourierBasis& basis,
                                 Measure measure = Measure::ArcLength, int jobs = 1);
/// Same, reusing existing factorizations.
NtdGapMatrix assemble_gap_matrix(const HealthySolver& healthy, const CorrodedSolver& corroded,
                                 const ProblemSpec& spec, const FourierBasis& basis,
                                 Measure measure = Measure::ArcLength);

/// z ↦ b^(z).
class RhsProvider {
public:
    virtual ~RhsProvider() = default;
    virtual Eigen::Index size() const = 0;
    virtual Eigen::VectorXd operator()(const Point& z) const = 0;
    /// One column per point.
    virtual Eigen::MatrixXd batch(std::span<const Point> zs, int jobs = 1) const;
};

/// b^(z)_m = ∫ φ_m 𝔾(·, z) ds. The Galerkin projection of the trace operator
/// is folded through the transposed factorization once, so each point costs a
/// single (N_B+1) × (unknowns) product.
class GreenRhsProvider : public RhsProvider {
public:
    GreenRhsProvider(std::shared_ptr<const HealthySolver> healthy, const FourierBasis& basis,
                     Measure measure = Measure::ArcLength);

    Eigen::Index size() const override { return projector_.cols(); }
    Eigen::VectorXd operator()(const Point& z) const override;

    const HealthySolver& solver() const { return *healthy_; }

private:
    std::shared_ptr<const HealthySolver> healthy_;
    Eigen::MatrixXd projector_; // nodes x basis
    Eigen::MatrixXd folded_;    // basis x unknowns
};

/// b^(z) via a full Green's function solve and projection of its trace.
Eigen::VectorXd assemble_rhs(const ProblemSpec& spec, const FourierBasis& basis, const Point& z,
                             Measure measure = Measure::ArcLength);

/// SVD of the symmetrized matrix (B + Bᵀ)/2.
struct GapSVD {
    Eigen::VectorXd sigma; ///< descending
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;
};

GapSVD gap_svd(const NtdGapMatrix& B);
GapSVD gap_svd(const Eigen::MatrixXd& B);

} // namespace corrosion
