#pragma once

#include "corrosion/geometry.hpp"
#include "corrosion/kernels.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace corrosion {

/// Which block system produced a density.
enum class SystemTag { Healthy, Corroded, Green };

const char* to_string(SystemTag tag);

/// Function on Γ_N evaluated at its collocation nodes.
using BoundaryFunction = std::function<double(const QuadratureNode&)>;

/// Description of one block of a 2x2 block operator.
struct Block {
    std::string row_arc; ///< arc carrying the collocation (target) nodes
    std::string col_arc; ///< arc carrying the density
    std::string kind;    ///< e.g. "S", "T", "I/2+T", "T+gamma*S"
};

/// Assembled block system. Unknowns are (φ|_{Γ_N}, φ|_B) with B = Γ_D or Γ_C;
/// rows are ordered (equation on B, equation on Γ_N).
struct BlockOperator {
    Eigen::MatrixXd matrix;
    std::array<Block, 4> blocks; ///< row-major: (B,N) (B,B) (N,N) (N,B)
    Eigen::Index n_rows_b = 0;   ///< rows of the first block row
    Eigen::Index n_cols_n = 0;   ///< columns of the first block column
};

/// Single-layer densities on both arcs of a block system.
struct DensitySolution {
    SystemTag tag = SystemTag::Healthy;
    std::shared_ptr<const PanelQuadrature> arc_n;
    std::shared_ptr<const PanelQuadrature> arc_b;
    Eigen::VectorXd phi_n;
    Eigen::VectorXd phi_b;
    std::optional<Point> source; ///< z for the Green's function system

    Eigen::VectorXd values() const;
};

/// Values of a potential at the Γ_N collocation nodes.
struct TraceField {
    SystemTag tag = SystemTag::Healthy;
    std::shared_ptr<const PanelQuadrature> arc;
    Eigen::VectorXd values;
    bool near_boundary = false; ///< source point closer to ∂D than one panel length
};

struct FieldValue {
    double value = 0.0;
    bool near_boundary = false; ///< refined quadrature was needed
};

/// Neumann–Dirichlet problem on the healthy object D and its mixed Green's
/// function. The block matrix is factorized once; every solve reuses it.
class HealthySolver {
public:
    explicit HealthySolver(const ProblemSpec& spec, int jobs = 1);

    const BlockOperator& op() const { return op_; }
    const PanelQuadrature& arc_n() const { return *arc_n_; }
    const PanelQuadrature& arc_d() const { return *arc_d_; }
    double rcond() const { return rcond_; }

    /// Node values of g on Γ_N; optional Dirichlet data at the Γ_D nodes.
    DensitySolution solve_density(const Eigen::VectorXd& g, const Eigen::VectorXd* dirichlet = nullptr) const;
    TraceField trace(const DensitySolution& d) const;

    /// Γ_N traces for several currents at once (one column per current).
    Eigen::MatrixXd solve_traces(const Eigen::MatrixXd& g) const;

    /// Density of the regular part w(·, z) of the mixed Green's function.
    DensitySolution green_density(const Point& z) const;
    /// 𝔾(·, z) = w(·, z) + Φ(·, z) at the Γ_N nodes.
    TraceField green_trace(const Point& z) const;
    /// One column per source point.
    Eigen::MatrixXd green_traces(std::span<const Point> zs, int jobs = 1) const;

    /// Right-hand side of the Green's function system for source z.
    Eigen::VectorXd green_rhs(const Point& z) const;

    /// Solves Aᵀ x = rhs column by column (used to project traces cheaply).
    Eigen::MatrixXd solve_transposed(const Eigen::MatrixXd& rhs) const;

    /// [S^{N→N}, S^{D→N}]: densities to Γ_N trace.
    const Eigen::MatrixXd& trace_operator() const { return trace_op_; }

    /// Throws DomainError if z is not strictly inside D; returns true when z is
    /// closer to ∂D than one panel length.
    bool check_source(const Point& z) const;

private:
    ProblemSpec spec_;
    std::shared_ptr<const PanelQuadrature> arc_n_;
    std::shared_ptr<const PanelQuadrature> arc_d_;
    BlockOperator op_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::MatrixXd trace_op_;
    double rcond_ = 0.0;
};

/// Neumann–Robin problem on the corroded object D∖Ω̄ (or the Dirichlet
/// variant when spec.dirichlet_on_c is set).
class CorrodedSolver {
public:
    explicit CorrodedSolver(const ProblemSpec& spec, int jobs = 1);

    const BlockOperator& op() const { return op_; }
    const PanelQuadrature& arc_n() const { return *arc_n_; }
    const PanelQuadrature& arc_c() const { return *arc_c_; }
    double rcond() const { return rcond_; }
    /// γ at the Γ_C nodes.
    const Eigen::VectorXd& gamma_nodes() const { return gamma_; }

    DensitySolution solve_density(const Eigen::VectorXd& g) const;
    TraceField trace(const DensitySolution& d) const;
    /// u at the Γ_C nodes.
    Eigen::VectorXd trace_c(const DensitySolution& d) const;
    Eigen::MatrixXd solve_traces(const Eigen::MatrixXd& g) const;

private:
    ProblemSpec spec_;
    std::shared_ptr<const PanelQuadrature> arc_n_;
    std::shared_ptr<const PanelQuadrature> arc_c_;
    BlockOperator op_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::MatrixXd trace_op_;   // [S^{N→N}, S^{C→N}]
    Eigen::MatrixXd trace_c_op_; // [S^{N→C}, S^{C→C}]
    Eigen::VectorXd gamma_;
    double rcond_ = 0.0;
};

/// Condition guard applied to every block factorization.
inline constexpr double kMaxConditionEstimate = 1e12;

Eigen::VectorXd sample_current(const PanelQuadrature& arc_n, const BoundaryFunction& g);

std::pair<DensitySolution, TraceField> solve_healthy(const ProblemSpec& spec, const BoundaryFunction& g);
std::pair<DensitySolution, TraceField> solve_corroded(const ProblemSpec& spec, const BoundaryFunction& g);
TraceField solve_green(const ProblemSpec& spec, const Point& z);

/// Single-layer potential of the density at x (both arcs).
FieldValue evaluate_interior(const DensitySolution& d, const Point& x);
/// Derivative of the single-layer potential at x in direction nu. x must be
/// off the boundary (no jump term is added).
FieldValue evaluate_normal_derivative(const DensitySolution& d, const Point& x, const Point& nu);
/// 𝔾(x, z) for a Green density: single layer plus Φ(x, z).
FieldValue evaluate_green(const DensitySolution& d, const Point& x);

} // namespace corrosion
