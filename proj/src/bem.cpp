#include "corrosion/bem.hpp"

#include "corrosion/errors.hpp"
#include "corrosion/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace corrosion {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::shared_ptr<const PanelQuadrature> panels_of(const BoundaryCurve& c)
{
    return std::make_shared<const PanelQuadrature>(c);
}

double factorize(Eigen::PartialPivLU<MatrixXd>& lu, const BlockOperator& op, const std::string& system)
{
    lu.compute(op.matrix);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || !std::isfinite(rc) || 1.0 / rc > kMaxConditionEstimate) {
        std::ostringstream msg;
        msg << system << " system is singular or ill-conditioned (condition estimate "
            << (rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity()) << " > " << kMaxConditionEstimate
            << "); blocks [" << op.blocks[0].kind << "(" << op.blocks[0].col_arc << "->" << op.blocks[0].row_arc
            << "), " << op.blocks[1].kind << "(" << op.blocks[1].col_arc << "->" << op.blocks[1].row_arc << "); "
            << op.blocks[2].kind << "(" << op.blocks[2].col_arc << "->" << op.blocks[2].row_arc << "), "
            << op.blocks[3].kind << "(" << op.blocks[3].col_arc << "->" << op.blocks[3].row_arc << ")]";
        throw SolverError(msg.str());
    }
    return rc;
}

BlockOperator stack(const MatrixXd& b_n, const MatrixXd& b_b, const MatrixXd& n_n, const MatrixXd& n_b,
                    std::array<Block, 4> blocks)
{
    BlockOperator op;
    op.n_rows_b = b_n.rows();
    op.n_cols_n = b_n.cols();
    op.matrix.resize(b_n.rows() + n_n.rows(), b_n.cols() + b_b.cols());
    op.matrix << b_n, b_b, n_n, n_b;
    op.blocks = std::move(blocks);
    return op;
}

MatrixXd half_identity_plus(MatrixXd m)
{
    m.diagonal().array() += 0.5;
    return m;
}

DensitySolution split(SystemTag tag, const std::shared_ptr<const PanelQuadrature>& n,
                      const std::shared_ptr<const PanelQuadrature>& b, const VectorXd& x)
{
    DensitySolution d;
    d.tag = tag;
    d.arc_n = n;
    d.arc_b = b;
    const auto nn = static_cast<Index>(n->size());
    d.phi_n = x.head(nn);
    d.phi_b = x.tail(x.size() - nn);
    return d;
}

FieldValue layer_value(LayerKind kind, const DensitySolution& d, const Point& x, const Point& nu)
{
    const Target target{x, nu, std::nullopt};
    Eigen::RowVectorXd row_n(d.phi_n.size());
    Eigen::RowVectorXd row_b(d.phi_b.size());
    const bool near_n = layer_row(kind, *d.arc_n, target, row_n);
    const bool near_b = layer_row(kind, *d.arc_b, target, row_b);
    return {row_n.dot(d.phi_n) + row_b.dot(d.phi_b), near_n || near_b};
}

void check_current(const VectorXd& g, std::size_t n)
{
    if (static_cast<std::size_t>(g.size()) != n)
        throw std::invalid_argument("current has " + std::to_string(g.size()) + " node values, expected " +
                                    std::to_string(n));
}

} // namespace

const char* to_string(SystemTag tag)
{
    switch (tag) {
    case SystemTag::Healthy:
        return "healthy";
    case SystemTag::Corroded:
        return "corroded";
    case SystemTag::Green:
        return "green";
    }
    return "unknown";
}

VectorXd DensitySolution::values() const
{
    VectorXd v(phi_n.size() + phi_b.size());
    v << phi_n, phi_b;
    return v;
}

// ---------------------------------------------------------------- healthy

HealthySolver::HealthySolver(const ProblemSpec& spec, int jobs)
    : spec_(spec), arc_n_(panels_of(spec.gamma_n)), arc_d_(panels_of(spec.gamma_d))
{
    const auto& n = *arc_n_;
    const auto& d = *arc_d_;
    const MatrixXd s_nd = layer_matrix(LayerKind::Single, d, n, false, jobs);
    const MatrixXd s_dd = layer_matrix(LayerKind::Single, d, d, true, jobs);
    const MatrixXd t_nn = layer_matrix(LayerKind::AdjointDouble, n, n, true, jobs);
    const MatrixXd t_dn = layer_matrix(LayerKind::AdjointDouble, n, d, false, jobs);
    const std::string nn = n.curve().name(), dn = d.curve().name();
    op_ = stack(s_nd, s_dd, half_identity_plus(t_nn), t_dn,
                {Block{dn, nn, "S"}, Block{dn, dn, "S"}, Block{nn, nn, "I/2+T"}, Block{nn, dn, "T"}});
    rcond_ = factorize(lu_, op_, "healthy");

    const MatrixXd s_nn = layer_matrix(LayerKind::Single, n, n, true, jobs);
    const MatrixXd s_dn = layer_matrix(LayerKind::Single, n, d, false, jobs);
    trace_op_.resize(s_nn.rows(), s_nn.cols() + s_dn.cols());
    trace_op_ << s_nn, s_dn;
}

DensitySolution HealthySolver::solve_density(const VectorXd& g, const VectorXd* dirichlet) const
{
    check_current(g, arc_n_->size());
    VectorXd rhs = VectorXd::Zero(op_.matrix.rows());
    if (dirichlet) {
        if (dirichlet->size() != op_.n_rows_b)
            throw std::invalid_argument("Dirichlet data size does not match the Gamma_D nodes");
        rhs.head(op_.n_rows_b) = *dirichlet;
    }
    rhs.tail(g.size()) = g;
    return split(SystemTag::Healthy, arc_n_, arc_d_, lu_.solve(rhs));
}

TraceField HealthySolver::trace(const DensitySolution& d) const
{
    return {d.tag, arc_n_, trace_op_ * d.values(), false};
}

MatrixXd HealthySolver::solve_traces(const MatrixXd& g) const
{
    MatrixXd rhs = MatrixXd::Zero(op_.matrix.rows(), g.cols());
    rhs.bottomRows(g.rows()) = g;
    return trace_op_ * lu_.solve(rhs);
}

bool HealthySolver::check_source(const Point& z) const
{
    if (!spec_.in_domain(z)) {
        std::ostringstream msg;
        msg << "source point (" << z.x() << ", " << z.y() << ") is not inside D";
        throw DomainError(msg.str());
    }
    bool near = false;
    for (const PanelQuadrature* arc : {arc_n_.get(), arc_d_.get()}) {
        for (int p = 0; p < arc->n_panels(); ++p) {
            const double dist = arc->distance_to_panel(p, z);
            const double len = arc->panel_arclength(p);
            if (dist <= 1e-12 * len) {
                std::ostringstream msg;
                msg << "source point (" << z.x() << ", " << z.y() << ") lies on the boundary of D";
                throw DomainError(msg.str());
            }
            near = near || dist < len;
        }
    }
    return near;
}

VectorXd HealthySolver::green_rhs(const Point& z) const
{
    VectorXd rhs(op_.matrix.rows());
    const auto& d = *arc_d_;
    const auto& n = *arc_n_;
    for (std::size_t i = 0; i < d.size(); ++i)
        rhs[static_cast<Index>(i)] = -phi(d.node(i).x, z);
    const auto off = static_cast<Index>(d.size());
    for (std::size_t i = 0; i < n.size(); ++i)
        rhs[off + static_cast<Index>(i)] = -dphi_dnu(n.node(i).x, z, n.node(i).normal);
    return rhs;
}

DensitySolution HealthySolver::green_density(const Point& z) const
{
    check_source(z);
    DensitySolution d = split(SystemTag::Green, arc_n_, arc_d_, lu_.solve(green_rhs(z)));
    d.source = z;
    return d;
}

TraceField HealthySolver::green_trace(const Point& z) const
{
    const bool near = check_source(z);
    VectorXd w = trace_op_ * lu_.solve(green_rhs(z));
    for (std::size_t i = 0; i < arc_n_->size(); ++i)
        w[static_cast<Index>(i)] += phi(arc_n_->node(i).x, z);
    return {SystemTag::Green, arc_n_, std::move(w), near};
}

MatrixXd HealthySolver::green_traces(std::span<const Point> zs, int jobs) const
{
    MatrixXd rhs(op_.matrix.rows(), static_cast<Index>(zs.size()));
    parallel_for(zs.size(), jobs, [&](std::size_t j) {
        check_source(zs[j]);
        rhs.col(static_cast<Index>(j)) = green_rhs(zs[j]);
    });
    MatrixXd traces = trace_op_ * lu_.solve(rhs);
    for (std::size_t j = 0; j < zs.size(); ++j)
        for (std::size_t i = 0; i < arc_n_->size(); ++i)
            traces(static_cast<Index>(i), static_cast<Index>(j)) += phi(arc_n_->node(i).x, zs[j]);
    return traces;
}

MatrixXd HealthySolver::solve_transposed(const MatrixXd& rhs) const { return lu_.transpose().solve(rhs); }

// ---------------------------------------------------------------- corroded

CorrodedSolver::CorrodedSolver(const ProblemSpec& spec, int jobs)
    : spec_(spec), arc_n_(panels_of(spec.gamma_n)), arc_c_(panels_of(spec.gamma_c))
{
    const auto& n = *arc_n_;
    const auto& c = *arc_c_;
    gamma_ = sample(c, [&](const QuadratureNode& q) { return spec.gamma(q.t); });

    const MatrixXd s_nc = layer_matrix(LayerKind::Single, c, n, false, jobs);
    const MatrixXd s_cc = layer_matrix(LayerKind::Single, c, c, true, jobs);
    const MatrixXd t_nn = layer_matrix(LayerKind::AdjointDouble, n, n, true, jobs);
    const MatrixXd t_cn = layer_matrix(LayerKind::AdjointDouble, n, c, false, jobs);
    const std::string nn = n.curve().name(), cn = c.curve().name();

    if (spec.dirichlet_on_c) {
        op_ = stack(s_nc, s_cc, half_identity_plus(t_nn), t_cn,
                    {Block{cn, nn, "S"}, Block{cn, cn, "S"}, Block{nn, nn, "I/2+T"}, Block{nn, cn, "T"}});
    } else {
        const MatrixXd t_nc = layer_matrix(LayerKind::AdjointDouble, c, n, false, jobs);
        const MatrixXd t_cc = layer_matrix(LayerKind::AdjointDouble, c, c, true, jobs);
        const MatrixXd robin_n = t_nc + gamma_.asDiagonal() * s_nc;
        const MatrixXd robin_c = half_identity_plus(t_cc + gamma_.asDiagonal() * s_cc);
        op_ = stack(robin_n, robin_c, half_identity_plus(t_nn), t_cn,
                    {Block{cn, nn, "T+gamma*S"}, Block{cn, cn, "I/2+T+gamma*S"}, Block{nn, nn, "I/2+T"},
                     Block{nn, cn, "T"}});
    }
    rcond_ = factorize(lu_, op_, spec.dirichlet_on_c ? "corroded (Dirichlet)" : "corroded");

    const MatrixXd s_nn = layer_matrix(LayerKind::Single, n, n, true, jobs);
    const MatrixXd s_cn = layer_matrix(LayerKind::Single, n, c, false, jobs);
    trace_op_.resize(s_nn.rows(), s_nn.cols() + s_cn.cols());
    trace_op_ << s_nn, s_cn;
    trace_c_op_.resize(s_nc.rows(), s_nc.cols() + s_cc.cols());
    trace_c_op_ << s_nc, s_cc;
}

DensitySolution CorrodedSolver::solve_density(const VectorXd& g) const
{
    check_current(g, arc_n_->size());
    VectorXd rhs = VectorXd::Zero(op_.matrix.rows());
    rhs.tail(g.size()) = g;
    return split(SystemTag::Corroded, arc_n_, arc_c_, lu_.solve(rhs));
}

TraceField CorrodedSolver::trace(const DensitySolution& d) const
{
    return {d.tag, arc_n_, trace_op_ * d.values(), false};
}

VectorXd CorrodedSolver::trace_c(const DensitySolution& d) const { return trace_c_op_ * d.values(); }

MatrixXd CorrodedSolver::solve_traces(const MatrixXd& g) const
{
    MatrixXd rhs = MatrixXd::Zero(op_.matrix.rows(), g.cols());
    rhs.bottomRows(g.rows()) = g;
    return trace_op_ * lu_.solve(rhs);
}

// ---------------------------------------------------------------- free functions

VectorXd sample_current(const PanelQuadrature& arc_n, const BoundaryFunction& g) { return sample(arc_n, g); }

std::pair<DensitySolution, TraceField> solve_healthy(const ProblemSpec& spec, const BoundaryFunction& g)
{
    const HealthySolver solver(spec);
    DensitySolution d = solver.solve_density(sample_current(solver.arc_n(), g));
    TraceField t = solver.trace(d);
    return {std::move(d), std::move(t)};
}

std::pair<DensitySolution, TraceField> solve_corroded(const ProblemSpec& spec, const BoundaryFunction& g)
{
    const CorrodedSolver solver(spec);
    DensitySolution d = solver.solve_density(sample_current(solver.arc_n(), g));
    TraceField t = solver.trace(d);
    return {std::move(d), std::move(t)};
}

TraceField solve_green(const ProblemSpec& spec, const Point& z)
{
    if (!spec.in_domain(z))
        throw DomainError("source point is not inside D");
    return HealthySolver(spec).green_trace(z);
}

FieldValue evaluate_interior(const DensitySolution& d, const Point& x)
{
    return layer_value(LayerKind::Single, d, x, Point::Zero());
}

FieldValue evaluate_normal_derivative(const DensitySolution& d, const Point& x, const Point& nu)
{
    return layer_value(LayerKind::AdjointDouble, d, x, nu);
}

FieldValue evaluate_green(const DensitySolution& d, const Point& x)
{
    if (d.tag != SystemTag::Green || !d.source)
        throw std::invalid_argument("evaluate_green needs a Green's function density");
    FieldValue v = evaluate_interior(d, x);
    v.value += phi(x, *d.source);
    return v;
}

} // namespace corrosion
