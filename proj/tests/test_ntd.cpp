#include "corrosion/bem.hpp"
#include "corrosion/errors.hpp"
#include "corrosion/geometry.hpp"
#include "corrosion/ntd.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

using namespace corrosion;

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

TEST(Basis, FrequenciesAndValues)
{
    const auto b1 = make_basis(make_example(1, 20));
    EXPECT_EQ(b1.size(), 20);
    EXPECT_DOUBLE_EQ(b1.k, 1.0);
    EXPECT_DOUBLE_EQ(b1.t_end - b1.t_begin, 2 * kPi);
    const auto b2 = make_basis(make_example(2, 20), 5);
    EXPECT_EQ(b2.size(), 6);
    EXPECT_DOUBLE_EQ(b2.k, 4.0);
    EXPECT_NEAR(b2(3, 0.1), std::cos(4 * 3 * 0.1), 1e-15);
    const auto b3 = make_basis(make_example(3, 20));
    EXPECT_DOUBLE_EQ(b3.k, 2.0);
    EXPECT_DOUBLE_EQ(b3(0, 1.234), 1.0);
}

TEST(Basis, ProjectorMeasures)
{
    const auto s = make_example(3, 40);
    const PanelQuadrature arc(s.gamma_n);
    const auto basis = make_basis(s, 4);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(arc.size()));
    const Eigen::VectorXd by_length = basis_projector(arc, basis, Measure::ArcLength).transpose() * one;
    const Eigen::VectorXd by_param = basis_projector(arc, basis, Measure::Parameter).transpose() * one;
    EXPECT_NEAR(by_length[0], arc.total_length(), 1e-13);
    EXPECT_NEAR(by_param[0], kPi, 1e-13);
    // cos(2nθ) integrates to zero over [0, π] in the parameter measure
    for (int n = 1; n <= 4; ++n)
        EXPECT_NEAR(by_param[n], 0.0, 1e-12);
    EXPECT_GT(std::abs(by_length[1]), 1e-3);
}

TEST(Basis, MeasureNames)
{
    EXPECT_EQ(parse_measure(to_string(Measure::ArcLength)), Measure::ArcLength);
    EXPECT_EQ(parse_measure(to_string(Measure::Parameter)), Measure::Parameter);
    EXPECT_THROW(parse_measure("dtheta"), ConfigError);
}

TEST(GapMatrix, VanishesWhenNothingIsCorroded)
{
    for (int id : {1, 2, 3}) {
        const auto s = make_degenerate(make_example(id, 40));
        const auto B = assemble_gap_matrix(s, make_basis(s));
        EXPECT_EQ(B.B.rows(), 20);
        EXPECT_GT(B.healthy_norm, 0.0);
        EXPECT_LE(B.B.norm(), 1e-6 * B.healthy_norm) << "example " << id;
    }
}

TEST(GapMatrix, SymmetryImprovesWithRefinementOnExample3)
{
    const auto s = make_example(3, 75);
    const auto basis = make_basis(s);
    const auto B75 = assemble_gap_matrix(s, basis);
    const auto B150 = assemble_gap_matrix(s.with_panels(150), basis);
    EXPECT_GT(B75.symmetry_defect(), B150.symmetry_defect());
    EXPECT_LT(B150.symmetry_defect(), 1e-2);
    // Galerkin consistency between n_f and 2 n_f
    EXPECT_LT((B75.B - B150.B).norm() / B150.B.norm(), 1e-3);
    EXPECT_EQ(B150.nf, 150);
    EXPECT_EQ(B150.spec_hash, s.with_panels(150).hash());
}

TEST(GapMatrix, SeverelyIllPosedSpectrum)
{
    const auto s = make_example(3, 150);
    const GapSVD svd = gap_svd(assemble_gap_matrix(s, make_basis(s)));
    ASSERT_EQ(svd.sigma.size(), 20);
    EXPECT_GE(svd.sigma[0] / svd.sigma[19], 1e6);
}

TEST(GapMatrix, DecreasesWithGamma)
{
    // γ₁ ≤ γ₂ gives Λ_γ₂ ≤ Λ_γ₁ as quadratic forms, so B(½) − B(2) is PSD
    const auto s = make_example(2, 40);
    const auto basis = make_basis(s, 9);
    const auto Bsmall = assemble_gap_matrix(s, basis);
    const auto Blarge = assemble_gap_matrix(s.with_gamma(2.0), basis);
    const Eigen::MatrixXd d = Bsmall.B - Blarge.B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (d + d.transpose()));
    EXPECT_GT(es.eigenvalues().maxCoeff(), 0.0);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-6 * es.eigenvalues().maxCoeff());
}

TEST(GapMatrix, OverloadsAndJobsAgree)
{
    const auto s = make_example(1, 30);
    const auto basis = make_basis(s, 7);
    const auto a = assemble_gap_matrix(s, basis, Measure::ArcLength, 1);
    const auto b = assemble_gap_matrix(s, basis, Measure::ArcLength, 3);
    const HealthySolver h(s);
    const CorrodedSolver c(s);
    const auto d = assemble_gap_matrix(h, c, s, basis);
    EXPECT_EQ((a.B - b.B).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.B - d.B).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(a.measure, Measure::ArcLength);
    // Γ_N of Example 1 is a unit-speed segment, so both measures coincide
    const auto e = assemble_gap_matrix(s, basis, Measure::Parameter);
    EXPECT_LT((a.B - e.B).cwiseAbs().maxCoeff(), 1e-14 * a.B.cwiseAbs().maxCoeff());
}

TEST(Svd, SortedAndReconstructs)
{
    const auto s = make_example(2, 30);
    const auto B = assemble_gap_matrix(s, make_basis(s));
    const GapSVD svd = gap_svd(B);
    for (Eigen::Index j = 1; j < svd.sigma.size(); ++j)
        EXPECT_GE(svd.sigma[j - 1], svd.sigma[j]);
    EXPECT_GE(svd.sigma.minCoeff(), 0.0);
    const Eigen::MatrixXd sym = 0.5 * (B.B + B.B.transpose());
    const Eigen::MatrixXd rec = svd.U * svd.sigma.asDiagonal() * svd.V.transpose();
    EXPECT_LE((sym - rec).norm(), 1e-12 * B.B.norm());
}

TEST(Svd, RankOneAndIdempotentSymmetrization)
{
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(6, -1.0, 1.5);
    const Eigen::MatrixXd B = u * u.transpose();
    const GapSVD svd = gap_svd(B);
    EXPECT_NEAR(svd.sigma[0], u.squaredNorm(), 1e-13);
    EXPECT_LT(svd.sigma.tail(5).maxCoeff(), 1e-13);
    const GapSVD again = gap_svd(Eigen::MatrixXd(0.5 * (B + B.transpose())));
    EXPECT_LT((svd.sigma - again.sigma).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rhs, FoldedProjectionMatchesFullSolve)
{
    const auto s = make_example(3, 40);
    const auto basis = make_basis(s);
    auto healthy = std::make_shared<const HealthySolver>(s);
    const GreenRhsProvider provider(healthy, basis);
    EXPECT_EQ(provider.size(), 20);
    for (const Point& z : {Point(0.0, 0.5), Point(0.3, -0.6), Point(-0.9, 0.05)}) {
        const Eigen::VectorXd folded = provider(z);
        const Eigen::VectorXd full = assemble_rhs(s, basis, z);
        EXPECT_LE((folded - full).norm(), 1e-10 * full.norm()) << z.transpose();
    }
    const std::vector<Point> zs{{0.1, 0.1}, {0.2, -0.2}};
    const Eigen::MatrixXd batch = provider.batch(zs, 2);
    EXPECT_LE((batch.col(1) - provider(zs[1])).norm(), 1e-14 * batch.col(1).norm());
}

TEST(Rhs, ConstantModeIsIntegralOfGreenTrace)
{
    const auto s = make_example(2, 40);
    auto healthy = std::make_shared<const HealthySolver>(s);
    const GreenRhsProvider provider(healthy, make_basis(s));
    const Point z(0.3, 0.4);
    EXPECT_NEAR(provider(z)[0], healthy->arc_n().integrate(healthy->green_trace(z).values), 1e-12);
}

TEST(Rhs, ContinuousInTheSourcePoint)
{
    const auto s = make_example(3, 40);
    const GreenRhsProvider provider(std::make_shared<const HealthySolver>(s), make_basis(s));
    const Point z(0.2, -0.3);
    const Eigen::VectorXd b = provider(z);
    double previous = std::numeric_limits<double>::infinity();
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const double d = (provider(z + Point(h, 0.5 * h)) - b).norm();
        EXPECT_LT(d, previous);
        previous = d;
    }
    EXPECT_LT(previous, 1e-3 * b.norm());
}

TEST(Rhs, SourceOutsideDomain)
{
    const auto s = make_example(3, 20);
    const GreenRhsProvider provider(std::make_shared<const HealthySolver>(s), make_basis(s));
    EXPECT_THROW(provider(Point(1.09, 1.09)), DomainError);
}
