#include "corrosion/errors.hpp"
#include "corrosion/geometry.hpp"
#include "corrosion/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace corrosion;

namespace {

constexpr double kPi = std::numbers::pi;

double polygon_area(std::vector<Point> pts) { return signed_area(pts); }

} // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly)
{
    for (int n : {3, 16}) {
        const auto& rule = gauss_legendre(n);
        ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(n));
        for (int p = 0; p < 2 * n; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += rule.weights[i] * std::pow(rule.nodes[i], p);
            EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
        }
    }
}

TEST(GaussLegendre, ThreePointNodesMatchClosedForm)
{
    const auto& rule = gauss_legendre(3);
    const double a = (1.0 - std::sqrt(3.0 / 5.0)) / 2.0;
    EXPECT_NEAR(rule.nodes[0], a, 1e-15);
    EXPECT_NEAR(rule.nodes[1], 0.5, 1e-15);
    EXPECT_NEAR(rule.nodes[2], 1.0 - a, 1e-15);
    EXPECT_NEAR(rule.weights[1], 4.0 / 9.0, 1e-15);
}

TEST(Panels, CircleLengthAndNodeCount)
{
    const PanelQuadrature q(make_circle_arc("c", {0.0, 0.0}, 2.0, 0.0, kPi, 20));
    EXPECT_EQ(q.size(), 60u);
    EXPECT_NEAR(q.total_length(), 2.0 * kPi, 1e-12);
    for (const auto& n : q.nodes()) {
        EXPECT_NEAR(n.normal.norm(), 1.0, 1e-14);
        // outward normal of a counterclockwise circle is radial
        EXPECT_NEAR(n.normal.dot(n.x / 2.0), 1.0, 1e-14);
    }
}

TEST(Panels, PolylineCornersAreBreaks)
{
    const auto c = make_polyline("p", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 3.0}}, 8);
    const PanelQuadrature q(c);
    ASSERT_EQ(c.corners().size(), 1u);
    const auto& b = q.breaks();
    EXPECT_NE(std::find(b.begin(), b.end(), c.corners()[0]), b.end());
    EXPECT_NEAR(q.total_length(), 4.0, 1e-13);
}

TEST(Panels, TooManyCornersRejected)
{
    const auto c = make_polyline("p", {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 2}}, 2);
    EXPECT_THROW(PanelQuadrature{c}, ConfigError);
}

TEST(Panels, InterpolationReproducesQuadratics)
{
    const PanelQuadrature q(make_ellipse_arc("e", {0.0, 0.0}, 1.1, 0.5, 0.0, kPi, 7));
    auto f = [](double t) { return 1.0 - 2.0 * t + 0.7 * t * t; };
    const Eigen::VectorXd v = sample(q, [&](const QuadratureNode& n) { return f(n.t); });
    for (double t : {0.0, 0.3, 1.234, 2.9, kPi})
        EXPECT_NEAR(q.interpolate(v, t), f(t), 1e-12);
}

TEST(Panels, LocalBasisIsPartitionOfUnity)
{
    for (double r : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const auto l = PanelQuadrature::local_basis(r);
        EXPECT_NEAR(l[0] + l[1] + l[2], 1.0, 1e-14);
    }
    const auto l = PanelQuadrature::local_basis(PanelQuadrature::kCollocationOffset);
    EXPECT_NEAR(l[0], 1.0, 1e-14);
}

TEST(Polygon, AreaAndWinding)
{
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_DOUBLE_EQ(polygon_area(square), 1.0);
    EXPECT_DOUBLE_EQ(polygon_area({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), -1.0);
    EXPECT_EQ(winding_number(square, Point(0.5, 0.5)), 1);
    EXPECT_EQ(winding_number(square, Point(1.5, 0.5)), 0);
}

class ExampleGeometry : public ::testing::TestWithParam<int> {};

TEST_P(ExampleGeometry, ArcsCloseAndValidate)
{
    const ProblemSpec s = make_example(GetParam(), 40);
    EXPECT_NO_THROW(validate(s));
    EXPECT_LT((s.gamma_n.back() - s.gamma_d.front()).norm(), 1e-12);
    EXPECT_LT((s.gamma_d.back() - s.gamma_n.front()).norm(), 1e-12);
    EXPECT_LT((s.gamma_n.back() - s.gamma_c.front()).norm(), 1e-12);
    EXPECT_LT((s.gamma_c.back() - s.gamma_n.front()).norm(), 1e-12);
    EXPECT_EQ(s.example_id, GetParam());
    EXPECT_DOUBLE_EQ(s.gamma_min(), 0.5);
}

TEST_P(ExampleGeometry, RegionsAreConsistent)
{
    const ProblemSpec s = make_example(GetParam(), 40);
    const auto& b = s.imaging_bounds;
    int omega = 0, healthy = 0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const Point z(b[0] + (i + 0.5) * (b[1] - b[0]) / 50, b[2] + (j + 0.5) * (b[3] - b[2]) / 50);
            const Region r = s.region(z);
            EXPECT_EQ(r != Region::Outside, s.in_domain(z));
            omega += r == Region::Omega;
            healthy += r == Region::Healthy;
        }
    EXPECT_GT(omega, 0);
    EXPECT_GT(healthy, 0);
}

INSTANTIATE_TEST_SUITE_P(All, ExampleGeometry, ::testing::Values(1, 2, 3));

TEST(Examples, KnownRegionsAndFrequencies)
{
    const auto e1 = make_example(1, 20);
    EXPECT_EQ(e1.region({kPi, -kPi}), Region::Healthy);
    EXPECT_EQ(e1.region({0.1, -6.0}), Region::Omega);
    EXPECT_EQ(e1.region({1.0, 1.0}), Region::Outside);
    EXPECT_DOUBLE_EQ(e1.basis_frequency, 1.0);

    const auto e2 = make_example(2, 20);
    EXPECT_EQ(e2.region({0.2, 0.2}), Region::Omega);
    EXPECT_EQ(e2.region({0.6, 0.6}), Region::Healthy);
    EXPECT_DOUBLE_EQ(e2.basis_frequency, 4.0);

    const auto e3 = make_example(3, 20);
    EXPECT_EQ(e3.region({0.0, 0.5}), Region::Healthy);
    EXPECT_EQ(e3.region({0.0, -0.25}), Region::Healthy);
    EXPECT_EQ(e3.region({0.0, -0.75}), Region::Omega);
    EXPECT_EQ(e3.region({1.2, 0.0}), Region::Outside);
    EXPECT_DOUBLE_EQ(e3.basis_frequency, 2.0);
    EXPECT_DOUBLE_EQ(e3.fm_level, 2.5);
    EXPECT_DOUBLE_EQ(e3.with_gamma(2.0).fm_level, 1.5);
}

TEST(Examples, ArcLengths)
{
    const auto e2 = make_example(2, 30);
    EXPECT_NEAR(PanelQuadrature(e2.gamma_n).total_length(), kPi / 2, 1e-12);
    EXPECT_NEAR(PanelQuadrature(e2.gamma_c).total_length(), std::sqrt(2.0), 1e-12);
    const auto e1 = make_example(1, 30);
    EXPECT_NEAR(PanelQuadrature(e1.gamma_d).total_length(), 6.0 * kPi, 1e-11);
}

TEST(Examples, UnknownIdAndTooFewPanels)
{
    EXPECT_THROW(make_example(4, 40), ConfigError);
    EXPECT_THROW(make_example(1, 2), ConfigError);
}

TEST(Validate, RejectsNonPositiveGamma)
{
    auto s = make_example(3, 20);
    s.gamma = [](double) { return -1.0; };
    EXPECT_THROW(validate(s), ConfigError);
    s.gamma = [](double t) { return t > 4.0 ? 0.0 : 1.0; };
    EXPECT_THROW(validate(s), ConfigError);
    s.gamma = [](double) { return std::nan(""); };
    EXPECT_THROW(validate(s), ConfigError);
}

TEST(Validate, RejectsOpenAndClockwiseLoops)
{
    auto s = make_example(2, 20);
    s.gamma_c = make_polyline("Gamma_C", {{0.0, 1.0}, {0.9, 0.0}}, 20);
    EXPECT_THROW(validate(s), ConfigError);

    auto r = make_example(2, 20);
    // Γ_C bulging outside the quarter disk crosses Γ_N
    r.gamma_c = make_polyline("Gamma_C", {{0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}, 20);
    EXPECT_THROW(validate(r), ConfigError);
}

TEST(Validate, DegenerateSpecAliasesDirichletArc)
{
    const auto s = make_degenerate(make_example(3, 20));
    EXPECT_TRUE(s.dirichlet_on_c);
    EXPECT_EQ(s.gamma_c.name(), "Gamma_C");
    EXPECT_LT((s.gamma_c.position(4.0) - s.gamma_d.position(4.0)).norm(), 1e-15);
    EXPECT_EQ(s.region({0.0, -0.75}), Region::Healthy);
    EXPECT_NO_THROW(validate(s));
}

TEST(Spec, HashTracksDescription)
{
    const auto a = make_example(1, 40, 0.5);
    EXPECT_EQ(a.hash(), make_example(1, 40, 0.5).hash());
    EXPECT_NE(a.hash(), make_example(1, 40, 2.0).hash());
    EXPECT_NE(a.hash(), a.with_panels(80).hash());
    EXPECT_EQ(a.with_panels(80).hash(), make_example(1, 80, 0.5).hash());
    EXPECT_EQ(a.with_gamma(2.0).hash(), make_example(1, 40, 2.0).hash());
}
