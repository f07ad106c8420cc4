#include "corrosion/imaging.hpp"

#include "corrosion/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace corrosion {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

IndicatorField blank_field(Method method, const ImagingGrid& grid, double regularization)
{
    IndicatorField f;
    f.method = method;
    f.grid = grid;
    f.w_log.assign(grid.size(), kNaN);
    f.sentinel.assign(grid.size(), 0);
    f.mask.assign(grid.size(), 0);
    f.regularization = regularization;
    return f;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return kNaN;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1)
        return upper;
    return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + mid));
}

void check_rhs(const RhsField& rhs, const ImagingGrid& grid)
{
    if (rhs.b.cols() != static_cast<Index>(grid.size()) || rhs.active.size() != grid.size())
        throw std::invalid_argument("right-hand side field does not match the grid");
}

} // namespace

const char* to_string(Method m) { return m == Method::FMreg ? "fmreg" : "lsmreg"; }

Method parse_method(const std::string& text)
{
    if (text == "fmreg")
        return Method::FMreg;
    if (text == "lsmreg")
        return Method::LSMreg;
    throw std::invalid_argument("unknown method '" + text + "' (expected fmreg or lsmreg)");
}

ImagingGrid make_grid(const ProblemSpec& spec, std::array<double, 4> bounds, int nx, int ny)
{
    if (nx < 2 || ny < 2)
        throw ConfigError("imaging grid must be at least 2x2");
    if (!(bounds[1] > bounds[0] && bounds[3] > bounds[2]))
        throw ConfigError("imaging rectangle is empty");
    ImagingGrid g;
    g.bounds = bounds;
    g.nx = nx;
    g.ny = ny;
    const double hx = (bounds[1] - bounds[0]) / nx;
    const double hy = (bounds[3] - bounds[2]) / ny;
    g.points.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            g.points.emplace_back(bounds[0] + (i + 0.5) * hx, bounds[2] + (j + 0.5) * hy);
    for (const auto& p : g.points) {
        g.labels.push_back(spec.region(p));
        g.active.push_back(spec.in_domain(p) ? 1 : 0);
    }
    return g;
}

ImagingGrid make_grid(const ProblemSpec& spec, int nx, int ny)
{
    return make_grid(spec, spec.imaging_bounds, nx, ny);
}

RhsField compute_rhs_field(const RhsProvider& rhs, const ImagingGrid& grid, int jobs)
{
    std::vector<Point> active_points;
    std::vector<Index> columns;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.active[i]) {
            active_points.push_back(grid.points[i]);
            columns.push_back(static_cast<Index>(i));
        }
    }
    const MatrixXd packed = rhs.batch(active_points, jobs);
    RhsField out;
    out.b = MatrixXd::Zero(rhs.size(), static_cast<Index>(grid.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        out.b.col(columns[c]) = packed.col(static_cast<Index>(c));
    out.active = grid.active;
    return out;
}

std::size_t IndicatorField::sentinel_count() const
{
    return static_cast<std::size_t>(std::count(sentinel.begin(), sentinel.end(), 1));
}

double picard_sum(const GapSVD& svd, const VectorXd& b, double sv_threshold)
{
    double p = 0.0;
    for (Index j = 0; j < svd.sigma.size(); ++j) {
        if (svd.sigma[j] > sv_threshold) {
            const double c = svd.U.col(j).dot(b);
            p += c * c / svd.sigma[j];
        }
    }
    return p;
}

IndicatorField fm_indicator(const GapSVD& svd, const RhsField& rhs, const ImagingGrid& grid, double sv_threshold)
{
    if (!(sv_threshold > 0.0))
        throw std::invalid_argument("singular value threshold must be positive");
    check_rhs(rhs, grid);
    IndicatorField f = blank_field(Method::FMreg, grid, sv_threshold);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!rhs.active[i])
            continue;
        const double p = picard_sum(svd, rhs.b.col(static_cast<Index>(i)), sv_threshold);
        if (p > 0.0) {
            f.w_log[i] = -std::log(p);
        } else {
            f.w_log[i] = kInf;
            f.sentinel[i] = 1;
        }
    }
    return f;
}

IndicatorField fm_indicator(const GapSVD& svd, const RhsProvider& rhs, const ImagingGrid& grid, double sv_threshold,
                            int jobs)
{
    return fm_indicator(svd, compute_rhs_field(rhs, grid, jobs), grid, sv_threshold);
}

IndicatorField lsm_indicator(const MatrixXd& B, const RhsField& rhs, const ImagingGrid& grid, double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("Tikhonov parameter must be positive");
    check_rhs(rhs, grid);
    IndicatorField f = blank_field(Method::LSMreg, grid, alpha);
    MatrixXd normal = B.transpose() * B;
    normal.diagonal().array() += alpha;
    const Eigen::LLT<MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success)
        throw SolverError("Tikhonov normal matrix is not positive definite");
    const MatrixXd g = llt.solve(B.transpose() * rhs.b);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!rhs.active[i])
            continue;
        const double norm = g.col(static_cast<Index>(i)).norm();
        if (norm > 0.0) {
            f.w_log[i] = -std::log(norm);
        } else {
            f.w_log[i] = kInf;
            f.sentinel[i] = 1;
        }
    }
    return f;
}

IndicatorField lsm_indicator(const NtdGapMatrix& B, const RhsProvider& rhs, const ImagingGrid& grid, double alpha,
                             int jobs)
{
    return lsm_indicator(B.B, compute_rhs_field(rhs, grid, jobs), grid, alpha);
}

IndicatorField extract_mask(IndicatorField field, double level)
{
    field.level = level;
    std::vector<double> contour_values(field.w_log.size());
    for (std::size_t i = 0; i < field.w_log.size(); ++i) {
        const double w = field.w_log[i];
        const bool finite = std::isfinite(w) && !field.sentinel[i];
        field.mask[i] = finite && w >= level ? 1 : 0;
        contour_values[i] = finite ? w : kNaN;
    }
    field.contour = marching_squares(contour_values, field.grid.points, field.grid.nx, field.grid.ny, level);
    return field;
}

std::optional<double> auc(const std::vector<double>& positive, const std::vector<double>& negative)
{
    if (positive.empty() || negative.empty())
        return std::nullopt;
    // Average ranks over the pooled sample.
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(positive.size() + negative.size());
    for (double v : positive)
        pooled.emplace_back(v, 1);
    for (double v : negative)
        pooled.emplace_back(v, 0);
    std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first)
            ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 1)
                rank_sum += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(positive.size());
    const double nn = static_cast<double>(negative.size());
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

ReconstructionScore score_reconstruction(const IndicatorField& field)
{
    ReconstructionScore s;
    std::vector<double> inside, outside;
    std::size_t both = 0, either = 0, truth = 0, domain = 0;
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        const Region r = field.grid.labels[i];
        if (r == Region::Outside || !field.grid.active[i]) {
            ++s.n_excluded;
            continue;
        }
        ++domain;
        const bool in_omega = r == Region::Omega;
        const bool m = field.mask[i] != 0;
        truth += in_omega;
        both += in_omega && m;
        either += in_omega || m;
        if (field.sentinel[i] || !std::isfinite(field.w_log[i])) {
            ++s.n_sentinel;
            continue;
        }
        (in_omega ? inside : outside).push_back(field.w_log[i]);
    }
    s.n_inside = inside.size();
    s.n_outside = outside.size();
    s.jaccard = either > 0 ? static_cast<double>(both) / static_cast<double>(either) : 1.0;
    s.baseline_jaccard = domain > 0 ? static_cast<double>(truth) / static_cast<double>(domain) : 0.0;
    s.median_inside = median(inside);
    s.median_outside = median(outside);
    s.separation = s.median_inside - s.median_outside;
    s.auc = auc(inside, outside);
    return s;
}

} // namespace corrosion
