#pragma once

#include "corrosion/contour.hpp"
#include "corrosion/geometry.hpp"
#include "corrosion/ntd.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace corrosion {

enum class Method { FMreg, LSMreg };

const char* to_string(Method m);
Method parse_method(const std::string& text); ///< "fmreg" or "lsmreg"; throws std::invalid_argument

/// Cell-centered nx × ny grid over a rectangle. Point (i, j) has index
/// j * nx + i. Labels are for scoring only.
struct ImagingGrid {
    std::array<double, 4> bounds{}; ///< xmin, xmax, ymin, ymax
    int nx = 0;
    int ny = 0;
    std::vector<Point> points;
    std::vector<Region> labels;
    std::vector<char> active; ///< inside D, so the indicator is defined there

    std::size_t size() const { return points.size(); }
};

ImagingGrid make_grid(const ProblemSpec& spec, int nx, int ny);
ImagingGrid make_grid(const ProblemSpec& spec, std::array<double, 4> bounds, int nx, int ny);

/// b^(z) for every active grid point (inactive columns are zero).
struct RhsField {
    Eigen::MatrixXd b;
    std::vector<char> active;
};

RhsField compute_rhs_field(const RhsProvider& rhs, const ImagingGrid& grid, int jobs = 1);

/// W^log on a grid with its reconstruction mask.
struct IndicatorField {
    Method method = Method::FMreg;
    ImagingGrid grid;
    std::vector<double> w_log; ///< NaN where inactive, +inf for sentinels
    std::vector<char> sentinel;
    std::vector<char> mask;
    double regularization = 0.0; ///< singular value threshold or Tikhonov α
    double level = 0.0;
    std::vector<Polyline> contour;
    std::string provenance;

    std::size_t sentinel_count() const;
};

IndicatorField fm_indicator(const GapSVD& svd, const RhsField& rhs, const ImagingGrid& grid, double sv_threshold);
IndicatorField fm_indicator(const GapSVD& svd, const RhsProvider& rhs, const ImagingGrid& grid,
                            double sv_threshold, int jobs = 1);

IndicatorField lsm_indicator(const Eigen::MatrixXd& B, const RhsField& rhs, const ImagingGrid& grid, double alpha);
IndicatorField lsm_indicator(const NtdGapMatrix& B, const RhsProvider& rhs, const ImagingGrid& grid, double alpha,
                             int jobs = 1);

/// Picard partial sum Σ_{σ_j > threshold} |⟨b, u_j⟩|² / σ_j.
double picard_sum(const GapSVD& svd, const Eigen::VectorXd& b, double sv_threshold);

/// Sets mask = (W^log ≥ level) on finite values and traces the level curve.
IndicatorField extract_mask(IndicatorField field, double level);

struct ReconstructionScore {
    double jaccard = 0.0;
    double baseline_jaccard = 0.0; ///< Jaccard of the all-true mask
    double median_inside = 0.0;    ///< over finite W^log in Ω
    double median_outside = 0.0;   ///< over finite W^log in D∖Ω̄
    double separation = 0.0;       ///< median_inside − median_outside
    std::optional<double> auc;     ///< unset when one class is empty
    std::size_t n_inside = 0;
    std::size_t n_outside = 0;
    std::size_t n_sentinel = 0;
    std::size_t n_excluded = 0; ///< grid points outside D
};

ReconstructionScore score_reconstruction(const IndicatorField& field);

/// Mann–Whitney estimate of P(score_pos > score_neg) with ties counted ½.
std::optional<double> auc(const std::vector<double>& positive, const std::vector<double>& negative);

} // namespace corrosion
