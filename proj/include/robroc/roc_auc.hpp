#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "robroc/population.hpp"

namespace robroc {

inline constexpr int kDefaultTGridSize = 201;
inline constexpr int kDefaultSimpsonIntervals = 200;
inline constexpr int kDefaultAucGridSize = 40;

/// Covariate-specific ROC curve at one covariate point.
struct RocResult {
    std::vector<double> x;
    std::vector<double> t_grid;
    std::vector<double> roc_values;
    double auc_closed_form = 0.0;
    double auc_simpson = 0.0;
};

struct YoudenResult {
    double index = 0.0;      ///< max_c F_nd(c|x) - F_d(c|x)
    double threshold = 0.0;  ///< smallest maximizing candidate
};

/// `count` equally spaced points on [0, 1].
std::vector<double> uniform_grid(int count);

/// `count` equally spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

/// ROC(t | x) = 1 - F_d{(mu_nd - mu_d)/sigma_d + (sigma_nd/sigma_d) Q_nd(1 - t)} on `t_grid`.
std::vector<double> roc_values(const PopulationPair& pair, std::span<const double> x, std::span<const double> t_grid);

/// ROC curve plus closed-form and Simpson AUCs.
RocResult roc_curve(const PopulationPair& pair, std::span<const double> x, std::span<const double> t_grid,
                    int simpson_intervals = kDefaultSimpsonIntervals);

/// Weighted Mann-Whitney form of the AUC at x: the omega*-weighted share of
/// (nondiseased, diseased) pairs whose adjusted values satisfy a_nd <= a_d.
double auc_closed_form(const PopulationPair& pair, std::span<const double> x);

/// Composite Simpson integral of the ROC curve with `intervals` (even) panels.
double auc_simpson(const PopulationPair& pair, std::span<const double> x, int intervals = kDefaultSimpsonIntervals);

/// Composite Simpson rule on [0, 1] for samples at m + 1 equally spaced nodes.
double simpson_unit_interval(std::span<const double> values);

/// Composite Simpson rule of `f` on [0, 1] with `intervals` panels.
double simpson_unit_interval(const std::function<double(double)>& f, int intervals);

/// Tie-corrected weighted Mann-Whitney statistic on raw outcomes.
double unconditional_auc(std::span<const double> y_nd, std::span<const double> y_d, std::span<const double> w_nd,
                         std::span<const double> w_d);

struct UnconditionalAuc {
    double auc = 0.0;
    RobustFit nondiseased;
    RobustFit diseased;
};

/// Unconditional AUC with omega* weights from intercept-only robust fits.
UnconditionalAuc robust_unconditional_auc(const Eigen::VectorXd& y_nd, const Eigen::VectorXd& y_d,
                                          const FitConfig& cfg = {});

/// Covariate-specific Youden index. Without `candidates`, searches the union
/// of both groups' adjusted values at x.
YoudenResult youden(const PopulationPair& pair, std::span<const double> x,
                    std::optional<std::span<const double>> candidates = std::nullopt);

/// Default evaluation grid for a single-covariate pair: `count` points evenly
/// spread over the intersection of both groups' boundary ranges.
std::vector<double> default_covariate_grid(const PopulationPair& pair, int count = kDefaultAucGridSize);

} // namespace robroc
