#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robroc/population.hpp"

namespace robroc {

struct RaicValue {
    double raic = 0.0;
    double trace = 0.0;  ///< trace(J^{-1} U)
};

/// Robust AIC of a Huber fit: 2 n log(sigma) + 4 trace(J^{-1} U) with
///   J = n^{-1} sum psi'(u_j) z_j z_j' / sigma^2,
///   U = n^{-1} sum psi(u_j)^2 z_j z_j' / sigma^2,
/// u_j = (y_j - z_j' beta) / sigma and psi'(u) = 1{|u| <= b}.
///
/// Throws NumericalError when J is numerically singular.
RaicValue raic(const RobustFit& fit, const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

struct RaicCandidate {
    std::vector<int> knots;
    std::optional<RaicValue> value;  ///< empty when the fit failed
    std::string error;
    std::optional<PopulationFit> fit;
};

struct RaicReport {
    std::vector<RaicCandidate> candidates;
    std::size_t selected = 0;

    [[nodiscard]] const RaicCandidate& best() const { return candidates.at(selected); }
};

/// Cartesian product of per-covariate candidate sets in lexicographic order.
std::vector<std::vector<int>> knot_grid(const std::vector<std::vector<int>>& per_covariate);

/// Fits every knot configuration of the Cartesian product and selects the
/// smallest rAIC; equal values keep the lexicographically smallest vector.
/// Linear terms (per `kinds`) ignore their candidate set.
///
/// Throws NumericalError carrying the per-candidate diagnostics when no
/// candidate could be fitted.
RaicReport select_knots(const GroupSample& sample, const std::vector<std::vector<int>>& candidates,
                        const FitConfig& cfg = {}, std::span<const TermKind> kinds = {}, bool keep_fits = true);

/// Same as select_knots over an explicit list of knot vectors (one count per
/// covariate each). The list is sorted first, so ties resolve the same way.
RaicReport select_knots_among(const GroupSample& sample, std::vector<std::vector<int>> configurations,
                              const FitConfig& cfg = {}, std::span<const TermKind> kinds = {}, bool keep_fits = true);

} // namespace robroc
