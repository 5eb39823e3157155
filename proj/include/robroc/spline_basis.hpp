#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace robroc {

/// How a covariate column enters the additive mean model.
enum class TermKind {
    spline,  ///< cubic B-spline expansion with K + 3 columns
    linear,  ///< raw column (continuous linear effect or 0/1 indicator)
};

/// Knot configuration of one covariate.
///
/// For spline terms the boundary knots are the training minimum and maximum
/// and interior knot k (1-based) sits at the k/(K+1) sample quantile.
struct CovariateTerm {
    TermKind kind = TermKind::spline;
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> interior_knots;

    [[nodiscard]] std::size_t interior_count() const { return interior_knots.size(); }

    /// Number of design columns contributed by this covariate.
    [[nodiscard]] std::size_t columns() const {
        return kind == TermKind::spline ? interior_knots.size() + 3 : 1;
    }
};

/// Per-covariate basis configuration of one population's mean model.
struct SplineSpec {
    std::vector<CovariateTerm> terms;

    /// Q = 1 + sum of per-covariate column counts.
    [[nodiscard]] std::size_t dimension() const;
    [[nodiscard]] std::size_t covariate_count() const { return terms.size(); }

    /// Knot counts of the spline terms in covariate order (linear terms report 0).
    [[nodiscard]] std::vector<int> knot_counts() const;

    /// Throws ExtrapolationError unless every spline coordinate of `x` lies
    /// within its boundary knots.
    void check_in_range(std::span<const double> x) const;
};

/// Builds the spline entry for one covariate column with `interior_count`
/// interior knots placed at equally spaced sample quantiles.
CovariateTerm knot_sequence(std::span<const double> column, int interior_count);

/// Linear (pass-through) term; records the column range for reporting only.
CovariateTerm linear_term(std::span<const double> column);

/// All K + 4 cubic B-spline basis functions at `x` (sums to one).
std::vector<double> full_basis_row(double x, const CovariateTerm& term);

/// Basis row used in the design: the full basis with its first function dropped.
std::vector<double> bspline_row(double x, const CovariateTerm& term);

/// Builds a SplineSpec from training covariates (n x p). `kinds` may be empty
/// (all spline terms); knot counts for linear terms are ignored.
SplineSpec make_spec(const Eigen::MatrixXd& covariates, std::span<const int> knots,
                     std::span<const TermKind> kinds = {});

/// Design row z(x)' = (1, B_1(x_1)', ..., B_p(x_p)').
Eigen::RowVectorXd design_row(std::span<const double> x, const SplineSpec& spec);

/// Full design matrix Z (n x Q); column 0 is the intercept.
Eigen::MatrixXd build_design(const Eigen::MatrixXd& covariates, const SplineSpec& spec);

} // namespace robroc
