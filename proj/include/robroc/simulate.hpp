#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robroc/model_select.hpp"
#include "robroc/population.hpp"

namespace robroc {

enum class ContaminationKind {
    location,  ///< N(mu + kappa * sigma, sigma^2)
    radial,    ///< N(mu, (factor * sigma)^2)
};

enum class ErrorLaw {
    normal,
    student_t,  ///< scaled to unit variance
};

using CovariateFunction = std::function<double(std::span<const double>)>;

/// Conditional outcome law of one population: mean and SD as functions of x.
struct GroupLaw {
    CovariateFunction mean;
    CovariateFunction sd;
};

/// Data-generating process for a simulation study.
struct Scenario {
    std::string name;
    std::vector<std::pair<double, double>> covariate_ranges;  ///< independent uniforms
    GroupLaw nondiseased;
    GroupLaw diseased;
    ErrorLaw error_law = ErrorLaw::normal;
    int student_df = 3;

    double contamination_nd = 0.0;
    double contamination_d = 0.0;
    double kappa_nd = 15.0;
    double kappa_d = 20.0;
    ContaminationKind contamination_kind = ContaminationKind::location;
    double radial_factor = 10.0;

    [[nodiscard]] std::size_t covariate_count() const { return covariate_ranges.size(); }

    /// Same contamination fraction in both groups.
    void set_contamination(double fraction) {
        contamination_nd = fraction;
        contamination_d = fraction;
    }

    void validate() const;

    /// Preset scenarios "I", "II", "III" and "IV" (case-insensitive).
    static Scenario preset(const std::string& id);
};

/// Polynomial mean a0 + sum_h (a_h1 x_h + a_h2 x_h^2 + a_h3 x_h^3) with constant SD.
struct PolynomialLaw {
    double intercept = 0.0;
    std::vector<std::array<double, 3>> coefficients;  ///< one row per covariate
    double sd = 1.0;

    [[nodiscard]] GroupLaw to_law() const;
};

/// Scenario built from polynomial group laws (used by configuration files).
Scenario custom_scenario(const std::string& name, std::vector<std::pair<double, double>> ranges,
                         const PolynomialLaw& nondiseased, const PolynomialLaw& diseased,
                         ErrorLaw law = ErrorLaw::normal);

struct SimulatedData {
    GroupSample nondiseased;
    GroupSample diseased;
    std::vector<std::size_t> contaminated_nd;  ///< sorted row indices
    std::vector<std::size_t> contaminated_d;
};

/// round-half-up(fraction * n).
std::size_t contaminated_count(double fraction, std::size_t n);

/// Draws one data set. Identical arguments give identical samples.
SimulatedData generate(const Scenario& scn, std::size_t n_nd, std::size_t n_d, std::uint64_t seed);

/// Binormal AUC Phi((mu_d - mu_nd) / sqrt(sd_d^2 + sd_nd^2)). Throws
/// UsageError for non-normal scenarios.
double true_auc(const Scenario& scn, std::span<const double> x);

enum class ComparatorKind { ols_linear, ols_bspline };

/// Least-squares location-scale fit with unit weights: linear mean
/// (ols_linear) or cubic B-spline mean with `knots` per covariate.
PopulationFit comparator_fit(ComparatorKind kind, const GroupSample& sample, std::span<const int> knots = {});

enum class StudyEstimator { robust, ols_linear, ols_bspline };

std::string to_string(StudyEstimator e);
StudyEstimator parse_estimator(const std::string& name);

struct StudyConfig {
    Scenario scenario;
    std::size_t n_nd = 200;
    std::size_t n_d = 100;
    int replicates = 100;
    std::uint64_t seed = 1;
    std::vector<StudyEstimator> estimators{StudyEstimator::robust, StudyEstimator::ols_linear,
                                           StudyEstimator::ols_bspline};
    std::vector<std::vector<double>> grid;  ///< empty: default_study_grid(scenario)
    std::vector<int> robust_knots;          ///< empty: zero per covariate
    std::vector<int> bspline_knots;         ///< empty: zero per covariate
    std::vector<std::vector<int>> knot_contest;  ///< per-covariate candidates; empty disables
    std::vector<std::vector<int>> knot_configurations;  ///< explicit knot vectors; overrides knot_contest
    FitConfig fit;
    bool keep_replicates = false;
    unsigned threads = 1;
};

struct GridSummary {
    std::vector<double> x;
    double truth = 0.0;  ///< NaN when no closed-form oracle exists
    double mean = 0.0;
    double lower = 0.0;  ///< 2.5% simulation quantile
    double upper = 0.0;  ///< 97.5% simulation quantile
    int used = 0;        ///< replicates whose fit covered x
};

struct EstimatorReport {
    StudyEstimator estimator = StudyEstimator::robust;
    std::vector<GridSummary> points;
    int failed_replicates = 0;
    std::vector<std::vector<double>> replicate_auc;  ///< [replicate][grid point], NaN when skipped

    /// max over grid points of |mean - truth|.
    [[nodiscard]] double max_abs_bias() const;
};

struct KnotSelectionTable {
    std::map<std::vector<int>, int> nondiseased;
    std::map<std::vector<int>, int> diseased;
    int failed = 0;
    int replicates = 0;

    /// Percentage of successful selections in `group` equal to `knots`.
    [[nodiscard]] double percent(bool diseased_group, const std::vector<int>& knots) const;
};

struct McReport {
    std::string scenario;
    std::size_t n_nd = 0;
    std::size_t n_d = 0;
    double contamination_nd = 0.0;
    double contamination_d = 0.0;
    int replicates = 0;
    std::vector<EstimatorReport> estimators;
    std::optional<KnotSelectionTable> knot_selection;

    [[nodiscard]] const EstimatorReport& report(StudyEstimator e) const;
};

/// 21 points on [0.05, 0.95] along the first covariate; later covariates are
/// held at the midpoints of their ranges.
std::vector<std::vector<double>> default_study_grid(const Scenario& scn, int count = 21);

/// Monte Carlo study: per replicate generate, fit each estimator, evaluate
/// the closed-form AUC on the grid, and optionally run the knot contest.
/// Grid points outside a replicate's boundary knots are skipped for that
/// replicate; fit failures are counted, not fatal.
McReport run_study(const StudyConfig& cfg);

} // namespace robroc
