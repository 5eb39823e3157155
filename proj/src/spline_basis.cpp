#include "robroc/spline_basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "robroc/errors.hpp"
#include "robroc/stats.hpp"

namespace robroc {

namespace {

constexpr int kDegree = 3;

void check_column(std::span<const double> column) {
    if (column.empty()) {
        throw DataError("empty covariate column");
    }
    for (double v : column) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite covariate value");
        }
    }
}

} // namespace

std::size_t SplineSpec::dimension() const {
    std::size_t q = 1;
    for (const auto& t : terms) {
        q += t.columns();
    }
    return q;
}

std::vector<int> SplineSpec::knot_counts() const {
    std::vector<int> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        out.push_back(static_cast<int>(t.interior_count()));
    }
    return out;
}

void SplineSpec::check_in_range(std::span<const double> x) const {
    if (x.size() != terms.size()) {
        throw DataError("covariate point has " + std::to_string(x.size()) + " coordinates, model expects " +
                        std::to_string(terms.size()));
    }
    for (std::size_t h = 0; h < terms.size(); ++h) {
        const auto& t = terms[h];
        if (t.kind == TermKind::spline && !(x[h] >= t.lower && x[h] <= t.upper)) {
            std::ostringstream msg;
            msg << "extrapolation outside boundary knots: covariate " << h << " value " << x[h] << " not in ["
                << t.lower << ", " << t.upper << "]";
            throw ExtrapolationError(msg.str());
        }
    }
}

CovariateTerm knot_sequence(std::span<const double> column, int interior_count) {
    check_column(column);
    if (interior_count < 0) {
        throw UsageError("interior knot count must be non-negative");
    }
    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());

    CovariateTerm term;
    term.kind = TermKind::spline;
    term.lower = sorted.front();
    term.upper = sorted.back();
    if (!(term.lower < term.upper)) {
        throw DataError("constant covariate");
    }
    const double denom = static_cast<double>(interior_count + 1);
    term.interior_knots.reserve(static_cast<std::size_t>(interior_count));
    for (int k = 1; k <= interior_count; ++k) {
        term.interior_knots.push_back(stats::quantile_type7(sorted, static_cast<double>(k) / denom));
    }
    double prev = term.lower;
    for (double knot : term.interior_knots) {
        if (!(knot > prev)) {
            throw DataError("interior knots are not distinct; too many knots for the covariate's distinct values");
        }
        prev = knot;
    }
    if (!term.interior_knots.empty() && !(term.interior_knots.back() < term.upper)) {
        throw DataError("interior knots are not distinct; too many knots for the covariate's distinct values");
    }
    return term;
}

CovariateTerm linear_term(std::span<const double> column) {
    check_column(column);
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    CovariateTerm term;
    term.kind = TermKind::linear;
    term.lower = *lo;
    term.upper = *hi;
    return term;
}

std::vector<double> full_basis_row(double x, const CovariateTerm& term) {
    if (!(x >= term.lower && x <= term.upper)) {
        std::ostringstream msg;
        msg << "extrapolation outside boundary knots: " << x << " not in [" << term.lower << ", " << term.upper
            << "]";
        throw ExtrapolationError(msg.str());
    }
    const std::size_t k = term.interior_count();
    // Clamped knot vector: 4 copies of each boundary around the interior knots.
    std::vector<double> knots;
    knots.reserve(k + 8);
    knots.insert(knots.end(), kDegree + 1, term.lower);
    knots.insert(knots.end(), term.interior_knots.begin(), term.interior_knots.end());
    knots.insert(knots.end(), kDegree + 1, term.upper);

    // Span index i with knots[i] <= x < knots[i+1]; the right boundary belongs
    // to the last nonempty span.
    const auto below = static_cast<std::size_t>(
        std::upper_bound(term.interior_knots.begin(), term.interior_knots.end(), x) - term.interior_knots.begin());
    const std::size_t span = kDegree + below;

    std::array<double, kDegree + 1> n{};
    std::array<double, kDegree + 1> left{};
    std::array<double, kDegree + 1> right{};
    n[0] = 1.0;
    for (int j = 1; j <= kDegree; ++j) {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }

    std::vector<double> row(k + 4, 0.0);
    for (int r = 0; r <= kDegree; ++r) {
        row[span - kDegree + r] = n[r];
    }
    return row;
}

std::vector<double> bspline_row(double x, const CovariateTerm& term) {
    auto full = full_basis_row(x, term);
    full.erase(full.begin());
    return full;
}

SplineSpec make_spec(const Eigen::MatrixXd& covariates, std::span<const int> knots,
                     std::span<const TermKind> kinds) {
    const auto p = static_cast<std::size_t>(covariates.cols());
    if (knots.size() != p) {
        throw UsageError("knot configuration has " + std::to_string(knots.size()) + " entries for " +
                         std::to_string(p) + " covariates");
    }
    if (!kinds.empty() && kinds.size() != p) {
        throw UsageError("term kinds do not match covariate count");
    }
    SplineSpec spec;
    spec.terms.reserve(p);
    for (std::size_t h = 0; h < p; ++h) {
        const Eigen::VectorXd col = covariates.col(static_cast<Eigen::Index>(h));
        const std::span<const double> view(col.data(), static_cast<std::size_t>(col.size()));
        const TermKind kind = kinds.empty() ? TermKind::spline : kinds[h];
        spec.terms.push_back(kind == TermKind::spline ? knot_sequence(view, knots[h]) : linear_term(view));
    }
    return spec;
}

Eigen::RowVectorXd design_row(std::span<const double> x, const SplineSpec& spec) {
    spec.check_in_range(x);
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(spec.dimension()));
    row(0) = 1.0;
    Eigen::Index col = 1;
    for (std::size_t h = 0; h < spec.terms.size(); ++h) {
        const auto& term = spec.terms[h];
        if (term.kind == TermKind::linear) {
            row(col++) = x[h];
            continue;
        }
        for (double b : bspline_row(x[h], term)) {
            row(col++) = b;
        }
    }
    return row;
}

Eigen::MatrixXd build_design(const Eigen::MatrixXd& covariates, const SplineSpec& spec) {
    if (static_cast<std::size_t>(covariates.cols()) != spec.covariate_count()) {
        throw DataError("covariate matrix has " + std::to_string(covariates.cols()) + " columns, spec expects " +
                        std::to_string(spec.covariate_count()));
    }
    const Eigen::Index n = covariates.rows();
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(spec.dimension()));
    std::vector<double> x(static_cast<std::size_t>(covariates.cols()));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index h = 0; h < covariates.cols(); ++h) {
            x[static_cast<std::size_t>(h)] = covariates(i, h);
        }
        z.row(i) = design_row(x, spec);
    }
    return z;
}

} // namespace robroc
