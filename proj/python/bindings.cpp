#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robroc/bootstrap.hpp"
#include "robroc/errors.hpp"
#include "robroc/model_select.hpp"
#include "robroc/roc_auc.hpp"
#include "robroc/simulate.hpp"

namespace py = pybind11;
using namespace robroc;

namespace {

GroupSample make_sample(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    if (x.rows() != y.size()) throw DataError("outcome and covariate rows differ");
    return GroupSample{y, x};
}

std::vector<TermKind> kinds_from(const std::vector<bool>& linear, Eigen::Index p) {
    if (linear.empty()) return {};
    if (static_cast<Eigen::Index>(linear.size()) != p) throw UsageError("linear flags need one entry per covariate");
    std::vector<TermKind> k;
    for (bool l : linear) k.push_back(l ? TermKind::linear : TermKind::spline);
    return k;
}

Estimator parse_fit_estimator(const std::string& s) {
    if (s == "robust") return Estimator::robust;
    if (s == "ols") return Estimator::ols;
    throw UsageError("estimator must be 'robust' or 'ols'");
}

py::dict interval(const PercentileInterval& iv) {
    py::dict d;
    d["estimate"] = iv.estimate;
    d["lower"] = iv.lower;
    d["upper"] = iv.upper;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust covariate-specific ROC analysis";
    m.attr("__version__") = ROBROC_VERSION;

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    static py::exception<DataError> data_error(m, "DataError", base.ptr());
    static py::exception<NumericalError> numerical_error(m, "NumericalError", base.ptr());
    static py::exception<UsageError> usage_error(m, "UsageError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DataError& e) {
            py::set_error(data_error, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical_error, e.what());
        } catch (const UsageError& e) {
            py::set_error(usage_error, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init([](double b, double v, int max_iterations, double tolerance) {
                 FitConfig c{b, v, max_iterations, tolerance};
                 c.validate();
                 return c;
             }),
             py::arg("b") = 1.345, py::arg("v") = 3.0, py::arg("max_iterations") = 50, py::arg("tolerance") = 1e-8)
        .def_readwrite("b", &FitConfig::b)
        .def_readwrite("v", &FitConfig::v)
        .def_readwrite("max_iterations", &FitConfig::max_iterations)
        .def_readwrite("tolerance", &FitConfig::tolerance);

    py::class_<RobustFit>(m, "RobustFit")
        .def_readonly("beta", &RobustFit::beta)
        .def_readonly("sigma", &RobustFit::sigma)
        .def_readonly("huber_weights", &RobustFit::huber_weights)
        .def_readonly("truncated_weights", &RobustFit::truncated_weights)
        .def_readonly("std_residuals", &RobustFit::std_residuals)
        .def_readonly("iterations", &RobustFit::iterations)
        .def_readonly("converged", &RobustFit::converged);

    m.def("huber_rho", &huber_rho, py::arg("u"), py::arg("b") = 1.345);
    m.def("huber_psi", &huber_psi, py::arg("u"), py::arg("b") = 1.345);
    m.def("huber_weight", &huber_weight, py::arg("u"), py::arg("b") = 1.345);
    m.def("mad_scale", py::overload_cast<const Eigen::VectorXd&>(&mad_scale), py::arg("residuals"));
    m.def("irls_fit", &irls_fit, py::arg("z"), py::arg("y"), py::arg("config") = FitConfig{});
    m.def(
        "ols_fit",
        [](const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
            const OlsFit f = ols_fit(z, y);
            return py::make_tuple(f.beta, f.sigma);
        },
        py::arg("z"), py::arg("y"), "Least-squares coefficients and residual SD (divisor n - Q).");

    m.def(
        "bspline_design",
        [](const Eigen::MatrixXd& x, const std::vector<int>& knots, const std::vector<bool>& linear) {
            const auto kinds = kinds_from(linear, x.cols());
            return build_design(x, make_spec(x, knots, kinds));
        },
        py::arg("x"), py::arg("knots"), py::arg("linear") = std::vector<bool>{},
        "Additive design matrix: intercept plus K + 3 cubic B-spline columns per covariate.");
    m.def(
        "knot_positions",
        [](const Eigen::VectorXd& column, int k) {
            const CovariateTerm t = knot_sequence(std::span<const double>(column.data(), column.size()), k);
            return py::make_tuple(t.lower, t.upper, t.interior_knots);
        },
        py::arg("column"), py::arg("k"));

    py::class_<WeightedEcdf>(m, "WeightedEcdf")
        .def(py::init<const Eigen::VectorXd&, const Eigen::VectorXd&>(), py::arg("values"), py::arg("weights"))
        .def("cdf", &WeightedEcdf::cdf)
        .def("quantile", &WeightedEcdf::quantile)
        .def_property_readonly("support", &WeightedEcdf::support)
        .def_property_readonly("weights", &WeightedEcdf::weights);

    py::class_<PopulationFit>(m, "PopulationFit")
        .def_readonly("fit", &PopulationFit::fit)
        .def_property_readonly("knots", [](const PopulationFit& f) { return f.spec.knot_counts(); })
        .def("predict_mean",
             [](const PopulationFit& f, const std::vector<double>& x) { return f.predict_mean(x); })
        .def("adjusted_values",
             [](const PopulationFit& f, const std::vector<double>& x) { return f.adjusted_values(x); });

    m.def(
        "fit_population",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const std::vector<int>& knots, const FitConfig& cfg,
           const std::string& estimator, const std::vector<bool>& linear) {
            const auto kinds = kinds_from(linear, x.cols());
            return fit_population(make_sample(y, x), knots, cfg, parse_fit_estimator(estimator), kinds);
        },
        py::arg("y"), py::arg("x"), py::arg("knots"), py::arg("config") = FitConfig{},
        py::arg("estimator") = "robust", py::arg("linear") = std::vector<bool>{});

    py::class_<PopulationPair>(m, "PopulationPair")
        .def(py::init([](PopulationFit nd, PopulationFit d) {
                 PopulationPair p{std::move(nd), std::move(d)};
                 p.validate();
                 return p;
             }),
             py::arg("nondiseased"), py::arg("diseased"))
        .def_readonly("nondiseased", &PopulationPair::nondiseased)
        .def_readonly("diseased", &PopulationPair::diseased);

    m.def(
        "roc_curve",
        [](const PopulationPair& pair, const std::vector<double>& x, int t_points, int simpson_intervals) {
            const auto grid = uniform_grid(t_points);
            const RocResult r = roc_curve(pair, x, grid, simpson_intervals);
            py::dict d;
            d["t"] = r.t_grid;
            d["roc"] = r.roc_values;
            d["auc"] = r.auc_closed_form;
            d["auc_simpson"] = r.auc_simpson;
            return d;
        },
        py::arg("pair"), py::arg("x"), py::arg("t_points") = kDefaultTGridSize,
        py::arg("simpson_intervals") = kDefaultSimpsonIntervals);
    m.def(
        "auc", [](const PopulationPair& pair, const std::vector<double>& x) { return auc_closed_form(pair, x); },
        py::arg("pair"), py::arg("x"));
    m.def(
        "auc_simpson",
        [](const PopulationPair& pair, const std::vector<double>& x, int m) { return auc_simpson(pair, x, m); },
        py::arg("pair"), py::arg("x"), py::arg("intervals") = kDefaultSimpsonIntervals);
    m.def(
        "youden",
        [](const PopulationPair& pair, const std::vector<double>& x) {
            const YoudenResult r = youden(pair, x);
            return py::make_tuple(r.index, r.threshold);
        },
        py::arg("pair"), py::arg("x"), "Youden index and its smallest maximizing threshold.");
    m.def(
        "unconditional_auc",
        [](const Eigen::VectorXd& y_nd, const Eigen::VectorXd& y_d, std::optional<Eigen::VectorXd> w_nd,
           std::optional<Eigen::VectorXd> w_d) {
            const Eigen::VectorXd a = w_nd.value_or(Eigen::VectorXd::Ones(y_nd.size()));
            const Eigen::VectorXd b = w_d.value_or(Eigen::VectorXd::Ones(y_d.size()));
            const auto s = [](const Eigen::VectorXd& v) {
                return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
            };
            return unconditional_auc(s(y_nd), s(y_d), s(a), s(b));
        },
        py::arg("y_nd"), py::arg("y_d"), py::arg("w_nd") = py::none(), py::arg("w_d") = py::none());
    m.def(
        "robust_unconditional_auc",
        [](const Eigen::VectorXd& y_nd, const Eigen::VectorXd& y_d, const FitConfig& cfg) {
            return robust_unconditional_auc(y_nd, y_d, cfg).auc;
        },
        py::arg("y_nd"), py::arg("y_d"), py::arg("config") = FitConfig{});

    m.def(
        "select_knots",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const std::vector<std::vector<int>>& candidates,
           const FitConfig& cfg) {
            const RaicReport r = select_knots(make_sample(y, x), candidates, cfg, {}, false);
            py::list rows;
            for (const auto& c : r.candidates) {
                py::dict d;
                d["knots"] = c.knots;
                d["raic"] = c.value ? py::cast(c.value->raic) : py::none();
                d["trace"] = c.value ? py::cast(c.value->trace) : py::none();
                d["error"] = c.error;
                rows.append(d);
            }
            py::dict out;
            out["candidates"] = rows;
            out["selected"] = r.best().knots;
            return out;
        },
        py::arg("y"), py::arg("x"), py::arg("candidates"), py::arg("config") = FitConfig{});
    m.def(
        "raic",
        [](const RobustFit& fit, const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
            const RaicValue v = raic(fit, z, y);
            return py::make_tuple(v.raic, v.trace);
        },
        py::arg("fit"), py::arg("z"), py::arg("y"));

    m.def(
        "residual_bootstrap",
        [](const PopulationPair& pair, const Eigen::VectorXd& y_nd, const Eigen::MatrixXd& x_nd,
           const Eigen::VectorXd& y_d, const Eigen::MatrixXd& x_d, const std::vector<std::vector<double>>& points,
           int replicates, double alpha, std::uint64_t seed, int t_points, unsigned threads) {
            BootstrapConfig cfg;
            cfg.replicates = replicates;
            cfg.alpha = alpha;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.fit = pair.nondiseased.fit.config;
            const auto grid = t_points > 0 ? uniform_grid(t_points) : std::vector<double>{};
            for (const auto& x : points) cfg.targets.push_back({x, grid});
            BootstrapResult r;
            {
                py::gil_scoped_release release;
                r = residual_bootstrap(pair, make_sample(y_nd, x_nd), make_sample(y_d, x_d), cfg);
            }
            py::list targets;
            for (const auto& t : r.targets) {
                py::dict d;
                d["x"] = t.x;
                d["auc"] = interval(t.auc);
                d["youden_index"] = interval(t.youden_index);
                d["youden_threshold"] = interval(t.youden_threshold);
                py::list roc;
                for (const auto& iv : t.roc) roc.append(interval(iv));
                d["t"] = t.t_grid;
                d["roc"] = roc;
                targets.append(d);
            }
            py::dict out;
            out["targets"] = targets;
            out["failed"] = r.failed;
            out["reliability_warning"] = r.reliability_warning;
            return out;
        },
        py::arg("pair"), py::arg("y_nd"), py::arg("x_nd"), py::arg("y_d"), py::arg("x_d"), py::arg("points"),
        py::arg("replicates") = 1000, py::arg("alpha") = 0.05, py::arg("seed") = 1, py::arg("t_points") = 0,
        py::arg("threads") = 1);

    py::class_<Scenario>(m, "Scenario")
        .def_static("preset", &Scenario::preset, py::arg("name"))
        .def_readonly("name", &Scenario::name)
        .def_readwrite("contamination_nd", &Scenario::contamination_nd)
        .def_readwrite("contamination_d", &Scenario::contamination_d)
        .def_readwrite("kappa_nd", &Scenario::kappa_nd)
        .def_readwrite("kappa_d", &Scenario::kappa_d)
        .def("set_contamination", &Scenario::set_contamination, py::arg("fraction"))
        .def_property_readonly("covariate_count", &Scenario::covariate_count);

    m.def(
        "generate",
        [](const Scenario& scn, std::size_t n_nd, std::size_t n_d, std::uint64_t seed) {
            const SimulatedData s = generate(scn, n_nd, n_d, seed);
            py::dict d;
            d["y_nd"] = s.nondiseased.outcome;
            d["x_nd"] = s.nondiseased.covariates;
            d["y_d"] = s.diseased.outcome;
            d["x_d"] = s.diseased.covariates;
            d["contaminated_nd"] = s.contaminated_nd;
            d["contaminated_d"] = s.contaminated_d;
            return d;
        },
        py::arg("scenario"), py::arg("n_nd"), py::arg("n_d"), py::arg("seed"));
    m.def(
        "true_auc", [](const Scenario& scn, const std::vector<double>& x) { return true_auc(scn, x); },
        py::arg("scenario"), py::arg("x"));
    m.def(
        "run_study",
        [](const Scenario& scn, std::size_t n_nd, std::size_t n_d, int replicates, std::uint64_t seed,
           const std::vector<std::string>& estimators, unsigned threads) {
            StudyConfig cfg;
            cfg.scenario = scn;
            cfg.n_nd = n_nd;
            cfg.n_d = n_d;
            cfg.replicates = replicates;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.estimators.clear();
            for (const auto& e : estimators) cfg.estimators.push_back(parse_estimator(e));
            McReport r;
            {
                py::gil_scoped_release release;
                r = run_study(cfg);
            }
            py::dict out;
            for (const auto& er : r.estimators) {
                std::vector<double> x, truth, mean, lower, upper;
                for (const auto& p : er.points) {
                    x.push_back(p.x.front());
                    truth.push_back(p.truth);
                    mean.push_back(p.mean);
                    lower.push_back(p.lower);
                    upper.push_back(p.upper);
                }
                py::dict d;
                d["x"] = x;
                d["truth"] = truth;
                d["mean"] = mean;
                d["lower"] = lower;
                d["upper"] = upper;
                d["failed"] = er.failed_replicates;
                d["max_abs_bias"] = er.max_abs_bias();
                out[py::str(to_string(er.estimator))] = d;
            }
            return out;
        },
        py::arg("scenario"), py::arg("n_nd") = 200, py::arg("n_d") = 100, py::arg("replicates") = 100,
        py::arg("seed") = 1, py::arg("estimators") = std::vector<std::string>{"robust", "ols_linear", "ols_bspline"},
        py::arg("threads") = 1);
}
