#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robroc/bootstrap.hpp"
#include "robroc/cli_io.hpp"
#include "robroc/errors.hpp"
#include "robroc/model_select.hpp"
#include "robroc/roc_auc.hpp"
#include "robroc/simulate.hpp"

namespace robroc::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct FlagBinding {
    const char* flag;
    const char* key;
    const char* help;
};

// Flags that override configuration keys of the same meaning.
const std::vector<FlagBinding>& flag_bindings() {
    static const std::vector<FlagBinding> b{
        {"--data", "data", "input CSV file"},
        {"--outcome", "outcome", "outcome column (default y)"},
        {"--disease", "disease", "0/1 disease column (default d)"},
        {"--covariates", "covariates", "comma-separated covariate columns"},
        {"--linear", "linear", "covariates entering linearly"},
        {"--missing", "missing", "error|skip rows with missing values"},
        {"--huber-b", "huber_b", "Huber threshold (default 1.345)"},
        {"--truncation", "v", "ECDF weight truncation point (default 3)"},
        {"--knots", "knots", "auto or one knot count per covariate"},
        {"--knot-candidates", "knot_candidates", "candidate knot counts for auto selection"},
        {"--x", "x", "covariate point, e.g. 0.5, 57,1 or age=57"},
        {"--x-grid", "x_grid", "lo:hi:n grid over the grid variable"},
        {"--grid-var", "grid_var", "covariate varied by --x-grid"},
        {"--at", "at", "values of the other covariates, name=value,..."},
        {"--t-points", "t_points", "ROC grid size (default 201)"},
        {"--simpson-intervals", "simpson_intervals", "Simpson panels (default 200)"},
        {"--bootstrap-reps", "bootstrap_reps", "bootstrap replicates (default 1000)"},
        {"--alpha", "alpha", "1 - confidence level (default 0.05)"},
        {"--scenario", "scenario", "simulation scenario I-IV or custom"},
        {"--contamination", "contamination", "contamination fractions, comma-separated"},
        {"--sizes", "sizes", "n_nondiseased,n_diseased"},
        {"--kappa", "kappa", "contamination shift(s) in SD units"},
        {"--contamination-kind", "contamination_kind", "location|radial"},
        {"--radial-factor", "radial_factor", "SD inflation of radial contamination"},
        {"--estimators", "estimators", "robust,ols_linear,ols_bspline"},
        {"--knot-contest", "knot_contest", "rAIC contest: per-covariate counts (0,3) or explicit vectors (0,0;3,3)"},
        {"--sim-grid", "sim_grid", "lo:hi:n grid over the first covariate"},
        {"--seed", "seed", "random seed"},
        {"--threads", "threads", "worker threads (0 = all cores)"},
        {"--out", "out", "output directory"},
    };
    return b;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string knots_label(const std::vector<int>& knots) {
    std::vector<std::string> s;
    for (int k : knots) s.push_back(std::to_string(k));
    return join(s, ";");
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// Everything a data-driven command needs once the CSV is loaded.
struct Session {
    RunConfig cfg;
    Dataset data;
    std::vector<TermKind> kinds;
    PopulationPair pair;
    std::optional<RaicReport> raic_nd;
    std::optional<RaicReport> raic_d;
};

std::vector<std::string> split_names_by(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const auto b = cur.find_first_not_of(' ');
        const auto e = cur.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::string> split_names(const std::string& s) { return split_names_by(s, ','); }

std::size_t covariate_position(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw UsageError("'" + name + "' is not a covariate");
    return static_cast<std::size_t>(it - names.begin());
}

// "0.5", "57,1" or "age=57,sex=1".
std::vector<double> parse_point(const std::string& text, const std::vector<std::string>& names) {
    const auto parts = split_names(text);
    const bool named = !parts.empty() && parts.front().find('=') != std::string::npos;
    if (!named) {
        auto x = parse_double_list(text, "x");
        if (x.size() != names.size()) {
            throw UsageError("x has " + std::to_string(x.size()) + " values but there are " +
                             std::to_string(names.size()) + " covariates");
        }
        return x;
    }
    std::vector<double> x(names.size(), std::nan(""));
    for (const auto& p : parts) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("mixed named and positional values in '" + text + "'");
        x[covariate_position(names, p.substr(0, eq))] = parse_double(p.substr(eq + 1), "x");
    }
    for (std::size_t h = 0; h < x.size(); ++h) {
        if (std::isnan(x[h])) throw UsageError("no value given for covariate '" + names[h] + "'");
    }
    return x;
}

std::vector<std::vector<double>> evaluation_points(const Session& s, bool allow_default) {
    const auto& names = s.data.covariate_names;
    const auto& cfg = s.cfg;
    if (!cfg.x.empty() && !cfg.x_grid.empty()) throw UsageError("give either x or x_grid, not both");
    if (!cfg.x.empty()) return {parse_point(cfg.x, names)};
    if (!cfg.x_grid.empty()) {
        std::size_t var = 0;
        if (!cfg.grid_var.empty()) var = covariate_position(names, cfg.grid_var);
        else if (names.size() > 1) throw UsageError("grid_var is required with more than one covariate");
        std::vector<double> base(names.size(), std::nan(""));
        if (!cfg.at.empty()) {
            for (const auto& p : split_names(cfg.at)) {
                const auto eq = p.find('=');
                if (eq == std::string::npos) throw UsageError("at entries must be name=value");
                base[covariate_position(names, p.substr(0, eq))] = parse_double(p.substr(eq + 1), "at");
            }
        }
        for (std::size_t h = 0; h < names.size(); ++h) {
            if (h != var && std::isnan(base[h])) {
                throw UsageError("covariate '" + names[h] + "' needs a fixed value via at");
            }
        }
        std::vector<std::vector<double>> pts;
        for (double v : parse_grid(cfg.x_grid)) {
            auto x = base;
            x[var] = v;
            pts.push_back(std::move(x));
        }
        return pts;
    }
    if (allow_default && names.size() == 1) {
        std::vector<std::vector<double>> pts;
        for (double v : default_covariate_grid(s.pair)) pts.push_back({v});
        return pts;
    }
    throw UsageError(allow_default ? "x or x_grid is required with more than one covariate" : "x or x_grid is required");
}

Session load_session(const RunConfig& cfg, std::ostream& err) {
    Session s;
    s.cfg = cfg;
    if (cfg.data.empty()) throw UsageError("no data file given (--data or data = ...)");
    if (cfg.mapping.covariates.empty()) throw UsageError("no covariates given (--covariates or covariates = ...)");
    s.data = read_csv(cfg.data, cfg.mapping, cfg.missing);
    if (s.data.skipped_rows > 0) {
        err << "warning: skipped " << s.data.skipped_rows << " row(s) with missing values\n";
    }
    s.kinds = cfg.term_kinds(s.data.covariate_names);
    const std::size_t p = s.data.covariate_names.size();
    if (cfg.knots == "auto") {
        const std::vector<std::vector<int>> candidates(p, cfg.knot_candidates);
        s.raic_nd = select_knots(s.data.nondiseased, candidates, cfg.fit, s.kinds);
        s.raic_d = select_knots(s.data.diseased, candidates, cfg.fit, s.kinds);
        s.pair.nondiseased = *s.raic_nd->best().fit;
        s.pair.diseased = *s.raic_d->best().fit;
    } else {
        const auto knots = parse_int_list(cfg.knots, "knots");
        if (knots.size() != p) {
            throw UsageError("knots lists " + std::to_string(knots.size()) + " counts for " + std::to_string(p) +
                             " covariates");
        }
        s.pair.nondiseased = fit_population(s.data.nondiseased, knots, cfg.fit, Estimator::robust, s.kinds);
        s.pair.diseased = fit_population(s.data.diseased, knots, cfg.fit, Estimator::robust, s.kinds);
    }
    for (const auto* f : {&s.pair.nondiseased, &s.pair.diseased}) {
        if (!f->fit.converged) {
            err << "warning: IRLS did not converge within " << cfg.fit.max_iterations << " iterations\n";
        }
    }
    return s;
}

class Runner {
public:
    Runner(RunConfig cfg, KeyValues effective, std::string command, std::ostream& out, std::ostream& err)
        : cfg_(std::move(cfg)), effective_(std::move(effective)), command_(std::move(command)), out_(out), err_(err) {}

    void run() {
        dir_ = cfg_.out_dir;
        fs::create_directories(dir_);
        if (command_ == "fit") fit();
        else if (command_ == "select-knots") select();
        else if (command_ == "roc") roc();
        else if (command_ == "auc") auc();
        else if (command_ == "youden") youden_cmd();
        else if (command_ == "bootstrap") bootstrap();
        else if (command_ == "uauc") uauc();
        else if (command_ == "simulate") simulate();
        else throw UsageError("unknown command '" + command_ + "'");
        write_manifest();
    }

private:
    RunConfig cfg_;
    KeyValues effective_;
    std::string command_;
    std::ostream& out_;
    std::ostream& err_;
    fs::path dir_;
    std::vector<std::string> outputs_;
    json notes_ = json::object();

    void emit(const std::string& name, const Table& t) {
        write_table(dir_ / name, t);
        outputs_.push_back(name);
    }

    std::vector<std::string> point_cells(const std::vector<double>& x) const {
        std::vector<std::string> cells;
        for (double v : x) cells.push_back(format_double(v));
        return cells;
    }

    std::string point_text(const std::vector<std::string>& names, const std::vector<double>& x) const {
        std::vector<std::string> parts;
        for (std::size_t h = 0; h < x.size(); ++h) parts.push_back(names[h] + "=" + format_double(x[h]));
        return join(parts, ", ");
    }

    static Table raic_table(const Session& s) {
        Table t{{"group", "knots", "raic", "trace", "selected", "error"}, {}};
        const auto add = [&](const char* group, const RaicReport& r) {
            for (std::size_t i = 0; i < r.candidates.size(); ++i) {
                const auto& c = r.candidates[i];
                t.add_row({group, knots_label(c.knots), c.value ? format_double(c.value->raic) : "NA",
                           c.value ? format_double(c.value->trace) : "NA", i == r.selected ? "1" : "0", c.error});
            }
        };
        add("nondiseased", *s.raic_nd);
        add("diseased", *s.raic_d);
        return t;
    }

    void fit() {
        const Session s = load_session(cfg_, err_);
        Table summary{{"group", "n", "knots", "sigma", "iterations", "converged", "downweighted", "truncated"}, {}};
        Table coef{{"group", "index", "beta"}, {}};
        std::vector<std::string> wcols{"group", "row", "outcome"};
        for (const auto& n : s.data.covariate_names) wcols.push_back(n);
        for (const char* c : {"fitted", "std_residual", "huber_weight", "truncated_weight"}) wcols.push_back(c);
        Table weights{wcols, {}};

        out_ << "Robust location-scale fits (Huber b = " << format_double(cfg_.fit.b)
             << ", truncation v = " << format_double(cfg_.fit.v) << ")\n";
        const auto add = [&](const char* group, const GroupSample& g, const PopulationFit& f,
                             const std::vector<std::size_t>& rows) {
            const auto& r = f.fit;
            int down = 0, trunc = 0;
            for (Eigen::Index j = 0; j < r.size(); ++j) {
                down += r.huber_weights(j) < 1.0;
                trunc += r.truncated_weights(j) < 1.0;
            }
            summary.add_row({group, std::to_string(g.size()), knots_label(f.spec.knot_counts()), format_double(r.sigma),
                             std::to_string(r.iterations), r.converged ? "1" : "0", std::to_string(down),
                             std::to_string(trunc)});
            for (Eigen::Index k = 0; k < r.beta.size(); ++k) {
                coef.add_row({group, std::to_string(k), format_double(r.beta(k))});
            }
            const Eigen::VectorXd fitted = f.fitted(build_design(g.covariates, f.spec));
            for (Eigen::Index j = 0; j < g.size(); ++j) {
                std::vector<std::string> row{group, std::to_string(rows[static_cast<std::size_t>(j)]),
                                             format_double(g.outcome(j))};
                for (Eigen::Index h = 0; h < g.covariates.cols(); ++h) row.push_back(format_double(g.covariates(j, h)));
                row.push_back(format_double(fitted(j)));
                row.push_back(format_double(r.std_residuals(j)));
                row.push_back(format_double(r.huber_weights(j)));
                row.push_back(format_double(r.truncated_weights(j)));
                weights.add_row(std::move(row));
            }
            out_ << "  " << std::left << std::setw(12) << group << " n=" << g.size() << "  knots=" << knots_label(f.spec.knot_counts())
                 << "  sigma=" << fixed(r.sigma) << "  iterations=" << r.iterations
                 << (r.converged ? "" : " (not converged)") << "  downweighted=" << down << "  truncated=" << trunc
                 << "\n";
        };
        add("nondiseased", s.data.nondiseased, s.pair.nondiseased, s.data.rows_nd);
        add("diseased", s.data.diseased, s.pair.diseased, s.data.rows_d);
        emit("fit_summary.csv", summary);
        emit("coefficients.csv", coef);
        emit("weights.csv", weights);
        if (s.raic_nd) emit("raic.csv", raic_table(s));
        out_ << "Wrote " << join(outputs_, ", ") << " to " << dir_.string() << "\n";
    }

    void select() {
        if (cfg_.knots != "auto") {
            err_ << "note: select-knots ignores knots = " << cfg_.knots << "\n";
            cfg_.knots = "auto";
        }
        const Session s = load_session(cfg_, err_);
        emit("raic.csv", raic_table(s));
        out_ << "rAIC knot selection over candidates {" << knots_label(cfg_.knot_candidates) << "}\n";
        for (const auto& [group, r] : {std::pair{"nondiseased", &*s.raic_nd}, std::pair{"diseased", &*s.raic_d}}) {
            out_ << "  " << std::left << std::setw(12) << group << " selected knots " << knots_label(r->best().knots)
                 << " (rAIC " << fixed(r->best().value->raic) << ")\n";
        }
    }

    void roc() {
        const Session s = load_session(cfg_, err_);
        const auto pts = evaluation_points(s, false);
        const auto t_grid = uniform_grid(cfg_.t_points);
        std::vector<std::string> cols = s.data.covariate_names;
        cols.insert(cols.end(), {"t", "roc"});
        Table curve{cols, {}};
        Table summary{s.data.covariate_names, {}};
        summary.columns.insert(summary.columns.end(), {"auc", "auc_simpson"});
        for (const auto& x : pts) {
            const auto r = roc_curve(s.pair, x, t_grid, cfg_.simpson_intervals);
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                auto row = point_cells(x);
                row.push_back(format_double(t_grid[i]));
                row.push_back(format_double(r.roc_values[i]));
                curve.add_row(std::move(row));
            }
            auto row = point_cells(x);
            row.push_back(format_double(r.auc_closed_form));
            row.push_back(format_double(r.auc_simpson));
            summary.add_row(std::move(row));
            out_ << "ROC at " << point_text(s.data.covariate_names, x) << ": AUC " << fixed(r.auc_closed_form)
                 << " (Simpson " << fixed(r.auc_simpson) << ")\n";
        }
        emit("roc.csv", curve);
        emit("roc_auc.csv", summary);
    }

    void auc() {
        const Session s = load_session(cfg_, err_);
        const auto pts = evaluation_points(s, true);
        std::vector<std::string> cols = s.data.covariate_names;
        cols.insert(cols.end(), {"auc", "auc_simpson"});
        std::optional<BootstrapResult> boot;
        if (cfg_.bootstrap_auc) {
            cols.insert(cols.end(), {"lower", "upper"});
            BootstrapConfig bc = bootstrap_config();
            for (const auto& x : pts) bc.targets.push_back({x, {}});
            boot = residual_bootstrap(s.pair, s.data.nondiseased, s.data.diseased, bc);
            report_bootstrap(*boot);
        }
        Table t{cols, {}};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto row = point_cells(pts[i]);
            const double closed = auc_closed_form(s.pair, pts[i]);
            row.push_back(format_double(closed));
            row.push_back(format_double(auc_simpson(s.pair, pts[i], cfg_.simpson_intervals)));
            if (boot) {
                row.push_back(format_double(boot->targets[i].auc.lower));
                row.push_back(format_double(boot->targets[i].auc.upper));
            }
            t.add_row(std::move(row));
        }
        emit("auc.csv", t);
        double lo = 1.0, hi = 0.0;
        for (const auto& row : t.rows) {
            const double a = parse_double(row[s.data.covariate_names.size()], "auc");
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        out_ << "Covariate-specific AUC at " << pts.size() << " point(s): range " << fixed(lo) << " to " << fixed(hi)
             << "\n";
    }

    void youden_cmd() {
        const Session s = load_session(cfg_, err_);
        const auto pts = evaluation_points(s, true);
        std::vector<std::string> cols = s.data.covariate_names;
        cols.insert(cols.end(), {"youden_index", "threshold"});
        Table t{cols, {}};
        for (const auto& x : pts) {
            const auto y = youden(s.pair, x);
            auto row = point_cells(x);
            row.push_back(format_double(y.index));
            row.push_back(format_double(y.threshold));
            t.add_row(std::move(row));
            if (pts.size() <= 5) {
                out_ << "Youden at " << point_text(s.data.covariate_names, x) << ": J = " << fixed(y.index)
                     << " at threshold " << fixed(y.threshold) << "\n";
            }
        }
        if (pts.size() > 5) out_ << "Youden index at " << pts.size() << " points\n";
        emit("youden.csv", t);
    }

    BootstrapConfig bootstrap_config() const {
        BootstrapConfig bc;
        bc.replicates = cfg_.bootstrap_reps;
        bc.alpha = cfg_.alpha;
        bc.seed = cfg_.seed;
        bc.fit = cfg_.fit;
        bc.threads = cfg_.threads;
        return bc;
    }

    void report_bootstrap(const BootstrapResult& r) {
        notes_["bootstrap_failed_replicates"] = r.failed;
        notes_["bootstrap_reliability_warning"] = r.reliability_warning;
        if (r.reliability_warning) {
            err_ << "warning: " << r.failed << " of " << r.replicate_ok.size()
                 << " bootstrap refits failed; intervals may be unreliable\n";
        }
    }

    void bootstrap() {
        const Session s = load_session(cfg_, err_);
        const auto pts = evaluation_points(s, false);
        BootstrapConfig bc = bootstrap_config();
        const auto t_grid = uniform_grid(cfg_.t_points);
        for (const auto& x : pts) bc.targets.push_back({x, t_grid});
        const auto r = residual_bootstrap(s.pair, s.data.nondiseased, s.data.diseased, bc);
        report_bootstrap(r);

        std::vector<std::string> cols = s.data.covariate_names;
        for (const char* c : {"auc", "auc_lower", "auc_upper", "youden_index", "youden_lower", "youden_upper",
                              "threshold", "threshold_lower", "threshold_upper"}) {
            cols.push_back(c);
        }
        Table summary{cols, {}};
        cols = s.data.covariate_names;
        cols.insert(cols.end(), {"t", "roc", "lower", "upper"});
        Table bands{cols, {}};
        const int level = static_cast<int>(std::lround(100.0 * (1.0 - cfg_.alpha)));
        for (const auto& tr : r.targets) {
            auto row = point_cells(tr.x);
            for (const auto* iv : {&tr.auc, &tr.youden_index, &tr.youden_threshold}) {
                row.push_back(format_double(iv->estimate));
                row.push_back(format_double(iv->lower));
                row.push_back(format_double(iv->upper));
            }
            summary.add_row(std::move(row));
            for (std::size_t i = 0; i < tr.t_grid.size(); ++i) {
                auto b = point_cells(tr.x);
                b.push_back(format_double(tr.t_grid[i]));
                b.push_back(format_double(tr.roc[i].estimate));
                b.push_back(format_double(tr.roc[i].lower));
                b.push_back(format_double(tr.roc[i].upper));
                bands.add_row(std::move(b));
            }
            out_ << "AUC at " << point_text(s.data.covariate_names, tr.x) << ": " << fixed(tr.auc.estimate) << "  "
                 << level << "% CI [" << fixed(tr.auc.lower) << ", " << fixed(tr.auc.upper) << "]\n";
        }
        out_ << r.replicate_ok.size() - static_cast<std::size_t>(r.failed) << " of " << r.replicate_ok.size()
             << " replicates succeeded\n";
        emit("bootstrap_auc.csv", summary);
        emit("bootstrap_roc.csv", bands);
    }

    void uauc() {
        if (cfg_.data.empty()) throw UsageError("no data file given (--data or data = ...)");
        auto mapping = cfg_.mapping;
        mapping.covariates.clear();
        const Dataset d = read_csv(cfg_.data, mapping, cfg_.missing);
        if (d.skipped_rows > 0) err_ << "warning: skipped " << d.skipped_rows << " row(s) with missing values\n";
        const auto r = robust_unconditional_auc(d.nondiseased.outcome, d.diseased.outcome, cfg_.fit);
        const Eigen::VectorXd one_nd = Eigen::VectorXd::Ones(d.nondiseased.size());
        const Eigen::VectorXd one_d = Eigen::VectorXd::Ones(d.diseased.size());
        const auto span = [](const Eigen::VectorXd& v) {
            return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
        };
        const double plain = unconditional_auc(span(d.nondiseased.outcome), span(d.diseased.outcome), span(one_nd),
                                               span(one_d));
        Table t{{"n_nondiseased", "n_diseased", "auc_robust", "auc_unweighted"}, {}};
        t.add_row({std::to_string(d.nondiseased.size()), std::to_string(d.diseased.size()), format_double(r.auc),
                   format_double(plain)});
        emit("uauc.csv", t);
        out_ << "Unconditional AUC: robust " << fixed(r.auc) << ", unweighted " << fixed(plain) << "\n";
    }

    void simulate() {
        StudyConfig sc;
        sc.scenario = cfg_.make_scenario();
        sc.n_nd = cfg_.n_nd;
        sc.n_d = cfg_.n_d;
        sc.replicates = cfg_.reps;
        sc.seed = cfg_.seed;
        sc.fit = cfg_.fit;
        sc.threads = cfg_.threads;
        sc.estimators.clear();
        for (const auto& e : cfg_.estimators) sc.estimators.push_back(parse_estimator(e));
        if (sc.estimators.empty()) throw UsageError("no estimators selected");
        const std::size_t p = sc.scenario.covariate_count();
        if (!cfg_.knots.empty() && cfg_.knots != "auto") {
            sc.robust_knots = parse_int_list(cfg_.knots, "knots");
            if (sc.robust_knots.size() != p) throw UsageError("knots needs one count per scenario covariate");
            sc.bspline_knots = sc.robust_knots;
        }
        if (cfg_.knot_contest.find(';') != std::string::npos) {
            for (const auto& part : split_names_by(cfg_.knot_contest, ';')) {
                sc.knot_configurations.push_back(parse_int_list(part, "knot_contest"));
                if (sc.knot_configurations.back().size() != p) {
                    throw UsageError("knot_contest configurations need one count per scenario covariate");
                }
            }
        } else if (!cfg_.knot_contest.empty()) {
            sc.knot_contest.assign(p, parse_int_list(cfg_.knot_contest, "knot_contest"));
        }
        if (!cfg_.sim_grid.empty()) {
            const auto base = default_study_grid(sc.scenario, 1).front();
            for (double v : parse_grid(cfg_.sim_grid)) {
                auto x = base;
                x[0] = v;
                sc.grid.push_back(std::move(x));
            }
        }

        std::vector<std::string> xcols;
        for (std::size_t h = 0; h < p; ++h) xcols.push_back("x" + std::to_string(h + 1));
        std::map<StudyEstimator, Table> tables;
        for (auto e : sc.estimators) {
            auto cols = std::vector<std::string>{"contamination"};
            cols.insert(cols.end(), xcols.begin(), xcols.end());
            cols.insert(cols.end(), {"truth", "mean", "lower", "upper", "bias", "used"});
            tables[e] = Table{cols, {}};
        }
        Table knots{{"contamination", "group", "knots", "count", "percent"}, {}};
        Table overview{{"contamination", "estimator", "replicates", "failed", "max_abs_bias"}, {}};

        out_ << "Scenario " << sc.scenario.name << ", sizes (" << sc.n_nd << ", " << sc.n_d << "), " << sc.replicates
             << " replicates, seed " << sc.seed << "\n";
        for (double f : cfg_.contamination) {
            sc.scenario.set_contamination(f);
            const McReport rep = run_study(sc);
            for (const auto& er : rep.estimators) {
                for (const auto& pt : er.points) {
                    std::vector<std::string> row{format_double(f)};
                    for (double v : pt.x) row.push_back(format_double(v));
                    row.push_back(format_double(pt.truth));
                    row.push_back(format_double(pt.mean));
                    row.push_back(format_double(pt.lower));
                    row.push_back(format_double(pt.upper));
                    row.push_back(format_double(pt.mean - pt.truth));
                    row.push_back(std::to_string(pt.used));
                    tables[er.estimator].add_row(std::move(row));
                }
                const double bias = er.max_abs_bias();
                overview.add_row({format_double(f), to_string(er.estimator), std::to_string(rep.replicates),
                                  std::to_string(er.failed_replicates), format_double(bias)});
                out_ << "  contamination " << fixed(f, 3) << "  " << std::left << std::setw(12)
                     << to_string(er.estimator) << " max |bias| " << fixed(bias) << "  failed "
                     << er.failed_replicates << "\n";
            }
            if (rep.knot_selection) {
                const auto& ks = *rep.knot_selection;
                for (const auto& [group, counts] :
                     {std::pair{"nondiseased", &ks.nondiseased}, std::pair{"diseased", &ks.diseased}}) {
                    for (const auto& [k, c] : *counts) {
                        const double pct = ks.percent(std::string(group) == "diseased", k);
                        knots.add_row({format_double(f), group, knots_label(k), std::to_string(c), format_double(pct)});
                        out_ << "  contamination " << fixed(f, 3) << "  " << group << " knots " << knots_label(k)
                             << " selected " << fixed(pct, 1) << "%\n";
                    }
                }
            }
        }
        for (auto& [e, t] : tables) emit("simulate_" + to_string(e) + ".csv", t);
        emit("simulate_summary.csv", overview);
        if (!cfg_.knot_contest.empty()) emit("knot_selection.csv", knots);
    }

    void write_manifest() {
        json m;
        m["tool"] = "robroc";
        m["version"] = ROBROC_VERSION;
        m["command"] = command_;
        m["seed"] = cfg_.seed;
        m["config"] = effective_;
        m["outputs"] = outputs_;
        if (!notes_.empty()) m["diagnostics"] = notes_;
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        if (!f) throw DataError("cannot write manifest in '" + dir_.string() + "'");
        f << m.dump(2) << '\n';
    }
};

int exit_status(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return 2;
    return 3;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust covariate-specific ROC analysis", "robroc"};
    app.set_version_flag("--version", std::string(ROBROC_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool ci = false;
    app.add_option("-c,--config", config_path, "key=value configuration file")->envname(kConfigEnvVar);
    app.add_option("--set", overrides, "override a configuration key, key=value (repeatable)");

    const auto& bindings = flag_bindings();
    std::deque<std::string> values(bindings.size());
    std::vector<CLI::Option*> options;
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        options.push_back(app.add_option(bindings[i].flag, values[i], bindings[i].help));
    }
    std::string reps;
    app.add_option("--reps", reps, "Monte Carlo replicates (simulate) or bootstrap replicates (bootstrap, auc)");

    const std::vector<std::pair<const char*, const char*>> commands{
        {"fit", "fit both groups; write fit summary, coefficients and weights"},
        {"select-knots", "rAIC table over knot candidates"},
        {"roc", "ROC curve at the requested covariate point(s)"},
        {"auc", "covariate-specific AUC over a covariate grid"},
        {"youden", "covariate-specific Youden index"},
        {"bootstrap", "residual bootstrap confidence intervals"},
        {"uauc", "tie-corrected unconditional AUC"},
        {"simulate", "Monte Carlo study"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (std::string(name) == "auc") {
            sub->add_flag("--ci", ci, "add bootstrap percentile intervals");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        KeyValues kv;
        if (!config_path.empty()) kv = read_key_values(config_path);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'");
            kv[o.substr(0, eq)] = o.substr(eq + 1);
        }
        for (std::size_t i = 0; i < bindings.size(); ++i) {
            if (options[i]->count() > 0) kv[bindings[i].key] = values[i];
        }
        if (!reps.empty()) {
            kv[(command == "bootstrap" || command == "auc") ? "bootstrap_reps" : "reps"] = reps;
        }
        if (ci) kv["bootstrap_auc"] = "true";
        const RunConfig cfg = RunConfig::from_key_values(kv);
        Runner(cfg, kv, command, out, err).run();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_status(e);
    }
}

} // namespace robroc::io
