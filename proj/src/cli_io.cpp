#include "robroc/cli_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "robroc/errors.hpp"
#include "robroc/roc_auc.hpp"

namespace robroc::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "N/A";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw DataError("unknown column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

PolynomialLaw parse_polynomial(const KeyValues& kv, const std::string& prefix, PolynomialLaw law) {
    if (auto it = kv.find(prefix + ".intercept"); it != kv.end()) {
        law.intercept = parse_double(it->second, it->first);
    }
    if (auto it = kv.find(prefix + ".sd"); it != kv.end()) {
        law.sd = parse_double(it->second, it->first);
    }
    if (auto it = kv.find(prefix + ".coefficients"); it != kv.end()) {
        law.coefficients.clear();
        for (const auto& part : split(it->second, ';')) {
            const auto c = parse_double_list(part, it->first);
            if (c.empty() || c.size() > 3) {
                throw UsageError(it->first + ": each covariate needs 1 to 3 coefficients");
            }
            std::array<double, 3> row{0.0, 0.0, 0.0};
            std::copy(c.begin(), c.end(), row.begin());
            law.coefficients.push_back(row);
        }
    }
    return law;
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t == "NA") return std::nan("");
    if (t == "Inf") return HUGE_VAL;
    if (t == "-Inf") return -HUGE_VAL;
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw DataError(what + ": cannot parse '" + text + "' as a number");
    }
    return v;
}

int parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw UsageError(what + ": cannot parse '" + text + "' as an integer");
    }
    return v;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) {
        out.push_back(parse_double(part, what));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        out.push_back(parse_int(part, what));
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw UsageError("grid '" + text + "' must have the form lo:hi:n");
    }
    const double lo = parse_double(parts[0], "grid lower bound");
    const double hi = parse_double(parts[1], "grid upper bound");
    const int n = parse_int(parts[2], "grid size");
    if (n < 1 || !(lo <= hi)) {
        throw UsageError("grid '" + text + "' needs lo <= hi and n >= 1");
    }
    return linspace(lo, hi, n);
}

Dataset read_csv(const std::filesystem::path& path, const ColumnMapping& mapping, MissingPolicy policy) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open data file '" + path.string() + "'");
    }
    return read_csv(in, mapping, policy);
}

Dataset read_csv(std::istream& in, const ColumnMapping& mapping, MissingPolicy policy) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("data file is empty (header row required)");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = split_csv_line(line);
    const std::size_t y_col = column_index(header, mapping.outcome);
    const std::size_t d_col = column_index(header, mapping.disease);
    std::vector<std::size_t> x_cols;
    for (const auto& name : mapping.covariates) {
        x_cols.push_back(column_index(header, name));
    }

    Dataset ds;
    ds.covariate_names = mapping.covariates;
    std::vector<double> y_nd, y_d;
    std::vector<std::vector<double>> x_nd, x_d;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(cells.size()));
        }
        bool missing = is_missing(cells[y_col]) || is_missing(cells[d_col]);
        for (std::size_t c : x_cols) missing = missing || is_missing(cells[c]);
        if (missing) {
            if (policy == MissingPolicy::skip) {
                ++ds.skipped_rows;
                continue;
            }
            throw DataError("row " + std::to_string(row) + ": missing value in a required column");
        }
        const std::string where = "row " + std::to_string(row);
        const double y = parse_double(cells[y_col], where + ", column '" + mapping.outcome + "'");
        const double d = parse_double(cells[d_col], where + ", column '" + mapping.disease + "'");
        if (d != 0.0 && d != 1.0) {
            throw DataError(where + ": disease value '" + cells[d_col] + "' is not 0 or 1");
        }
        std::vector<double> x;
        for (std::size_t k = 0; k < x_cols.size(); ++k) {
            x.push_back(parse_double(cells[x_cols[k]], where + ", column '" + mapping.covariates[k] + "'"));
        }
        if (!std::isfinite(y) || std::any_of(x.begin(), x.end(), [](double v) { return !std::isfinite(v); })) {
            throw DataError(where + ": non-finite value");
        }
        if (d == 1.0) {
            y_d.push_back(y);
            x_d.push_back(std::move(x));
            ds.rows_d.push_back(row);
        } else {
            y_nd.push_back(y);
            x_nd.push_back(std::move(x));
            ds.rows_nd.push_back(row);
        }
    }
    if (y_nd.empty() || y_d.empty()) {
        throw DataError(std::string("empty group: no ") + (y_nd.empty() ? "nondiseased" : "diseased") + " rows");
    }
    const auto pack = [&](const std::vector<double>& y, const std::vector<std::vector<double>>& x) {
        GroupSample g;
        g.outcome = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        g.covariates.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x_cols.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t h = 0; h < x_cols.size(); ++h) {
                g.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = x[i][h];
            }
        }
        return g;
    };
    ds.nondiseased = pack(y_nd, x_nd);
    ds.diseased = pack(y_d, x_d);
    return ds;
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw Error("table row width does not match the header");
    }
    rows.push_back(std::move(row));
}

namespace {

std::string quote_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

} // namespace

void write_table(std::ostream& out, const Table& table) {
    const auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << quote_cell(row[i]);
        }
        out << '\n';
    };
    write_row(table.columns);
    for (const auto& row : table.rows) write_row(row);
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    write_table(out, table);
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    Table t;
    std::string line;
    if (!std::getline(in, line)) return t;
    t.columns = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split_csv_line(line));
    }
    return t;
}

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file '" + path.string() + "'");
    }
    return parse_key_values(in);
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys{
        "data", "outcome", "disease", "covariates", "linear", "missing",
        "huber_b", "v", "tolerance", "max_iterations", "knots", "knot_candidates",
        "x", "x_grid", "grid_var", "at", "t_points", "simpson_intervals",
        "bootstrap_reps", "alpha", "bootstrap_auc",
        "scenario", "contamination", "sizes", "reps", "kappa", "contamination_kind", "radial_factor",
        "estimators", "knot_contest", "sim_grid",
        "custom.ranges", "custom.error_law", "custom.student_df",
        "custom.nd.intercept", "custom.nd.coefficients", "custom.nd.sd",
        "custom.d.intercept", "custom.d.coefficients", "custom.d.sd",
        "seed", "threads", "out"};
    return keys;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
    const auto& keys = known_config_keys();
    for (const auto& [k, v] : kv) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw UsageError("unknown configuration key '" + k + "'");
        }
    }
    RunConfig c;
    const auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    const auto num = [&](const char* key, double& dst) {
        if (const auto* s = get(key)) dst = parse_double(*s, key);
    };
    const auto integer = [&](const char* key, int& dst) {
        if (const auto* s = get(key)) dst = parse_int(*s, key);
    };
    const auto text = [&](const char* key, std::string& dst) {
        if (const auto* s = get(key)) dst = *s;
    };
    const auto names = [&](const char* key, std::vector<std::string>& dst) {
        if (const auto* s = get(key)) {
            dst.clear();
            for (auto& n : split(*s, ',')) {
                if (!n.empty()) dst.push_back(n);
            }
        }
    };

    text("data", c.data);
    text("outcome", c.mapping.outcome);
    text("disease", c.mapping.disease);
    names("covariates", c.mapping.covariates);
    names("linear", c.linear_covariates);
    if (const auto* s = get("missing")) {
        if (*s == "skip") c.missing = MissingPolicy::skip;
        else if (*s == "error") c.missing = MissingPolicy::error;
        else throw UsageError("missing must be 'skip' or 'error'");
    }
    num("huber_b", c.fit.b);
    num("v", c.fit.v);
    num("tolerance", c.fit.tolerance);
    integer("max_iterations", c.fit.max_iterations);
    c.fit.validate();
    text("knots", c.knots);
    if (const auto* s = get("knot_candidates")) c.knot_candidates = parse_int_list(*s, "knot_candidates");
    text("x", c.x);
    text("x_grid", c.x_grid);
    text("grid_var", c.grid_var);
    text("at", c.at);
    integer("t_points", c.t_points);
    integer("simpson_intervals", c.simpson_intervals);
    integer("bootstrap_reps", c.bootstrap_reps);
    num("alpha", c.alpha);
    if (const auto* s = get("bootstrap_auc")) c.bootstrap_auc = (*s == "1" || *s == "true" || *s == "yes");

    text("scenario", c.scenario);
    if (const auto* s = get("contamination")) c.contamination = parse_double_list(*s, "contamination");
    if (const auto* s = get("sizes")) {
        const auto v = parse_int_list(*s, "sizes");
        if (v.size() != 2 || v[0] < 1 || v[1] < 1) throw UsageError("sizes must be two positive integers");
        c.n_nd = static_cast<std::size_t>(v[0]);
        c.n_d = static_cast<std::size_t>(v[1]);
    }
    integer("reps", c.reps);
    if (const auto* s = get("kappa")) {
        const auto v = parse_double_list(*s, "kappa");
        if (v.size() == 1) c.kappa_nd = c.kappa_d = v[0];
        else if (v.size() == 2) c.kappa_nd = v[0], c.kappa_d = v[1];
        else throw UsageError("kappa takes one value or two (nondiseased,diseased)");
    }
    text("contamination_kind", c.contamination_kind);
    num("radial_factor", c.radial_factor);
    names("estimators", c.estimators);
    text("knot_contest", c.knot_contest);
    text("sim_grid", c.sim_grid);
    if (const auto* s = get("custom.ranges")) {
        c.custom_ranges.clear();
        for (const auto& part : split(*s, ';')) {
            const auto r = split(part, ':');
            if (r.size() != 2) throw UsageError("custom.ranges entries must be lo:hi");
            c.custom_ranges.emplace_back(parse_double(r[0], "custom.ranges"), parse_double(r[1], "custom.ranges"));
        }
    }
    text("custom.error_law", c.error_law);
    integer("custom.student_df", c.student_df);
    c.custom_nd = parse_polynomial(kv, "custom.nd", c.custom_nd);
    c.custom_d = parse_polynomial(kv, "custom.d", c.custom_d);

    if (const auto* s = get("seed")) {
        const std::string t = trim(*s);
        std::uint64_t v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
            throw UsageError("seed must be a non-negative integer");
        }
        c.seed = v;
    }
    if (const auto* s = get("threads")) {
        const int t = parse_int(*s, "threads");
        if (t < 0) throw UsageError("threads must be >= 0");
        c.threads = static_cast<unsigned>(t);
    }
    text("out", c.out_dir);

    if (c.t_points < 2) throw UsageError("t_points must be at least 2");
    if (c.simpson_intervals < 2 || c.simpson_intervals % 2 != 0) {
        throw UsageError("simpson_intervals must be even and >= 2");
    }
    if (c.bootstrap_reps < 1) throw UsageError("bootstrap_reps must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (c.reps < 1) throw UsageError("reps must be >= 1");
    for (int k : c.knot_candidates) {
        if (k < 0) throw UsageError("knot candidates must be non-negative");
    }
    return c;
}

Scenario RunConfig::make_scenario() const {
    Scenario s;
    if (scenario == "custom") {
        ErrorLaw law = ErrorLaw::normal;
        if (error_law == "student_t") law = ErrorLaw::student_t;
        else if (error_law != "normal") throw UsageError("custom.error_law must be normal or student_t");
        s = custom_scenario("custom", custom_ranges, custom_nd, custom_d, law);
        s.student_df = student_df;
    } else {
        s = Scenario::preset(scenario);
    }
    s.kappa_nd = kappa_nd;
    s.kappa_d = kappa_d;
    if (contamination_kind == "location") s.contamination_kind = ContaminationKind::location;
    else if (contamination_kind == "radial") s.contamination_kind = ContaminationKind::radial;
    else throw UsageError("contamination_kind must be location or radial");
    s.radial_factor = radial_factor;
    return s;
}

std::vector<TermKind> RunConfig::term_kinds(const std::vector<std::string>& names) const {
    std::vector<TermKind> kinds;
    for (const auto& n : names) {
        const bool lin = std::find(linear_covariates.begin(), linear_covariates.end(), n) != linear_covariates.end();
        kinds.push_back(lin ? TermKind::linear : TermKind::spline);
    }
    for (const auto& l : linear_covariates) {
        if (std::find(names.begin(), names.end(), l) == names.end()) {
            throw UsageError("linear covariate '" + l + "' is not among the covariates");
        }
    }
    return kinds;
}

} // namespace robroc::io
