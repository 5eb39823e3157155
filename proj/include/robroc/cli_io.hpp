#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robroc/population.hpp"
#include "robroc/robust_fit.hpp"
#include "robroc/simulate.hpp"

namespace robroc::io {

/// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnvVar = "ROBROC_CONFIG";

enum class MissingPolicy { error, skip };

struct ColumnMapping {
    std::string outcome = "y";
    std::string disease = "d";
    std::vector<std::string> covariates;
};

/// Test outcomes split by disease status. Row numbers are 1-based data-row
/// indices of the source file (the header is row 0).
struct Dataset {
    std::vector<std::string> covariate_names;
    GroupSample nondiseased;
    GroupSample diseased;
    std::vector<std::size_t> rows_nd;
    std::vector<std::size_t> rows_d;
    std::size_t skipped_rows = 0;
};

/// Reads a headered CSV. Missing values are empty cells or NA/NaN; with
/// MissingPolicy::skip such rows are dropped and counted, otherwise they are
/// an error naming the row. Disease values must be 0 or 1.
Dataset read_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                 MissingPolicy policy = MissingPolicy::error);
Dataset read_csv(std::istream& in, const ColumnMapping& mapping, MissingPolicy policy = MissingPolicy::error);

/// Splits one CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

/// "lo:hi:n" -> n equally spaced values.
std::vector<double> parse_grid(const std::string& text);

/// A CSV table of preformatted cells.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

void write_table(const std::filesystem::path& path, const Table& table);
void write_table(std::ostream& out, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Flat key=value configuration; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Fully resolved run configuration with documented defaults.
struct RunConfig {
    // data
    std::string data;
    ColumnMapping mapping;
    std::vector<std::string> linear_covariates;
    MissingPolicy missing = MissingPolicy::error;

    // estimation
    FitConfig fit;
    std::string knots = "auto";  ///< "auto" or one count per covariate
    std::vector<int> knot_candidates{0, 1, 2, 3, 4};

    // evaluation
    std::string x;       ///< covariate point: "0.5", "57,1" or "age=57"
    std::string x_grid;  ///< "lo:hi:n" over the grid variable
    std::string grid_var;
    std::string at;      ///< fixed values of the other covariates, "name=value,..."
    int t_points = 201;
    int simpson_intervals = 200;

    // bootstrap
    int bootstrap_reps = 1000;
    double alpha = 0.05;
    bool bootstrap_auc = false;

    // simulation
    std::string scenario = "I";
    std::vector<double> contamination{0.05};
    std::size_t n_nd = 200;
    std::size_t n_d = 100;
    int reps = 100;
    double kappa_nd = 15.0;
    double kappa_d = 20.0;
    std::string contamination_kind = "location";
    double radial_factor = 10.0;
    std::vector<std::string> estimators{"robust", "ols_linear", "ols_bspline"};
    std::string knot_contest;  ///< candidate list per covariate, e.g. "0,3"
    std::string sim_grid;      ///< "lo:hi:n" for the first covariate
    std::vector<std::pair<double, double>> custom_ranges{{0.0, 1.0}};
    PolynomialLaw custom_nd;
    PolynomialLaw custom_d;
    std::string error_law = "normal";
    int student_df = 3;

    // run
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_dir = "robroc-out";

    /// Builds the configuration, rejecting unknown keys and bad values.
    static RunConfig from_key_values(const KeyValues& kv);

    /// Scenario for `simulate` (preset or custom polynomial laws).
    [[nodiscard]] Scenario make_scenario() const;

    [[nodiscard]] std::vector<TermKind> term_kinds(const std::vector<std::string>& names) const;
};

/// All configuration keys understood by RunConfig, in documentation order.
const std::vector<std::string>& known_config_keys();

/// Entry point of the command-line tool. Returns the process exit status:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace robroc::io
