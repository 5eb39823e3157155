#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "robroc/cli_io.hpp"
#include "robroc/errors.hpp"
#include "support.hpp"

using namespace robroc;
using namespace robroc::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("robroc-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "robroc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

// Age-like covariate on [50, 80]; the largest nondiseased outcome sits 50 SD above its mean.
fs::path write_age_data(const fs::path& dir) {
    Rng rng(31);
    std::ofstream f(dir / "data.csv");
    f << "y,d,age\n";
    for (int j = 0; j < 150; ++j) {
        const double age = j == 0 ? 50.0 : (j == 1 ? 80.0 : rng.uniform(50.0, 80.0));
        double y = 1.0 + 0.05 * age + rng.normal();
        if (j == 17) y = 1.0 + 0.05 * age + 50.0;
        f << format_double(y) << ",0," << format_double(age) << "\n";
    }
    for (int j = 0; j < 120; ++j) {
        const double age = j == 0 ? 50.0 : (j == 1 ? 80.0 : rng.uniform(50.0, 80.0));
        f << format_double(2.0 + 0.08 * age + 1.2 * rng.normal()) << ",1," << format_double(age) << "\n";
    }
    return dir / "data.csv";
}

} // namespace

TEST_SUITE("cli_io") {

TEST_CASE("three valid rows") {
    std::istringstream in("y,d,age\n1.5,0,40\n2.5,1,50\n0.5,0,60\n");
    const auto ds = read_csv(in, {"y", "d", {"age"}});
    CHECK(ds.nondiseased.size() == 2);
    CHECK(ds.diseased.size() == 1);
    CHECK(ds.covariate_names == std::vector<std::string>{"age"});
    CHECK(ds.rows_nd == std::vector<std::size_t>{1, 3});
    CHECK(ds.diseased.covariates(0, 0) == 50.0);
}

TEST_CASE("ingestion errors") {
    SUBCASE("disease value outside {0,1} names the row") {
        std::istringstream in("y,d,age\n1,0,40\n2,2,50\n3,1,60\n");
        CHECK_THROWS_WITH_AS(read_csv(in, {"y", "d", {"age"}}), doctest::Contains("row 2"), DataError);
    }
    SUBCASE("unknown column") {
        std::istringstream in("y,d,age\n1,0,40\n2,1,50\n");
        CHECK_THROWS_WITH_AS(read_csv(in, {"y", "d", {"weight"}}), doctest::Contains("weight"), DataError);
    }
    SUBCASE("empty group") {
        std::istringstream in("y,d\n1,0\n2,0\n");
        CHECK_THROWS_WITH_AS(read_csv(in, {"y", "d", {}}), doctest::Contains("diseased"), DataError);
    }
    SUBCASE("parse failure names the column") {
        std::istringstream in("y,d,age\n1,0,forty\n2,1,50\n");
        CHECK_THROWS_WITH_AS(read_csv(in, {"y", "d", {"age"}}), doctest::Contains("age"), DataError);
    }
    SUBCASE("missing value without skip policy") {
        std::istringstream in("y,d\nNA,0\n2,1\n1,0\n");
        CHECK_THROWS_AS(read_csv(in, {"y", "d", {}}), DataError);
    }
    SUBCASE("ragged row") {
        std::istringstream in("y,d\n1,0,3\n2,1\n");
        CHECK_THROWS_AS(read_csv(in, {"y", "d", {}}), DataError);
    }
}

TEST_CASE("missing outcome skipped under the skip policy") {
    std::istringstream in("y,d,age\n1,0,40\nNA,1,50\n3,1,60\n4,0,70\n");
    const auto ds = read_csv(in, {"y", "d", {"age"}}, MissingPolicy::skip);
    CHECK(ds.skipped_rows == 1);
    CHECK(ds.nondiseased.size() + ds.diseased.size() == 3);
    CHECK(ds.rows_d == std::vector<std::size_t>{3});
}

TEST_CASE("quoted fields") {
    CHECK(split_csv_line("a,\"b,c\",\"say \"\"hi\"\"\"") == std::vector<std::string>{"a", "b,c", "say \"hi\""});
}

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
        CHECK(parse_double(format_double(v), "v") == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "NA");
    CHECK(std::isinf(parse_double(format_double(-std::numeric_limits<double>::infinity()), "v")));
    CHECK_THROWS_AS(parse_double("1.5x", "v"), DataError);
    CHECK(parse_grid("55:75:21").size() == 21);
    CHECK(parse_grid("55:75:21")[20] == 75.0);
}

TEST_CASE("tables round-trip") {
    const auto dir = scratch("table");
    Table t{{"name", "value"}, {}};
    t.add_row({"a,b", format_double(1.0 / 3.0)});
    t.add_row({"quote\"d", format_double(-2.5e-300)});
    write_table(dir / "t.csv", t);
    const Table back = read_table(dir / "t.csv");
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(parse_double(back.rows[0][1], "v") == 1.0 / 3.0);
    CHECK_THROWS_AS(t.add_row({"only one"}), std::exception);
}

TEST_CASE("configuration parsing") {
    std::istringstream in("# comment\nhuber_b = 1.5\nv=2.5  # trailing\n\nbootstrap_reps = 200\nknots = 1\n");
    const auto kv = parse_key_values(in);
    const auto cfg = RunConfig::from_key_values(kv);
    CHECK(cfg.fit.b == 1.5);
    CHECK(cfg.fit.v == 2.5);
    CHECK(cfg.bootstrap_reps == 200);
    CHECK(cfg.knots == "1");

    const auto defaults = RunConfig::from_key_values({});
    CHECK(defaults.fit.b == 1.345);
    CHECK(defaults.fit.v == 3.0);
    CHECK(defaults.bootstrap_reps == 1000);
    CHECK(defaults.alpha == 0.05);

    CHECK_THROWS_AS(RunConfig::from_key_values({{"hubr_b", "1"}}), UsageError);
    CHECK_THROWS_AS(RunConfig::from_key_values({{"alpha", "1.5"}}), UsageError);
    CHECK_THROWS_AS(RunConfig::from_key_values({{"simpson_intervals", "7"}}), UsageError);
    for (const auto& k : known_config_keys()) CHECK_FALSE(k.empty());
}

TEST_CASE("command surface") {
    const auto dir = scratch("cli");
    const auto data = write_age_data(dir);
    const std::string common = "data = " + data.string() + "\ncovariates = age\nknots = 0\nseed = 5\n";
    {
        std::ofstream(dir / "c.cfg") << common;
    }

    SUBCASE("auc over an age grid") {
        std::string out, err;
        REQUIRE(run({"auc", "--config", (dir / "c.cfg").string(), "--x-grid", "55:75:21", "--out", (dir / "a").string()},
                    &out, &err) == 0);
        const Table t = read_table(dir / "a" / "auc.csv");
        CHECK(t.rows.size() == 21);
        CHECK(t.columns[0] == "age");
        CHECK(t.columns[1] == "auc");
        CHECK(fs::exists(dir / "a" / "manifest.json"));
        CHECK_FALSE(out.empty());
    }

    SUBCASE("gross outlier is downweighted in the weights table") {
        REQUIRE(run({"fit", "--config", (dir / "c.cfg").string(), "--out", (dir / "f").string()}) == 0);
        const Table w = read_table(dir / "f" / "weights.csv");
        const auto col = [&](const std::string& name) {
            return static_cast<std::size_t>(std::find(w.columns.begin(), w.columns.end(), name) - w.columns.begin());
        };
        double max_y = -1e300, weight_at_max = 1.0;
        for (const auto& r : w.rows) {
            if (r[col("group")] != "nondiseased") continue;
            const double y = parse_double(r[col("outcome")], "y");
            if (y > max_y) {
                max_y = y;
                weight_at_max = parse_double(r[col("truncated_weight")], "w");
            }
        }
        CHECK(weight_at_max < 0.1);
    }

    SUBCASE("identical configuration and seed give byte-identical outputs") {
        const std::vector<std::string> base{"bootstrap", "--config", (dir / "c.cfg").string(), "--x", "60",
                                            "--reps", "40", "--t-points", "11"};
        auto a = base, b = base;
        a.insert(a.end(), {"--out", (dir / "b1").string()});
        b.insert(b.end(), {"--out", (dir / "b2").string(), "--threads", "2"});
        REQUIRE(run(a) == 0);
        REQUIRE(run(b) == 0);
        for (const char* f : {"bootstrap_auc.csv", "bootstrap_roc.csv"}) {
            CHECK(slurp(dir / "b1" / f) == slurp(dir / "b2" / f));
        }
    }

    SUBCASE("simulation outputs are reproducible") {
        const std::vector<std::string> base{"simulate", "--scenario", "I", "--contamination", "0.05",
                                            "--sizes", "60,40", "--reps", "4", "--seed", "7"};
        auto a = base, b = base;
        a.insert(a.end(), {"--out", (dir / "s1").string()});
        b.insert(b.end(), {"--out", (dir / "s2").string()});
        REQUIRE(run(a) == 0);
        REQUIRE(run(b) == 0);
        for (const char* f : {"simulate_robust.csv", "simulate_ols_linear.csv", "simulate_ols_bspline.csv",
                              "simulate_summary.csv"}) {
            CHECK(slurp(dir / "s1" / f) == slurp(dir / "s2" / f));
        }
    }

    SUBCASE("exit statuses") {
        std::string err;
        CHECK(run({"nonsense"}, nullptr, &err) == 1);
        CHECK(run({"fit", "--set", "huber_b=abc", "--config", (dir / "c.cfg").string()}, nullptr, &err) != 0);
        CHECK(run({"fit", "--set", "bogus=1", "--config", (dir / "c.cfg").string()}, nullptr, &err) == 1);
        CHECK(err.find("bogus") != std::string::npos);
        CHECK(run({"fit", "--data", (dir / "missing.csv").string(), "--covariates", "age", "--out", (dir / "m").string()}) == 2);
        CHECK(run({"roc", "--config", (dir / "c.cfg").string(), "--x", "95", "--out", (dir / "x").string()}, nullptr,
                  &err) == 2);
        CHECK(err.find("error:") == 0);
        CHECK(run({"--help"}) == 0);
    }
}

}
