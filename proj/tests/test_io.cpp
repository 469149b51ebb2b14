// End-to-end command-line tests: exit codes, report schemas, determinism and
// the frozen VTK golden file.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support/json_schema_lite.hpp"
#include "support/test_domains.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = MIXLAP_CLI_PATH;
const std::string src = MIXLAP_SOURCE_DIR;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

mixlap::testing::SchemaLite schema() {
    return mixlap::testing::SchemaLite(load_json(src + "/schema/report.schema.json"));
}

fs::path tmpdir() {
    const fs::path d = fs::temp_directory_path() / "mixlap_cli_tests";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("solve-scalar end to end with schema validation") {
    const fs::path out = tmpdir() / "scalar.json";
    const int rc = run("solve-scalar --domain " + src + "/domains/square_adjacent_sides.json" +
                       " --part gammac --h 0.2 --k 3 --out " + out.string());
    REQUIRE(rc == 0);
    const auto j = load_json(out);
    const auto err = schema().validate(j);
    INFO(err.value_or(""));
    CHECK_FALSE(err.has_value());
    CHECK(j["result"]["eigenvalues"][0].get<double>() == Catch::Approx(0.5).epsilon(0.01));
}

TEST_CASE("solve-vector both forms with schema validation") {
    const fs::path out = tmpdir() / "vector.json";
    const int rc = run("solve-vector --domain " + src + "/domains/acute_triangle.json" +
                       " --h 0.1 --k 3 --form both --out " + out.string());
    REQUIRE(rc == 0);
    const auto j = load_json(out);
    const auto err = schema().validate(j);
    INFO(err.value_or(""));
    CHECK_FALSE(err.has_value());
    CHECK(j["curvature"]["kernel_dim"] == 0);
    CHECK(j["form_comparison"]["relative_gap"].get<double>() < 1e-10);
}

TEST_CASE("helmholtz subcommand with built-in fields") {
    for (const std::string field :
         {"constant", "rotational", "radial", "gradient-of-first-eigenfunction"}) {
        const fs::path out = tmpdir() / ("hh_" + field + ".json");
        const int rc = run("helmholtz --domain " + src + "/domains/square_opposite_sides.json" +
                           " --h 0.125 --field " + field + " --out " + out.string());
        REQUIRE(rc == 0);
        const auto j = load_json(out);
        const auto err = schema().validate(j);
        INFO(err.value_or(""));
        CHECK_FALSE(err.has_value());
        CHECK(j["hc_dim_estimate"] == 1);
        if (field == "constant") {
            // (0,1) is the harmonic-like direction on this square
            CHECK(j["result"]["residual_fraction"].get<double>() > 0.999);
        }
        if (field == "gradient-of-first-eigenfunction") {
            CHECK(j["result"]["residual_fraction"].get<double>() < 1e-9);
        }
    }
}

TEST_CASE("check subcommand with rotation search") {
    const fs::path out = tmpdir() / "check.json";
    const int rc = run("check --domain " + src + "/domains/curved_triangle.json" +
                       " --find-rotation --out " + out.string());
    REQUIRE(rc == 0);
    const auto j = load_json(out);
    const auto err = schema().validate(j);
    INFO(err.value_or(""));
    CHECK_FALSE(err.has_value());
    CHECK(j["rotation_found"] == true);
    CHECK(j["report"]["pass"] == true);
}

TEST_CASE("verify subcommand produces confirmed verdicts") {
    const fs::path out = tmpdir() / "verify.json";
    const int rc = run("verify --domain " + src + "/domains/acute_triangle.json" +
                       " --levels 0.2,0.1,0.05 --out " + out.string());
    REQUIRE(rc == 0);
    const auto j = load_json(out);
    const auto err = schema().validate(j);
    INFO(err.value_or(""));
    CHECK_FALSE(err.has_value());
    CHECK(j["report"]["verdicts"]["inequality"] == "confirmed");
    CHECK(j["report"]["verdicts"]["monotonicity"] == "confirmed");
    CHECK(j["report"]["verdicts"]["hotspot"] == "confirmed");
}

TEST_CASE("exit codes: invalid input is 2, missing output is usage error") {
    CHECK(run("solve-scalar --domain /nonexistent.json --part gammac --h 0.1 --out /tmp/x.json") ==
          2);
    CHECK(run("solve-scalar --domain " + src + "/domains/acute_triangle.json --part gammac") == 2);
    CHECK(run("bogus-subcommand") == 2);
    // no partial output on failure
    const fs::path out = tmpdir() / "never_written.json";
    fs::remove(out);
    CHECK(run("solve-scalar --domain /nonexistent.json --part gammac --h 0.1 --out " +
              out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("invalid domain geometry is rejected with exit 2") {
    const fs::path bad = tmpdir() / "bad_domain.json";
    std::ofstream(bad) << R"({"arcs": [
        {"kind": "segment", "data": {"p0": [0,0], "p1": [1,1]}, "label": "gamma"},
        {"kind": "segment", "data": {"p0": [1,1], "p1": [1,0]}, "label": "gammac"},
        {"kind": "segment", "data": {"p0": [1,0], "p1": [0,1]}, "label": "gamma"},
        {"kind": "segment", "data": {"p0": [0,1], "p1": [0,0]}, "label": "gammac"}]})";
    CHECK(run("check --domain " + bad.string() + " --out " + (tmpdir() / "bad_out.json").string()) ==
          2);
}

TEST_CASE("mesh export/import round trip through the CLI") {
    const fs::path base = tmpdir() / "cli_mesh";
    REQUIRE(run("mesh --domain " + src + "/domains/pentagon.json --h 0.4 --out " + base.string()) ==
            0);
    CHECK(fs::exists(base.string() + ".node"));
    CHECK(fs::exists(base.string() + ".ele"));
    const fs::path out = tmpdir() / "imported_scalar.json";
    REQUIRE(run("solve-scalar --domain " + src + "/domains/pentagon.json --part gammac --h 0.4" +
                " --mesh " + base.string() + " --out " + out.string()) == 0);
    const auto j = load_json(out);
    CHECK(j["result"]["eigenvalues"][0].get<double>() > 0.0);
}

TEST_CASE("vtk golden file is reproduced byte for byte") {
    const fs::path vtk = tmpdir() / "psi1_square.vtk";
    const fs::path out = tmpdir() / "psi1_square.json";
    REQUIRE(run("solve-scalar --domain " + src + "/domains/square_adjacent_sides.json" +
                " --part gammac --h 0.8 --k 1 --out " + out.string() + " --vtk " + vtk.string()) ==
            0);
    const std::string golden_path = src + "/tests/golden/psi1_square.vtk";
    REQUIRE(fs::exists(golden_path));
    CHECK(slurp(vtk) == slurp(golden_path));
}

TEST_CASE("verify-all over the corpus is deterministic") {
    const fs::path d1 = tmpdir() / "all1";
    const fs::path d2 = tmpdir() / "all2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const std::string divisors = "8,16";  // small levels: determinism, not accuracy
    REQUIRE(run("verify-all --corpus " + src + "/domains --out-dir " + d1.string() +
                " --divisors " + divisors) == 0);
    REQUIRE(run("verify-all --corpus " + src + "/domains --out-dir " + d2.string() +
                " --divisors " + divisors) == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        const fs::path other = d2 / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++files;
    }
    CHECK(files == 7);  // six domains + summary.csv
    // every per-domain report validates against the schema
    for (const auto& entry : fs::directory_iterator(d1)) {
        if (entry.path().extension() != ".json") continue;
        const auto err = schema().validate(load_json(entry.path()));
        INFO(entry.path().string() << ": " << err.value_or(""));
        CHECK_FALSE(err.has_value());
    }
    // summary has one row per domain
    std::istringstream csv(slurp(d1 / "summary.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 7);  // header + six domains
}
