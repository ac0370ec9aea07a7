#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path cap = fs::temp_directory_path() / ("anhk_cli_" + std::to_string(counter++) + ".out");
    const std::string cmd = std::string(CLI_BINARY) + " " + args + " > " + cap.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(cap);
    std::stringstream ss;
    ss << is.rdbuf();
    r.stdout_text = ss.str();
    fs::remove(cap);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::string kConfigs = CONFIG_DIR;

} // namespace

TEST_CASE("check subcommand passes on the bundled golden config") {
    const fs::path out = fs::temp_directory_path() / "anhk_check_out";
    auto r = run_cli("check --config " + kConfigs + "/cauchy1d.json --out " + out.string());
    CHECK(r.exit_code == 0);
    const json summary = json::parse(r.stdout_text);
    CHECK(summary["all_passed"] == true);
    for (const auto& [name, verdict] : summary["suites"].items()) {
        INFO(name);
        CHECK(verdict == "pass");
    }
    CHECK(summary.contains("config_hash"));
    fs::remove_all(out);
}

TEST_CASE("decay subcommand emits the documented csv and slope summary") {
    const fs::path out1 = fs::temp_directory_path() / "anhk_decay_1";
    const fs::path out2 = fs::temp_directory_path() / "anhk_decay_2";
    auto r1 = run_cli("decay --config " + kConfigs + "/sumlap2d.json --out " + out1.string());
    REQUIRE(r1.exit_code == 0);
    const json s1 = json::parse(r1.stdout_text);
    CHECK(s1["slope_phi"].get<double>() == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(s1["slope_axis"].get<double>() == doctest::Approx(-2.0).epsilon(0.075));
    const std::string csv = slurp(out1 / "decay.csv");
    CHECK(csv.rfind("r,avg_phi,avg_absLphi\n", 0) == 0);

    // identical config and seed give byte-identical outputs
    auto r2 = run_cli("decay --config " + kConfigs + "/sumlap2d.json --out " + out2.string());
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(out2 / "decay.csv") == csv);
    CHECK(r2.stdout_text == r1.stdout_text);
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("forced solve subcommand writes the solution csv") {
    const fs::path out = fs::temp_directory_path() / "anhk_solve_out";
    auto r = run_cli("solve --config " + kConfigs + "/forced1d.json --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const json summary = json::parse(r.stdout_text);
    CHECK(summary["mode"] == "forced");
    CHECK(summary["sup_u"].get<double>() > 0.0);
    const std::string csv = slurp(out / "solution.csv");
    CHECK(csv.rfind("t,x1,u\n", 0) == 0);
    fs::remove_all(out);
}

TEST_CASE("malformed config exits 2 with the failing path") {
    const fs::path bad = fs::temp_directory_path() / "anhk_bad.json";
    {
        std::ofstream os(bad);
        os << R"({"operator": {"sigma": 1.0}})";
    }
    auto r = run_cli("kernel --config " + bad.string());
    CHECK(r.exit_code == 2);
    auto r2 = run_cli("kernel --config /nonexistent/nope.json");
    CHECK(r2.exit_code == 2);
    {
        std::ofstream os(bad);
        os << "{not json";
    }
    auto r3 = run_cli("kernel --config " + bad.string());
    CHECK(r3.exit_code == 2);
    fs::remove(bad);
}

TEST_CASE("unknown subcommand exits 64") {
    auto r = run_cli("frobnicate --config x.json");
    CHECK(r.exit_code == 64);
    auto r2 = run_cli("");
    CHECK(r2.exit_code == 64);
}
