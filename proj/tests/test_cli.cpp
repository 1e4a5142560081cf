#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uuvsim/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "uuvsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = uuvsim::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "uuvsim_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

std::string fleet_text() { return read_text(oracle::scenario_path("formation4.toml")); }

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("run writes CSV with 1 + t_final/dt_sample rows and a summary") {
    const fs::path scenario = write_text("single.toml", oracle::kSingleVehicleToml);
    const fs::path out = scratch_dir() / "single.csv";
    const Outcome o = invoke({"run", "--scenario", scenario.string(), "--controller", "NBC", "--out", out.string(),
                              "--tfinal", "2"});
    CHECK(o.code == uuvsim::kExitOk);
    const std::string csv = read_text(out);
    CHECK(count_lines(csv) == 1 + 1 + 20);
    CHECK(fs::exists(out.string() + ".summary.txt"));
    CHECK(o.out.find("controller NBC") != std::string::npos);

    // identical invocation, identical bytes; the scenario file is untouched
    const std::string before = read_text(scenario);
    invoke({"run", "--scenario", scenario.string(), "--controller", "NBC", "--out", out.string(), "--tfinal", "2"});
    CHECK(read_text(out) == csv);
    CHECK(read_text(scenario) == before);
}

TEST_CASE("run --format csv prints the log") {
    const fs::path scenario = write_text("single_fmt.toml", oracle::kSingleVehicleToml);
    const Outcome o = invoke({"run", "--scenario", scenario.string(), "--tfinal", "0.3", "--format", "csv"});
    CHECK(o.code == uuvsim::kExitOk);
    CHECK(o.out.rfind("t,v1_x,", 0) == 0);
    CHECK(count_lines(o.out) == 1 + 4);
}

TEST_CASE("validation failures exit 2 and name the violated assumption") {
    SUBCASE("missing file") {
        const Outcome o = invoke({"run", "--scenario", "/nonexistent/x.toml"});
        CHECK(o.code == uuvsim::kExitInvalid);
        CHECK_FALSE(o.err.empty());
    }
    SUBCASE("no pinned vehicle") {
        const fs::path p =
            write_text("unpinned.toml", replaced(fleet_text(), "pinning = [1.0, 1.0, 1.0, 1.0]",
                                                 "pinning = [0.0, 0.0, 0.0, 0.0]"));
        const Outcome run = invoke({"run", "--scenario", p.string()});
        CHECK(run.code == uuvsim::kExitInvalid);
        CHECK(run.err.find("Assumption 1") != std::string::npos);
        const Outcome val = invoke({"validate", "--scenario", p.string()});
        CHECK(val.code == uuvsim::kExitInvalid);
        CHECK(val.err.find("Assumption 1") != std::string::npos);
    }
    SUBCASE("disconnected topology") {
        std::string text = replaced(fleet_text(), "[1.0, 0.0, 0.8, 0.0]", "[0.0, 0.0, 0.0, 0.0]");
        text = replaced(text, "[0.0, 1.0, 0.0, 0.8]", "[0.0, 0.0, 0.0, 0.8]");
        text = replaced(text, "[0.0, 0.8, 0.0, 0.0]", "[0.0, 0.0, 0.0, 0.0]");
        const Outcome o = invoke({"validate", "--scenario", write_text("split.toml", text).string()});
        CHECK(o.code == uuvsim::kExitInvalid);
        CHECK(o.err.find("Assumption 1") != std::string::npos);
    }
    SUBCASE("negative mass") {
        const fs::path p = write_text("negmass.toml", replaced(fleet_text(), "mass = 10.0", "mass = -10.0"));
        const Outcome o = invoke({"validate", "--scenario", p.string()});
        CHECK(o.code == uuvsim::kExitInvalid);
        CHECK(o.err.find("VehicleParams") != std::string::npos);
    }
}

TEST_CASE("usage errors exit 1") {
    const std::string scenario = oracle::scenario_path("formation4.toml");
    CHECK(invoke({"compare", "--scenario", scenario, "--controller", "NBOC"}).code == uuvsim::kExitUsage);
    CHECK(invoke({"compare", "--scenario", scenario, "--controller", "NBC,NBC"}).code == uuvsim::kExitUsage);
    CHECK(invoke({"run", "--scenario", scenario, "--controller", "PID"}).code == uuvsim::kExitUsage);
    CHECK(invoke({"run", "--scenario", scenario, "--bogus"}).code == uuvsim::kExitUsage);
    CHECK(invoke({"run"}).code == uuvsim::kExitUsage);
    CHECK(invoke({}).code == uuvsim::kExitUsage);
}

TEST_CASE("validate passes on the shipped scenarios") {
    for (const char* file : {"formation4.toml", "formation4_disturbed.toml"}) {
        const Outcome o = invoke({"validate", "--scenario", oracle::scenario_path(file)});
        CHECK(o.code == uuvsim::kExitOk);
        CHECK(o.out.find("overall: pass") != std::string::npos);
    }
}

TEST_CASE("compare writes a combined log and a ranking table") {
    const fs::path scenario = write_text("single_cmp.toml", oracle::kSingleVehicleToml);
    const fs::path out = scratch_dir() / "cmp.csv";
    const Outcome o = invoke({"compare", "--scenario", scenario.string(), "--controller", "BC,NBC,BSMC", "--out",
                              out.string(), "--tfinal", "1"});
    CHECK(o.code == uuvsim::kExitOk);
    const std::string csv = read_text(out);
    CHECK(csv.rfind("controller,t,", 0) == 0);
    CHECK(count_lines(csv) == 1 + 3 * 11);
    CHECK(o.out.find("rank") != std::string::npos);
    CHECK(o.out.find("steady-state z ordering:") != std::string::npos);
}

TEST_CASE("runtime guard exits 3 and still writes the partial log") {
    const fs::path out = scratch_dir() / "guard.csv";
    const Outcome o =
        invoke({"run", "--scenario", oracle::scenario_path("formation4.toml"), "--controller", "BC", "--out", out.string()});
    CHECK(o.code == uuvsim::kExitGuard);
    CHECK(o.err.find("SingularTransform") != std::string::npos);
    CHECK(count_lines(read_text(out)) >= 2);
    CHECK(read_text(out.string() + ".summary.txt").find("PARTIAL") != std::string::npos);
}
