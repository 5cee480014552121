#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vortex/cli.hpp"
#include "vortex/field_io.hpp"

using namespace vortex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vortexctl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(VORTEX_CONFIG_DIR) + "/" + name; }

// A fresh scratch directory under the system temp path.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vortex_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const char* kSmallScalar = R"({
  "problem": "scalar_periodic",
  "model": {"lambda": 1, "m": 1, "n": 1, "a2": 0.5, "b2": 0.5},
  "vortices": [[1, 1.5], [4, 3]],
  "cell": {"lx": 6.283185307179586, "ly": 6.283185307179586, "nx": 64, "ny": 64}
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("configuration round-trips through its canonical form") {
    for (const char* name : {"scalar_periodic.json", "system_periodic.json", "scalar_planar.json",
                             "system_planar.json", "b_only_planar.json", "infeasible.json"}) {
        CAPTURE(name);
        const auto c = cli::load_config(config(name));
        const std::string text = cli::to_json_text(c);
        const auto back = cli::parse_config(text);
        CHECK(back == c);
        CHECK(cli::to_json_text(back) == text);
    }
}

TEST_CASE("configuration defaults and complex constants") {
    const auto c = cli::parse_config(R"({"problem": "System_Periodic",
        "model": {"lambda1": 1, "lambda2": 3, "A": [0.1, 0], "B": [0, 1.4142135623730951], "c2": 1},
        "vortices": [{"x": 3, "y": 3, "multiplicity": 2}], "vortices2": [[3, 3]]})");
    CHECK(c.problem == ProblemClass::system_periodic);
    CHECK(c.system.a2 == doctest::Approx(0.01));
    CHECK(c.system.b2 == doctest::Approx(2.0));
    // ξ defaults to the vacuum value.
    CHECK(c.system.xi1 == doctest::Approx(c.system.m * 0.01 + 2.0 + 1.0));
    CHECK(c.system.xi2 == doctest::Approx(1.0));
    CHECK(c.vortices1.total() == 2);
    CHECK(c.cell.nx == 256);
    CHECK(c.solver.grad_tol == SolverOptions{}.grad_tol);

    const auto s = cli::parse_config(R"({"problem": "scalar_planar", "model": {"A": 1, "b2": 0.25}})");
    CHECK(s.scalar.xi == doctest::Approx(s.scalar.m * 1.0 + s.scalar.n * 0.25));
    CHECK_FALSE(s.box.half_width.has_value());
    CHECK(cli::box_half_width(s) > 0);
}

TEST_CASE("configuration errors name the offending line") {
    const auto line_of = [](const std::string& text) {
        try {
            (void)cli::parse_config(text, "t.json");
        } catch (const cli::ConfigParseError& e) {
            CHECK(std::string(e.what()).rfind("t.json:", 0) == 0);
            return e.line();
        }
        FAIL("expected a parse error");
        return -1;
    };
    CHECK(line_of("{\n  \"problem\": \"scalar_periodic\",\n  \"model\": {\n    \"lamda\": 1\n  }\n}") == 4);
    CHECK(line_of("{\n  \"problem\": \"scalar_periodic\",\n  \"vortices\": [\n    [1, 2],\n    [1]\n  ]\n}") == 5);
    CHECK(line_of("{\n  \"problem\": \"torus\"\n}") == 2);
    CHECK(line_of("{\n  \"problem\": \"scalar_periodic\",\n  \"cell\": {\"nx\": 63}\n}") == 3);
    CHECK(line_of("{\n  \"problem\": \"scalar_periodic\"\n  \"model\": {}\n}") == 3);
    CHECK(line_of("{\"problem\": \"scalar_periodic\", \"box\": {\"n\": 31}}") == 1);
    CHECK(line_of("{\"problem\": \"scalar_planar\", \"model\": {\"lambda\": -1}}") == 1);
}

TEST_CASE("check exit codes") {
    CHECK(run_cli({"check", config("scalar_periodic.json")}).code == cli::kSuccess);
    const auto bad = run_cli({"check", config("infeasible.json")});
    CHECK(bad.code == cli::kFailed);
    CHECK(bad.out.find("vortex_bound") != std::string::npos);
    CHECK(run_cli({"check", config("nope.json")}).code == cli::kUsage);
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"check", config("scalar_periodic.json"), "--grid", "x"}).code == cli::kUsage);
    CHECK(run_cli({"check", config("scalar_periodic.json"), "--grid", "63"}).code == cli::kUsage);
    CHECK(run_cli({"--help"}).code == cli::kSuccess);
    const auto sys = run_cli({"check", config("system_planar.json")});
    CHECK(sys.code == cli::kSuccess);
    CHECK(sys.out.find("regime: FULL") != std::string::npos);
}

TEST_CASE("non-convergence has its own exit code") {
    const auto dir = scratch("budget");
    std::string text = kSmallScalar;
    text.insert(text.rfind('}'), ", \"solver\": {\"max_newton\": 1}");
    const auto path = write_file(dir / "c.json", text);
    CHECK(run_cli({"solve", path.string(), "--out", (dir / "out").string()}).code == cli::kNotConverged);
}

TEST_CASE("solve writes a reproducible, verifiable output directory") {
    const auto dir = scratch("solve");
    const auto path = write_file(dir / "c.json", kSmallScalar);
    const auto first = run_cli({"solve", path.string(), "--out", (dir / "a").string(), "--seed", "7"});
    REQUIRE(first.code == cli::kSuccess);
    for (const char* f : {"config.json", "report.json", "u.vxf", "v.vxf", "linecut.dat", "radial.dat"})
        CHECK(fs::exists(dir / "a" / f));
    CHECK(run_cli({"solve", path.string(), "--out", (dir / "b").string(), "--seed", "7"}).code == cli::kSuccess);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "v.vxf") == slurp(dir / "b" / "v.vxf"));

    // The stored configuration reproduces the run.
    const auto stored = cli::load_config(dir / "a" / "config.json");
    CHECK(stored.seed == 7);
    CHECK(stored.cell.nx == 64);

    const auto ok = run_cli({"verify", (dir / "a").string()});
    CHECK(ok.code == cli::kSuccess);
    CHECK(ok.out.find("verify: PASS") != std::string::npos);
    CHECK(run_cli({"verify", (dir / "a" / "v.vxf").string()}).code == cli::kSuccess);

    // Tampering with the regular part breaks u = u0 + v and the residual.
    Field v = read_field(dir / "a" / "v.vxf");
    v.at(5, 5) += 1e-3;
    write_field(dir / "a" / "v.vxf", v);
    const auto tampered = run_cli({"verify", (dir / "a").string()});
    CHECK(tampered.code == cli::kFailed);
    CHECK(tampered.out.find("verify: FAIL") != std::string::npos);
}

TEST_CASE("solve without vortices gives zero fields") {
    const auto dir = scratch("empty");
    std::string text = kSmallScalar;
    text.replace(text.find("[[1, 1.5], [4, 3]]"), 18, "[]");
    const auto path = write_file(dir / "c.json", text);
    REQUIRE(run_cli({"solve", path.string(), "--out", (dir / "o").string()}).code == cli::kSuccess);
    CHECK(read_field(dir / "o" / "u.vxf").max_abs() == 0.0);
    CHECK(read_field(dir / "o" / "v.vxf").max_abs() == 0.0);
}

TEST_CASE("sweep rows") {
    const auto dir = scratch("sweep");
    const auto path = write_file(dir / "c.json", kSmallScalar);
    const auto r = run_cli({"sweep", path.string(), "--param", "N", "--values", "0,1,4"});
    CHECK(r.code == cli::kSuccess);
    std::istringstream rows(r.out);
    std::vector<std::pair<std::string, std::string>> seen;
    for (std::string line; std::getline(rows, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string value, outcome;
        fields >> value >> outcome;
        seen.emplace_back(value, outcome);
    }
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].second == "converged");
    CHECK(seen[1].second == "converged");
    CHECK(seen[2].second == "rejected");
    CHECK(run_cli({"sweep", path.string(), "--param", "mu", "--values", "1"}).code == cli::kUsage);
    CHECK(run_cli({"sweep", path.string(), "--param", "colour", "--values", "1"}).code == cli::kUsage);
}

TEST_CASE("grid refinement lowers the planar system residual") {
    const auto r = run_cli({"sweep", config("system_planar.json"), "--param", "grid", "--values", "63,127,255"});
    REQUIRE(r.code == cli::kSuccess);
    std::istringstream rows(r.out);
    std::vector<double> residuals;
    for (std::string line; std::getline(rows, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string value, outcome, slack, iterations;
        double residual = 0;
        fields >> value >> outcome >> slack >> iterations >> residual;
        CHECK(outcome == "converged");
        residuals.push_back(residual);
    }
    REQUIRE(residuals.size() == 3);
    CHECK(residuals[1] < residuals[0]);
    CHECK(residuals[2] < residuals[1]);
}

}
