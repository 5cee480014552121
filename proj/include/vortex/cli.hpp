#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vortex/diagnostics.hpp"
#include "vortex/solver.hpp"

namespace vortex::cli {

/// Exit codes of vortexctl.
enum ExitCode : int { kSuccess = 0, kFailed = 1, kUsage = 2, kNotConverged = 3 };

/// A configuration problem tied to a line of the source text (0 when unknown).
class ConfigParseError : public ConfigError {
public:
    ConfigParseError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct CellSpec {
    double lx = 2.0 * 3.141592653589793;
    double ly = 2.0 * 3.141592653589793;
    int nx = 256;
    int ny = 256;
};

struct BoxSpec {
    /// Unset: default_box_half_width(mu, decay rate).
    std::optional<double> half_width;
    /// Interior nodes per direction.
    int n = 511;
};

/// Everything one run needs. JSON on disk; see `to_json_text` for the canonical form.
struct RunConfig {
    ProblemClass problem = ProblemClass::scalar_periodic;
    ScalarModel scalar;
    SystemModel system;
    VortexSet vortices1, vortices2;
    CellSpec cell;
    BoxSpec box;
    double mu = 1.0;
    /// Mollifier width of periodic sources; ≤ 0 picks the grid default.
    double sigma = 0.0;
    SolverOptions solver;
    std::uint64_t seed = 0;
    /// Number of random starts of the uniqueness probe run by `solve` (0 = none).
    int probe = 0;
    std::string output = "out";

    bool is_system() const;
    bool is_planar() const;

    bool operator==(const RunConfig& other) const;
};

/// Parses configuration text. `source` names the text in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON: every key present, sorted, doubles printed shortest-round-trip.
std::string to_json_text(const RunConfig& config);

/// Grid of the run; planar half-width defaults from mu and the decay rate.
GridPtr make_grid(const RunConfig& config);
double box_half_width(const RunConfig& config);

/// Runs the selected pipeline (throws FeasibilityError, ConfigError, ConvergenceError).
Solution run_pipeline(const RunConfig& config, const SolverOptions& options);

/// Structured report of a solution as JSON text (no timings, so reruns compare byte for byte).
std::string report_json(const RunConfig& config, const Solution& solution);

/// Entry point of vortexctl. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vortex::cli
