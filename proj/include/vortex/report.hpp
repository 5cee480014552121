#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vortex {

enum class SolveStatus { converged, max_iterations, line_search_failed };

std::string to_string(SolveStatus s);

/// Convergence record of one minimization.
struct SolveReport {
    SolveStatus status = SolveStatus::max_iterations;
    int iterations = 0;
    int cg_iterations = 0;
    double energy = 0.0;
    /// Max-norm of the Euler–Lagrange residual at the returned iterate.
    double gradient_norm = 0.0;
    /// Energy at the initial guess followed by the energy after each accepted step.
    std::vector<double> energy_history;
    std::vector<double> gradient_history;
    /// Steps accepted by the round-off fallback (gradient decrease) rather than the Armijo test.
    int roundoff_steps = 0;
    std::string initial_guess = "zero";
    std::uint64_t seed = 0;
    double seconds = 0.0;

    bool converged() const { return status == SolveStatus::converged; }
};

/// One checked identity: computed value against its exact right-hand side.
struct Residual {
    std::string name;
    double value = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    /// Free-form qualifier, e.g. "fallback" when an L¹ identity is replaced by its flux form.
    std::string note;
};

/// Maxima of sign-definite combinations over nodes away from clamped vortex cores.
struct SignCheck {
    std::string name;
    double max = 0.0;
    bool guaranteed = false;
    bool pass = true;
};

struct DecayFit {
    double rate = 0.0;
    double r_squared = 0.0;
    double window_min = 0.0;
    double window_max = 0.0;
    /// Linearized rate used for comparison (informational for systems).
    double expected_rate = 0.0;
    bool pass = false;
};

struct LogGrowthFit {
    double coefficient = 0.0;
    double expected = 0.0;
    double rel_error = 0.0;
    double r_squared = 0.0;
    double tolerance = 0.05;
    bool pass = false;
};

struct DiagnosticsReport {
    std::vector<Residual> residuals;
    std::vector<SignCheck> signs;
    std::optional<DecayFit> decay;
    std::optional<LogGrowthFit> log_growth;
    std::optional<double> uniqueness_spread;
    /// Max-norm of the untransformed equation residual at nodes more than ten cells from every
    /// vortex (informational: discretization error, not solver error).
    std::optional<double> pde_residual;
    /// Identities that do not apply to this configuration, with the reason.
    std::vector<std::string> skipped;

    bool pass() const;
};

}  // namespace vortex
