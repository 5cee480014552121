#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vortex/energy.hpp"
#include "vortex/report.hpp"

namespace vortex {

enum class InitialGuess { zero, random };

struct SolverOptions {
    /// Absolute tolerance on the max-norm of the Euler–Lagrange residual.
    double grad_tol = 1e-10;
    int max_newton = 50;
    /// Relative residual of the inner conjugate-gradient solve (fixed forcing term).
    double cg_tol = 1e-4;
    int max_cg = 1000;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    InitialGuess initial_guess = InitialGuess::zero;
    std::uint64_t seed = 0;
    /// Multiplies the random initial field (−1 gives the mirrored start).
    double initial_scale = 1.0;
    /// Attach the diagnostics report to pipeline solutions.
    bool run_diagnostics = true;

    void validate() const;
};

/// Smooth random field with max-norm 1: white noise filtered twice through (1 − Δ)⁻¹.
std::vector<double> random_field(const GridPtr& grid, int arity, std::uint64_t seed);

struct MinimizeResult {
    std::vector<double> v;
    SolveReport report;
};

/// Damped inexact Newton: preconditioned CG on the Hessian to cg_tol, Armijo backtracking.
/// Never throws on non-convergence; the status says what happened.
MinimizeResult minimize(const Problem& problem, std::vector<double> v0, const SolverOptions& options);
MinimizeResult minimize(const Problem& problem, const SolverOptions& options);

class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(SolveReport report);
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// A solved configuration: u = u₀ + v per component, plus everything the diagnostics need.
struct Solution {
    ProblemClass problem_class = ProblemClass::scalar_periodic;
    /// System regime; Regime::none for scalar problems.
    Regime regime = Regime::none;
    GridPtr grid;

    ScalarModel scalar_model;
    SystemModel system_model;
    VortexSet vortices1, vortices2;
    double mu = 0.0;
    double sigma = 0.0;

    std::vector<Field> u, v, u0;
    /// Source fields g (or g₁, g₂) of the backgrounds.
    std::vector<Field> g;
    std::vector<unsigned char> clamped;

    SolveReport report;
    DiagnosticsReport diagnostics;

    bool is_system() const {
        return problem_class == ProblemClass::system_periodic || problem_class == ProblemClass::system_planar;
    }
    bool is_planar() const {
        return problem_class == ProblemClass::scalar_planar || problem_class == ProblemClass::system_planar;
    }
};

/// Periodic pipelines: feasibility → background → functional → minimize. sigma ≤ 0 selects
/// default_sigma(grid). Throw FeasibilityError, ConfigError or ConvergenceError.
Solution solve_scalar_periodic(const ScalarModel& model, const VortexSet& vortices, const GridPtr& grid,
                               const SolverOptions& options = {}, double sigma = 0.0);
Solution solve_system_periodic(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                               const GridPtr& grid, const SolverOptions& options = {}, double sigma = 0.0);

/// Planar pipelines on a truncated box; u vanishes on the box edge.
Solution solve_scalar_planar(const ScalarModel& model, const VortexSet& vortices, const GridPtr& box, double mu,
                             const SolverOptions& options = {});
Solution solve_system_planar(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                             const GridPtr& box, double mu, const SolverOptions& options = {});

/// Rebuilds a Solution from stored regular parts without solving: backgrounds are recomputed
/// from the configuration and u = u₀ + v. `report` is left default; diagnostics are attached.
/// Pass the scalar or the system model matching `cls` (the other is ignored).
Solution assemble_solution(ProblemClass cls, const ScalarModel& scalar, const SystemModel& system,
                           const VortexSet& vortices1, const VortexSet& vortices2, const GridPtr& grid, double mu,
                           double sigma, std::vector<Field> v);

/// Default planar box half-width max(16√μ, 8/κ) for linearized decay rate κ.
double default_box_half_width(double mu, double decay_rate);

}  // namespace vortex
