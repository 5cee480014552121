#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vortex/report.hpp"
#include "vortex/solver.hpp"

namespace vortex {

/// Tolerances of the identity checks.
inline constexpr double kScalarIdentityTolerance = 0.01;
inline constexpr double kPeriodicSystemTolerance = 0.005;
inline constexpr double kPlanarIdentityTolerance = 0.02;
inline constexpr double kSignThreshold = 1e-6;
inline constexpr double kUniquenessTolerance = 1e-8;
/// Ring averages below this magnitude are left out of the decay fit.
inline constexpr double kDecaySignalFloor = 1e-7;

/// Integral identities forced on a solution: L¹ quantization, flux forms, periodic
/// constraint integrals and the reduced identities of the degenerate regimes.
/// Identities that do not apply (log-growing fields, missing sign guarantees) are
/// listed in `skipped` instead.
std::vector<Residual> quantization_check(const Solution& sol, std::vector<std::string>* skipped = nullptr);

/// Maxima of u (scalar) or u₁, u₁ ± u₂, u₁/λ₁ ± u₂/λ₂ (system) over non-clamped nodes.
/// Combinations covered by `guarantees` must stay below kSignThreshold; others are reported only.
std::vector<SignCheck> sign_check(const Solution& sol, const SignGuarantees& guarantees);
std::vector<SignCheck> sign_check(const Solution& sol);

/// Bilinear interpolation of a grid field (periodic wrap; nullopt outside the planar node hull).
std::optional<double> interpolate(const Field& f, Point x);

/// Mean of f over `samples` equally spaced points on the circle |x − center| = radius;
/// nullopt if fewer than half of the points can be interpolated.
std::optional<double> ring_average(const Field& f, Point center, double radius, int samples = 64);

/// Least-squares fit of ln(ring average of |u|) against r over [L/3, 2L/3] about the vortex
/// centroid, skipping radii whose average is below kDecaySignalFloor. Scalar: u; systems: the
/// combination that decays in the regime. Planar only; nullopt for N = 0 or an all-zero field.
std::optional<DecayFit> decay_fit(const Solution& sol);

/// Slope of the ring-averaged v₁ against ln r over [L/3, 2L/3] for planar B_ONLY / C_ONLY solutions.
std::optional<LogGrowthFit> log_growth_fit(const Solution& sol);

/// Expected log-growth coefficient of v₁ for the planar B_ONLY / C_ONLY regimes.
double expected_log_growth(const SystemModel& model, Regime regime, int n1, int n2);

/// Residual of the original equations at nodes more than ten cells from every vortex
/// (and, on a box, from its edge).
double pde_residual(const Solution& sol);

/// Everything above except the uniqueness probe.
DiagnosticsReport run_diagnostics(const Solution& sol);

/// Runs `pipeline` k times from random initial fields (seeds seed, seed+1, …) and returns the
/// largest pairwise max-norm difference of the regular parts. With k = 2 the second start is
/// the mirror image of the first. Any failure propagates.
double uniqueness_probe(const std::function<Solution(const SolverOptions&)>& pipeline, const SolverOptions& base,
                        int k, std::uint64_t seed);

}  // namespace vortex
