#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "vortex/solver.hpp"

namespace vortex {

namespace {

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

// Preconditioned CG for H p = b. Returns the iteration count; p starts at zero.
int pcg(const Problem& problem, const HessianOperator& h, std::span<const double> b, std::span<double> p,
        double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    std::fill(p.begin(), p.end(), 0.0);
    std::vector<double> r(b.begin(), b.end()), z(n), d(n), hd(n);
    const double b_norm = std::sqrt(problem.inner(b, b));
    if (b_norm == 0.0) return 0;
    h.precondition(r, z);
    d = z;
    double rz = problem.inner(r, z);
    int it = 0;
    while (it < max_iter) {
        h.apply(d, hd);
        const double dhd = problem.inner(d, hd);
        if (!(dhd > 0.0)) break;
        const double alpha = rz / dhd;
        axpy(alpha, d, p);
        axpy(-alpha, hd, r);
        ++it;
        if (std::sqrt(problem.inner(r, r)) <= rel_tol * b_norm) break;
        h.precondition(r, z);
        const double rz_next = problem.inner(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d[k];
    }
    return it;
}

}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::line_search_failed: return "line_search_failed";
    }
    return "?";
}

void SolverOptions::validate() const {
    if (!(grad_tol > 0.0 && grad_tol < 1.0)) throw ConfigError("grad_tol must lie in (0, 1)");
    if (max_newton < 1 || max_cg < 1 || max_backtracks < 1) throw ConfigError("iteration limits must be positive");
    if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw ConfigError("cg_tol must lie in (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 0.5)) throw ConfigError("armijo_c must lie in (0, 0.5)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtrack factor must lie in (0, 1)");
}

std::vector<double> random_field(const GridPtr& grid, int arity, std::uint64_t seed) {
    const std::size_t n = grid->size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> noise(n * arity), smooth(n * arity);
    for (auto& x : noise) x = normal(rng);
    const std::array<double, 2> one{1.0, 1.0};
    const std::array<double, 4> identity{1.0, 0.0, 0.0, 1.0};
    const std::array<double, 1> unit{1.0};
    for (int pass = 0; pass < 2; ++pass) {
        if (arity == 1)
            solve_shifted(*grid, 1, std::span<const double>(one.data(), 1), unit, noise, smooth);
        else
            solve_shifted(*grid, 2, one, identity, noise, smooth);
        noise.swap(smooth);
    }
    const double scale = max_abs(noise);
    if (scale > 0.0)
        for (auto& x : noise) x /= scale;
    return noise;
}

ConvergenceError::ConvergenceError(SolveReport report)
    : std::runtime_error("minimization did not converge (" + to_string(report.status) + ", residual " +
                         std::to_string(report.gradient_norm) + " after " + std::to_string(report.iterations) +
                         " Newton steps)"),
      report_(std::move(report)) {}

MinimizeResult minimize(const Problem& problem, const SolverOptions& options) {
    std::vector<double> v0(problem.size(), 0.0);
    if (options.initial_guess == InitialGuess::random) {
        v0 = random_field(problem.grid(), problem.arity(), options.seed);
        for (auto& x : v0) x *= options.initial_scale;
    }
    auto result = minimize(problem, std::move(v0), options);
    result.report.initial_guess = options.initial_guess == InitialGuess::random ? "random" : "zero";
    result.report.seed = options.seed;
    return result;
}

MinimizeResult minimize(const Problem& problem, std::vector<double> v, const SolverOptions& options) {
    options.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = problem.size();
    if (v.size() != n) throw ConfigError("initial guess has the wrong length");
    if (!problem.admissible(v)) throw ConfigError("initial guess overflows the exponential terms");

    MinimizeResult out;
    SolveReport& rep = out.report;
    std::vector<double> g(n), p(n), trial(n), g_trial(n), rhs(n);

    double e = problem.energy(v);
    problem.gradient(v, g);
    double g_norm = max_abs(g);
    rep.energy_history.push_back(e);
    rep.gradient_history.push_back(g_norm);

    rep.status = SolveStatus::max_iterations;
    for (int it = 0;; ++it) {
        if (g_norm <= options.grad_tol) {
            rep.status = SolveStatus::converged;
            break;
        }
        if (it >= options.max_newton) break;

        const auto h = problem.hessian(v);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = -g[k];
        rep.cg_iterations += pcg(problem, *h, rhs, p, options.cg_tol, options.max_cg);
        double slope = problem.inner(g, p);
        if (!(slope < 0.0)) {
            // Should not happen for a convex functional; fall back to the preconditioned gradient.
            h->precondition(rhs, p);
            slope = problem.inner(g, p);
        }

        // Near the minimizer the predicted decrease drops below the resolution of the
        // energy itself; there a step is accepted if it reduces the residual instead.
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e));
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < options.max_backtracks; ++bt, t *= options.backtrack) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = v[k] + t * p[k];
            if (!problem.admissible(trial)) continue;
            const double e_trial = problem.energy(trial);
            if (!std::isfinite(e_trial)) continue;
            if (e_trial <= e + options.armijo_c * t * slope) {
                accepted = true;
            } else if (-t * slope <= roundoff && e_trial <= e + roundoff) {
                problem.gradient(trial, g_trial);
                if (max_abs(g_trial) < g_norm) {
                    accepted = true;
                    ++rep.roundoff_steps;
                }
            }
            if (accepted) {
                e = e_trial;
                break;
            }
        }
        if (!accepted) {
            rep.status = SolveStatus::line_search_failed;
            break;
        }
        v.swap(trial);
        problem.gradient(v, g);
        g_norm = max_abs(g);
        rep.iterations = it + 1;
        rep.energy_history.push_back(e);
        rep.gradient_history.push_back(g_norm);
    }

    rep.energy = e;
    rep.gradient_norm = g_norm;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.v = std::move(v);
    return out;
}

}  // namespace vortex
