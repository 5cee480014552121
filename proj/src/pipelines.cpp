#include <algorithm>
#include <cmath>
#include <numbers>

#include "vortex/diagnostics.hpp"
#include "vortex/solver.hpp"

namespace vortex {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

MinimizeResult run(const Problem& problem, const SolverOptions& options) {
    auto result = minimize(problem, options);
    if (!result.report.converged()) throw ConvergenceError(result.report);
    return result;
}

Field component(const GridPtr& grid, const std::vector<double>& stacked, int c) {
    const std::size_t n = grid->size();
    return Field(grid, std::vector<double>(stacked.begin() + c * n, stacked.begin() + (c + 1) * n));
}

Field combine(double a, const Field& x, double b, const Field& y) {
    Field out(x.grid_ptr());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * x[k] + b * y[k];
    return out;
}

void finish(Solution& s, const SolverOptions& options) {
    s.u.clear();
    for (std::size_t c = 0; c < s.v.size(); ++c) s.u.push_back(s.u0[c] + s.v[c]);
    if (options.run_diagnostics) s.diagnostics = run_diagnostics(s);
}

void check_periodic(const GridPtr& grid) {
    if (!grid || !grid->is_periodic()) throw ConfigError("periodic solve needs a periodic grid");
}

void check_planar(const GridPtr& box) {
    if (!box || box->is_periodic()) throw ConfigError("planar solve needs a planar box");
}

// The reduced scalar equation of the degenerate system regimes:
//   Δw = λ(|K|² e^{w₀+w} − ξ) + sources, λ = λ₁ + λ₂.
ScalarModel reduced_model(double lambda, double xi, double coefficient) {
    ScalarModel r;
    r.lambda = lambda;
    r.xi = xi;
    r.m = 1.0;
    r.n = 0.0;
    r.a2 = coefficient;
    r.b2 = 0.0;
    return r;
}

Solution system_shell(ProblemClass cls, Regime regime, const SystemModel& model, const VortexSet& v1,
                      const VortexSet& v2, const GridPtr& grid) {
    Solution s;
    s.problem_class = cls;
    s.regime = regime;
    s.grid = grid;
    s.system_model = model;
    s.vortices1 = v1;
    s.vortices2 = v2;
    return s;
}

}  // namespace

double default_box_half_width(double mu, double decay_rate) {
    if (!(mu > 0.0) || !(decay_rate > 0.0)) throw ConfigError("box default needs mu > 0 and a positive decay rate");
    return std::max(16.0 * std::sqrt(mu), 8.0 / decay_rate);
}

Solution solve_scalar_periodic(const ScalarModel& model, const VortexSet& vortices, const GridPtr& grid,
                               const SolverOptions& options, double sigma) {
    model.validate();
    options.validate();
    check_periodic(grid);
    auto verdict = feasibility_scalar_periodic(model, vortices.total(), grid->area());
    if (!verdict.feasible) throw FeasibilityError(std::move(verdict));
    if (sigma <= 0.0) sigma = default_sigma(*grid);

    const auto bg = periodic_background(grid, vortices, sigma);
    const auto problem = build_problem(ProblemClass::scalar_periodic, model, bg);
    auto result = run(*problem, options);

    Solution s;
    s.problem_class = ProblemClass::scalar_periodic;
    s.grid = grid;
    s.scalar_model = model;
    s.vortices1 = vortices;
    s.sigma = sigma;
    s.v = {Field(grid, std::move(result.v))};
    s.u0 = {bg.u0};
    s.g = {bg.g};
    s.clamped = bg.clamped;
    s.report = std::move(result.report);
    finish(s, options);
    return s;
}

Solution solve_system_periodic(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                               const GridPtr& grid, const SolverOptions& options, double sigma) {
    model.validate();
    options.validate();
    check_periodic(grid);
    const Regime regime = classify_regime(model);
    const double area = grid->area();
    auto verdict = feasibility_system_periodic(model, vortices1.total(), vortices2.total(), area, regime);
    if (!verdict.feasible) throw FeasibilityError(std::move(verdict));
    if (sigma <= 0.0) sigma = default_sigma(*grid);

    Solution s = system_shell(ProblemClass::system_periodic, regime, model, vortices1, vortices2, grid);
    s.sigma = sigma;
    const double l1 = model.lambda1, l2 = model.lambda2, lsum = l1 + l2;

    if (regime == Regime::full || regime == Regime::ab || regime == Regime::ac) {
        const auto bg = periodic_composite_fields(model, vortices1, vortices2, grid, sigma);
        const auto problem = build_problem(ProblemClass::system_periodic, model, bg);
        auto result = run(*problem, options);
        s.v = {component(grid, result.v, 0), component(grid, result.v, 1)};
        s.u0 = {bg.u0_1, bg.u0_2};
        s.g = {bg.g1, bg.g2};
        s.clamped = bg.clamped;
        s.report = std::move(result.report);
        finish(s, options);
        return s;
    }

    const auto bg1 = periodic_background(grid, vortices1, sigma);
    const auto bg2 = periodic_background(grid, vortices2, sigma);
    s.u0 = {bg1.u0, bg2.u0};
    s.g = {bg1.g, bg2.g};
    s.clamped = bg1.clamped;

    if (regime == Regime::a_only) {
        // u₂ solves the linear equation Δu₂ = −λ₂ξ₂ + sources, which is solvable only when the
        // sources balance the constant term; the regular part is then a constant, fixed to zero.
        const double lhs = vortices2.total() / l2, rhs = model.xi2 * area / kFourPi;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (std::abs(lhs - rhs) > kEqualityTolerance * scale) {
            verdict.feasible = false;
            verdict.violated.push_back("second_balance");
            verdict.messages.push_back("second_balance violated: N2/lambda2 = " + std::to_string(lhs) +
                                       " != xi2*|Omega|/(4*pi) = " + std::to_string(rhs));
            throw FeasibilityError(std::move(verdict));
        }
        ScalarModel first;
        first.lambda = l1;
        first.xi = model.xi1;
        first.m = model.m;
        first.n = 0.0;
        first.a2 = model.a2;
        first.b2 = 0.0;
        const auto problem = build_problem(ProblemClass::scalar_periodic, first, bg1);
        auto result = run(*problem, options);
        s.v = {Field(grid, std::move(result.v)), Field(grid)};
        s.report = std::move(result.report);
        finish(s, options);
        return s;
    }

    // B_ONLY: w = v₁ + v₂ over the union of vortices; C_ONLY: w = v₁ − v₂ over the difference.
    // The complementary combination λ₂v₁ ∓ λ₁v₂ is harmonic on the torus, hence constant (set to 0).
    const bool b_only = regime == Regime::b_only;
    const VortexSet reduced_set =
        b_only ? VortexSet::merged(vortices1, vortices2) : VortexSet::difference(vortices1, vortices2);
    const double xi = b_only ? (l1 * model.xi1 + l2 * model.xi2) / lsum : (l1 * model.xi1 - l2 * model.xi2) / lsum;
    const auto reduced = reduced_model(lsum, xi, b_only ? model.b2 : model.c2);
    const auto bgw = periodic_background(grid, reduced_set, sigma);
    const auto problem = build_problem(ProblemClass::scalar_periodic, reduced, bgw);
    auto result = run(*problem, options);
    const Field w(grid, std::move(result.v));
    s.v = {combine(l1 / lsum, w, 0.0, w), combine((b_only ? l2 : -l2) / lsum, w, 0.0, w)};
    s.report = std::move(result.report);
    finish(s, options);
    return s;
}

Solution solve_scalar_planar(const ScalarModel& model, const VortexSet& vortices, const GridPtr& box, double mu,
                             const SolverOptions& options) {
    model.validate();
    options.validate();
    check_planar(box);
    const auto bg = planar_background(vortices, mu, box);
    const auto problem = build_problem(ProblemClass::scalar_planar, model, bg);
    auto result = run(*problem, options);

    Solution s;
    s.problem_class = ProblemClass::scalar_planar;
    s.grid = box;
    s.scalar_model = model;
    s.vortices1 = vortices;
    s.mu = mu;
    s.v = {Field(box, std::move(result.v))};
    s.u0 = {bg.u0};
    s.g = {bg.g};
    s.clamped = bg.clamped;
    s.report = std::move(result.report);
    finish(s, options);
    return s;
}

Solution solve_system_planar(const SystemModel& model, const VortexSet& vortices1, const VortexSet& vortices2,
                             const GridPtr& box, double mu, const SolverOptions& options) {
    model.validate();
    options.validate();
    check_planar(box);
    const Regime regime = classify_regime(model);
    if (regime == Regime::none) throw ConfigError("all of |A|^2, |B|^2, |C|^2 vanish: nothing to solve");
    if (!model.on_vacuum())
        throw ConfigError("planar system requires the vacuum constraints m|A|^2 + |B|^2 + |C|^2 = xi1 and "
                          "|B|^2 - |C|^2 = xi2");

    Solution s = system_shell(ProblemClass::system_planar, regime, model, vortices1, vortices2, box);
    s.mu = mu;
    const double l1 = model.lambda1, l2 = model.lambda2, lsum = l1 + l2;

    if (regime == Regime::full || regime == Regime::ab || regime == Regime::ac) {
        const auto bg = composite_fields(model, vortices1, vortices2, mu, box);
        const auto problem = build_problem(ProblemClass::system_planar, model, bg);
        auto result = run(*problem, options);
        s.v = {component(box, result.v, 0), component(box, result.v, 1)};
        s.u0 = {bg.u0_1, bg.u0_2};
        s.g = {bg.g1, bg.g2};
        s.clamped = bg.clamped;
        s.report = std::move(result.report);
        finish(s, options);
        return s;
    }

    if (regime == Regime::c_only) (void)VortexSet::difference(vortices1, vortices2);
    const auto bg1 = planar_background(vortices1, mu, box);
    const auto bg2 = planar_background(vortices2, mu, box);
    s.u0 = {bg1.u0, bg2.u0};
    s.g = {bg1.g, bg2.g};
    s.clamped = bg1.clamped;
    for (std::size_t k = 0; k < s.clamped.size(); ++k) s.clamped[k] |= bg2.clamped[k];
    const Field r1 = log_regularizer(vortices1, mu, box);
    const Field r2 = log_regularizer(vortices2, mu, box);

    if (regime == Regime::a_only) {
        // Δu₂ = 4πΣδ: u₂ = Σ ln|x − p₂|², i.e. v₂ = Σ ln(μ + |x − p₂|²) exactly.
        ScalarModel first;
        first.lambda = l1;
        first.xi = model.xi1;
        first.m = model.m;
        first.n = 0.0;
        first.a2 = model.a2;
        first.b2 = 0.0;
        const auto problem = build_problem(ProblemClass::scalar_planar, first, bg1);
        auto result = run(*problem, options);
        s.v = {Field(box, std::move(result.v)), r2};
        s.report = std::move(result.report);
        finish(s, options);
        return s;
    }

    const bool b_only = regime == Regime::b_only;
    const VortexSet reduced_set =
        b_only ? VortexSet::merged(vortices1, vortices2) : VortexSet::difference(vortices1, vortices2);
    const double k2 = b_only ? model.b2 : model.c2;
    const auto reduced = reduced_model(lsum, k2, k2);
    const auto bgw = planar_background(reduced_set, mu, box);
    const auto problem = build_problem(ProblemClass::scalar_planar, reduced, bgw);
    auto result = run(*problem, options);
    const Field w(box, std::move(result.v));
    // Closed-form harmonic complement with zero harmonic part.
    const Field q = b_only ? combine(l2, r1, -l1, r2) : combine(l2, r1, l1, r2);
    if (b_only)
        s.v = {combine(l1 / lsum, w, 1.0 / lsum, q), combine(l2 / lsum, w, -1.0 / lsum, q)};
    else
        s.v = {combine(l1 / lsum, w, 1.0 / lsum, q), combine(-l2 / lsum, w, 1.0 / lsum, q)};
    s.report = std::move(result.report);
    finish(s, options);
    return s;
}

Solution assemble_solution(ProblemClass cls, const ScalarModel& scalar, const SystemModel& system,
                           const VortexSet& vortices1, const VortexSet& vortices2, const GridPtr& grid, double mu,
                           double sigma, std::vector<Field> v) {
    Solution s;
    s.problem_class = cls;
    s.grid = grid;
    s.vortices1 = vortices1;
    s.mu = mu;
    const bool periodic = cls == ProblemClass::scalar_periodic || cls == ProblemClass::system_periodic;
    if (periodic) {
        check_periodic(grid);
        s.sigma = sigma > 0.0 ? sigma : default_sigma(*grid);
    } else {
        check_planar(grid);
    }
    const auto background = [&](const VortexSet& vs) {
        return periodic ? periodic_background(grid, vs, s.sigma) : planar_background(vs, mu, grid);
    };
    const std::size_t arity = s.is_system() ? 2 : 1;
    if (v.size() != arity) throw ConfigError("expected " + std::to_string(arity) + " regular part(s)");
    for (const auto& f : v)
        if (!f.grid().same_layout(*grid)) throw ConfigError("regular part does not match the grid");

    const auto bg1 = background(vortices1);
    s.u0 = {bg1.u0};
    s.g = {bg1.g};
    s.clamped = bg1.clamped;
    if (s.is_system()) {
        s.system_model = system;
        s.vortices2 = vortices2;
        s.regime = classify_regime(system);
        const auto bg2 = background(vortices2);
        s.u0.push_back(bg2.u0);
        s.g.push_back(bg2.g);
        for (std::size_t k = 0; k < s.clamped.size(); ++k) s.clamped[k] |= bg2.clamped[k];
    } else {
        s.scalar_model = scalar;
    }
    s.v = std::move(v);
    SolverOptions options;
    finish(s, options);
    return s;
}

}  // namespace vortex
