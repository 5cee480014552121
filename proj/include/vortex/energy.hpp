#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vortex/background.hpp"
#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

enum class ProblemClass { scalar_periodic, system_periodic, scalar_planar, system_planar };

std::string to_string(ProblemClass c);

/// Exponent arguments above this value are clamped; the minimizer treats such points as inadmissible.
inline constexpr double kExponentClamp = 40.0;

/// Second variation of a functional at a fixed point, with a constant-coefficient preconditioner.
class HessianOperator {
public:
    virtual ~HessianOperator() = default;
    virtual void apply(std::span<const double> w, std::span<double> out) const = 0;
    /// Approximate inverse: exact solve of the Laplacian part plus the mean pointwise curvature.
    virtual void precondition(std::span<const double> r, std::span<double> z) const = 0;
};

/// A strictly convex energy functional on one or two grid fields. The unknown is
/// the regular part v (stacked [v₁; v₂] for systems) so that u = u₀ + v.
///
/// Gradients are L² gradients for the node quadrature: the directional derivative
/// of energy along w equals inner(gradient, w).
class Problem {
public:
    virtual ~Problem() = default;

    virtual ProblemClass problem_class() const = 0;
    const GridPtr& grid() const { return grid_; }
    int arity() const { return arity_; }
    std::size_t size() const { return grid_->size() * arity_; }

    virtual double energy(std::span<const double> v) const = 0;
    virtual void gradient(std::span<const double> v, std::span<double> out) const = 0;
    virtual std::unique_ptr<HessianOperator> hessian(std::span<const double> v) const = 0;

    /// Largest argument fed to an exponential at v; beyond kExponentClamp the
    /// evaluators saturate and the point is inadmissible.
    virtual double max_exponent(std::span<const double> v) const = 0;
    bool admissible(std::span<const double> v) const;

    /// Quadrature inner product Σ a·b·hx·hy over all components.
    double inner(std::span<const double> a, std::span<const double> b) const;

protected:
    Problem(GridPtr grid, int arity) : grid_(std::move(grid)), arity_(arity) {}

private:
    GridPtr grid_;
    int arity_;
};

std::vector<double> gradient(const Problem& p, std::span<const double> v);
std::vector<double> hessian_vector(const Problem& p, std::span<const double> v, std::span<const double> w);

/// ½|∇v|² + λ(a2 e^{m(u₀+v)} + b2 e^{n(u₀+v)}) − (λξ − 4πN/|Ω|)v on a torus.
class ScalarPeriodicProblem final : public Problem {
public:
    ScalarPeriodicProblem(const ScalarModel& model, const BackgroundScalar& background);

    ProblemClass problem_class() const override { return ProblemClass::scalar_periodic; }
    double energy(std::span<const double> v) const override;
    void gradient(std::span<const double> v, std::span<double> out) const override;
    std::unique_ptr<HessianOperator> hessian(std::span<const double> v) const override;
    double max_exponent(std::span<const double> v) const override;

    /// Coefficient of the linear term, λξ − 4πN/|Ω|.
    double linear_coefficient() const { return linear_; }

private:
    ScalarModel model_;
    Field u0_;
    double linear_;
};

/// Σ_j |∇v_j|²/(2λ_j) + a2 e^{m u₁} + b2 e^{u₁+u₂} + c2 e^{u₁−u₂} − η̃₁v₁ − η̃₂v₂ on a torus,
/// with η̃_j = ξ_j − 4πN_j/(|Ω|λ_j). Vanishing constants simply drop their term.
class SystemPeriodicProblem final : public Problem {
public:
    SystemPeriodicProblem(const SystemModel& model, const BackgroundSystem& background);

    ProblemClass problem_class() const override { return ProblemClass::system_periodic; }
    double energy(std::span<const double> v) const override;
    void gradient(std::span<const double> v, std::span<double> out) const override;
    std::unique_ptr<HessianOperator> hessian(std::span<const double> v) const override;
    double max_exponent(std::span<const double> v) const override;

    double linear_coefficient(int component) const { return component == 0 ? eta1_ : eta2_; }

private:
    SystemModel model_;
    Field u0_1_, u0_2_;
    double eta1_, eta2_;
};

/// Planar scalar functional in split form,
///   ½|∇v|² + λ Σ_k a_k[h^{m_k}(e^{m_k v} − 1 − m_k v) + (h^{m_k} − 1)m_k v] + g v,
/// on the box with Dirichlet data v = −u₀ on its edge (so that u vanishes there).
class ScalarPlanarProblem final : public Problem {
public:
    ScalarPlanarProblem(const ScalarModel& model, const BackgroundScalar& background);

    ProblemClass problem_class() const override { return ProblemClass::scalar_planar; }
    double energy(std::span<const double> v) const override;
    void gradient(std::span<const double> v, std::span<double> out) const override;
    std::unique_ptr<HessianOperator> hessian(std::span<const double> v) const override;
    double max_exponent(std::span<const double> v) const override;

    const Field& boundary_load() const { return load_; }

private:
    ScalarModel model_;
    Field hm_, hn_, g_, load_;
};

/// Planar system functional in split form with weights 1/λ_j,
///   Σ_j [|∇v_j|²/(2λ_j) + g_j v_j/λ_j] + a2[h₁^m(e^{mv₁}−1−mv₁) + (h₁^m−1)mv₁]
///   + b2[H₁(e^{s}−1−s) + (H₁−1)s] + c2[H₂(e^{d}−1−d) + (H₂−1)d],  s = v₁+v₂, d = v₁−v₂,
/// with Dirichlet data v_j = −u₀ⱼ on the box edge.
class SystemPlanarProblem final : public Problem {
public:
    SystemPlanarProblem(const SystemModel& model, const BackgroundSystem& background);

    ProblemClass problem_class() const override { return ProblemClass::system_planar; }
    double energy(std::span<const double> v) const override;
    void gradient(std::span<const double> v, std::span<double> out) const override;
    std::unique_ptr<HessianOperator> hessian(std::span<const double> v) const override;
    double max_exponent(std::span<const double> v) const override;

private:
    SystemModel model_;
    Field h1m_, H1_, H2_, g1_, g2_, load1_, load2_;
};

/// Validated construction. Periodic classes require a feasible configuration
/// (throws FeasibilityError), planar classes the vacuum constraints (throws ConfigError).
/// System classes accept only the FULL, AB and AC regimes; the degenerate ones are
/// solved by reduction in the solver.
std::unique_ptr<Problem> build_problem(ProblemClass cls, const ScalarModel& model, const BackgroundScalar& background);
std::unique_ptr<Problem> build_problem(ProblemClass cls, const SystemModel& model, const BackgroundSystem& background);

}  // namespace vortex
