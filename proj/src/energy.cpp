#include "vortex/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace vortex {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double ex(double x) { return std::exp(std::min(x, kExponentClamp)); }

// h(e^{kx} − 1 − kx) + (h − 1)kx, the split integrand whose x-derivative is k(h e^{kx} − 1).
double split_term(double h, double k, double x) {
    const double kx = std::min(k * x, kExponentClamp);
    return h * (std::expm1(kx) - kx) + (h - 1.0) * k * x;
}

class BlockHessian final : public HessianOperator {
public:
    BlockHessian(GridPtr grid, int arity, std::array<double, 2> diffusion)
        : grid_(std::move(grid)), arity_(arity), diffusion_(diffusion) {
        const std::size_t n = grid_->size();
        c11_.assign(n, 0.0);
        if (arity_ == 2) {
            c12_.assign(n, 0.0);
            c22_.assign(n, 0.0);
        }
    }

    std::vector<double>& c11() { return c11_; }
    std::vector<double>& c12() { return c12_; }
    std::vector<double>& c22() { return c22_; }

    void finalize() {
        const auto mean = [&](const std::vector<double>& c) { return integrate(*grid_, c) / grid_->area(); };
        coupling_ = {mean(c11_), 0.0, 0.0, 0.0};
        if (arity_ == 2) {
            const double m12 = mean(c12_), m22 = mean(c22_);
            coupling_ = {coupling_[0], m12, m12, m22};
        }
    }

    void apply(std::span<const double> w, std::span<double> out) const override {
        const std::size_t n = grid_->size();
        for (int c = 0; c < arity_; ++c)
            apply_laplacian(*grid_, w.subspan(c * n, n), out.subspan(c * n, n));
        if (arity_ == 1) {
            for (std::size_t k = 0; k < n; ++k) out[k] = -diffusion_[0] * out[k] + c11_[k] * w[k];
            return;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double w1 = w[k], w2 = w[n + k];
            out[k] = -diffusion_[0] * out[k] + c11_[k] * w1 + c12_[k] * w2;
            out[n + k] = -diffusion_[1] * out[n + k] + c12_[k] * w1 + c22_[k] * w2;
        }
    }

    void precondition(std::span<const double> r, std::span<double> z) const override {
        solve_shifted(*grid_, arity_, std::span<const double>(diffusion_.data(), arity_), coupling_, r, z);
    }

private:
    GridPtr grid_;
    int arity_;
    std::array<double, 2> diffusion_;
    std::array<double, 4> coupling_{};
    std::vector<double> c11_, c12_, c22_;
};

std::vector<double> laplacian(const Grid& grid, std::span<const double> v) {
    std::vector<double> out(v.size());
    apply_laplacian(grid, v, out);
    return out;
}

Field edge_load(const GridPtr& box, const VortexSet& vortices, double mu) {
    return dirichlet_load(box, [&](Point p) { return -planar_background_at(vortices, mu, p); });
}

}  // namespace

std::string to_string(ProblemClass c) {
    switch (c) {
        case ProblemClass::scalar_periodic: return "SCALAR_PERIODIC";
        case ProblemClass::system_periodic: return "SYSTEM_PERIODIC";
        case ProblemClass::scalar_planar: return "SCALAR_PLANAR";
        case ProblemClass::system_planar: return "SYSTEM_PLANAR";
    }
    return "?";
}

bool Problem::admissible(std::span<const double> v) const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return max_exponent(v) <= kExponentClamp;
}

double Problem::inner(std::span<const double> a, std::span<const double> b) const {
    // Compensated, fixed-order sum: line searches compare energies differing in the last digits.
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double x = a[k] * b[k];
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return (sum + comp) * grid_->cell();
}

std::vector<double> gradient(const Problem& p, std::span<const double> v) {
    std::vector<double> g(p.size());
    p.gradient(v, g);
    return g;
}

std::vector<double> hessian_vector(const Problem& p, std::span<const double> v, std::span<const double> w) {
    std::vector<double> out(p.size());
    p.hessian(v)->apply(w, out);
    return out;
}

// ---------------------------------------------------------------- scalar periodic

ScalarPeriodicProblem::ScalarPeriodicProblem(const ScalarModel& model, const BackgroundScalar& background)
    : Problem(background.u0.grid_ptr(), 1), model_(model), u0_(background.u0) {
    linear_ = model.lambda * model.xi - kFourPi * background.vortices.total() / grid()->area();
}

double ScalarPeriodicProblem::energy(std::span<const double> v) const {
    const auto lap = laplacian(*grid(), v);
    const double la = model_.lambda * model_.a2, lb = model_.lambda * model_.b2;
    std::vector<double> density(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = u0_[k] + v[k];
        double e = 0.0;
        if (la != 0.0) e += la * ex(model_.m * u);
        if (lb != 0.0) e += lb * ex(model_.n * u);
        density[k] = -0.5 * v[k] * lap[k] + e - linear_ * v[k];
    }
    return integrate(*grid(), density);
}

void ScalarPeriodicProblem::gradient(std::span<const double> v, std::span<double> out) const {
    apply_laplacian(*grid(), v, out);
    const double la = model_.lambda * model_.a2 * model_.m, lb = model_.lambda * model_.b2 * model_.n;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = u0_[k] + v[k];
        double e = 0.0;
        if (la != 0.0) e += la * ex(model_.m * u);
        if (lb != 0.0) e += lb * ex(model_.n * u);
        out[k] = -out[k] + e - linear_;
    }
}

std::unique_ptr<HessianOperator> ScalarPeriodicProblem::hessian(std::span<const double> v) const {
    auto h = std::make_unique<BlockHessian>(grid(), 1, std::array<double, 2>{1.0, 0.0});
    const double la = model_.lambda * model_.a2 * model_.m * model_.m;
    const double lb = model_.lambda * model_.b2 * model_.n * model_.n;
    auto& c = h->c11();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = u0_[k] + v[k];
        double e = 0.0;
        if (la != 0.0) e += la * ex(model_.m * u);
        if (lb != 0.0) e += lb * ex(model_.n * u);
        c[k] = e;
    }
    h->finalize();
    return h;
}

double ScalarPeriodicProblem::max_exponent(std::span<const double> v) const {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = u0_[k] + v[k];
        if (model_.a2 != 0.0) top = std::max(top, model_.m * u);
        if (model_.b2 != 0.0) top = std::max(top, model_.n * u);
    }
    return top;
}

// ---------------------------------------------------------------- system periodic

SystemPeriodicProblem::SystemPeriodicProblem(const SystemModel& model, const BackgroundSystem& background)
    : Problem(background.u0_1.grid_ptr(), 2), model_(model), u0_1_(background.u0_1), u0_2_(background.u0_2) {
    const double area = grid()->area();
    eta1_ = model.xi1 - kFourPi * background.vortices1.total() / (area * model.lambda1);
    eta2_ = model.xi2 - kFourPi * background.vortices2.total() / (area * model.lambda2);
}

double SystemPeriodicProblem::energy(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    const auto v1 = v.first(n), v2 = v.subspan(n, n);
    const auto lap1 = laplacian(*grid(), v1), lap2 = laplacian(*grid(), v2);
    const double il1 = 0.5 / model_.lambda1, il2 = 0.5 / model_.lambda2;
    std::vector<double> density(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = u0_1_[k] + v1[k], u2 = u0_2_[k] + v2[k];
        double e = 0.0;
        if (model_.a2 != 0.0) e += model_.a2 * ex(model_.m * u1);
        if (model_.b2 != 0.0) e += model_.b2 * ex(u1 + u2);
        if (model_.c2 != 0.0) e += model_.c2 * ex(u1 - u2);
        density[k] = -il1 * v1[k] * lap1[k] - il2 * v2[k] * lap2[k] + e - eta1_ * v1[k] - eta2_ * v2[k];
    }
    return integrate(*grid(), density);
}

void SystemPeriodicProblem::gradient(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = grid()->size();
    const auto v1 = v.first(n), v2 = v.subspan(n, n);
    auto o1 = out.first(n), o2 = out.subspan(n, n);
    apply_laplacian(*grid(), v1, o1);
    apply_laplacian(*grid(), v2, o2);
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = u0_1_[k] + v1[k], u2 = u0_2_[k] + v2[k];
        const double ea = model_.a2 != 0.0 ? model_.m * model_.a2 * ex(model_.m * u1) : 0.0;
        const double eb = model_.b2 != 0.0 ? model_.b2 * ex(u1 + u2) : 0.0;
        const double ec = model_.c2 != 0.0 ? model_.c2 * ex(u1 - u2) : 0.0;
        o1[k] = -o1[k] / model_.lambda1 + ea + eb + ec - eta1_;
        o2[k] = -o2[k] / model_.lambda2 + eb - ec - eta2_;
    }
}

std::unique_ptr<HessianOperator> SystemPeriodicProblem::hessian(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    auto h = std::make_unique<BlockHessian>(grid(), 2,
                                            std::array<double, 2>{1.0 / model_.lambda1, 1.0 / model_.lambda2});
    auto &c11 = h->c11(), &c12 = h->c12(), &c22 = h->c22();
    const double mm = static_cast<double>(model_.m) * model_.m;
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = u0_1_[k] + v[k], u2 = u0_2_[k] + v[n + k];
        const double ea = model_.a2 != 0.0 ? mm * model_.a2 * ex(model_.m * u1) : 0.0;
        const double eb = model_.b2 != 0.0 ? model_.b2 * ex(u1 + u2) : 0.0;
        const double ec = model_.c2 != 0.0 ? model_.c2 * ex(u1 - u2) : 0.0;
        c11[k] = ea + eb + ec;
        c12[k] = eb - ec;
        c22[k] = eb + ec;
    }
    h->finalize();
    return h;
}

double SystemPeriodicProblem::max_exponent(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = u0_1_[k] + v[k], u2 = u0_2_[k] + v[n + k];
        if (model_.a2 != 0.0) top = std::max(top, model_.m * u1);
        if (model_.b2 != 0.0) top = std::max(top, u1 + u2);
        if (model_.c2 != 0.0) top = std::max(top, u1 - u2);
    }
    return top;
}

// ---------------------------------------------------------------- scalar planar

ScalarPlanarProblem::ScalarPlanarProblem(const ScalarModel& model, const BackgroundScalar& background)
    : Problem(background.u0.grid_ptr(), 1), model_(model), hm_(grid()), hn_(grid()), g_(background.g) {
    for (std::size_t k = 0; k < grid()->size(); ++k) {
        hm_[k] = std::exp(model.m * background.u0[k]);
        hn_[k] = std::exp(model.n * background.u0[k]);
    }
    load_ = edge_load(grid(), background.vortices, background.mu);
}

double ScalarPlanarProblem::energy(std::span<const double> v) const {
    const auto lap = laplacian(*grid(), v);
    const double la = model_.lambda * model_.a2, lb = model_.lambda * model_.b2;
    std::vector<double> density(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        double e = 0.0;
        if (la != 0.0) e += la * split_term(hm_[k], model_.m, v[k]);
        if (lb != 0.0) e += lb * split_term(hn_[k], model_.n, v[k]);
        density[k] = -0.5 * v[k] * lap[k] - v[k] * load_[k] + e + g_[k] * v[k];
    }
    return integrate(*grid(), density);
}

void ScalarPlanarProblem::gradient(std::span<const double> v, std::span<double> out) const {
    apply_laplacian(*grid(), v, out);
    const double la = model_.lambda * model_.a2 * model_.m, lb = model_.lambda * model_.b2 * model_.n;
    for (std::size_t k = 0; k < v.size(); ++k) {
        double e = 0.0;
        if (la != 0.0) e += la * (hm_[k] * ex(model_.m * v[k]) - 1.0);
        if (lb != 0.0) e += lb * (hn_[k] * ex(model_.n * v[k]) - 1.0);
        out[k] = -out[k] - load_[k] + e + g_[k];
    }
}

std::unique_ptr<HessianOperator> ScalarPlanarProblem::hessian(std::span<const double> v) const {
    auto h = std::make_unique<BlockHessian>(grid(), 1, std::array<double, 2>{1.0, 0.0});
    const double la = model_.lambda * model_.a2 * model_.m * model_.m;
    const double lb = model_.lambda * model_.b2 * model_.n * model_.n;
    auto& c = h->c11();
    for (std::size_t k = 0; k < v.size(); ++k) {
        double e = 0.0;
        if (la != 0.0) e += la * hm_[k] * ex(model_.m * v[k]);
        if (lb != 0.0) e += lb * hn_[k] * ex(model_.n * v[k]);
        c[k] = e;
    }
    h->finalize();
    return h;
}

double ScalarPlanarProblem::max_exponent(std::span<const double> v) const {
    double top = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (model_.a2 != 0.0) top = std::max(top, model_.m * x);
        if (model_.b2 != 0.0) top = std::max(top, model_.n * x);
    }
    return top;
}

// ---------------------------------------------------------------- system planar

SystemPlanarProblem::SystemPlanarProblem(const SystemModel& model, const BackgroundSystem& background)
    : Problem(background.u0_1.grid_ptr(), 2),
      model_(model),
      h1m_(background.h1m),
      H1_(background.H1),
      H2_(background.H2),
      g1_(background.g1),
      g2_(background.g2) {
    load1_ = edge_load(grid(), background.vortices1, background.mu);
    load2_ = edge_load(grid(), background.vortices2, background.mu);
}

double SystemPlanarProblem::energy(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    const auto v1 = v.first(n), v2 = v.subspan(n, n);
    const auto lap1 = laplacian(*grid(), v1), lap2 = laplacian(*grid(), v2);
    const double il1 = 1.0 / model_.lambda1, il2 = 1.0 / model_.lambda2;
    std::vector<double> density(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = v1[k] + v2[k], d = v1[k] - v2[k];
        double e = 0.0;
        if (model_.a2 != 0.0) e += model_.a2 * split_term(h1m_[k], model_.m, v1[k]);
        if (model_.b2 != 0.0) e += model_.b2 * split_term(H1_[k], 1.0, s);
        if (model_.c2 != 0.0) e += model_.c2 * split_term(H2_[k], 1.0, d);
        density[k] = il1 * (-0.5 * v1[k] * lap1[k] - v1[k] * load1_[k] + g1_[k] * v1[k]) +
                     il2 * (-0.5 * v2[k] * lap2[k] - v2[k] * load2_[k] + g2_[k] * v2[k]) + e;
    }
    return integrate(*grid(), density);
}

void SystemPlanarProblem::gradient(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = grid()->size();
    const auto v1 = v.first(n), v2 = v.subspan(n, n);
    auto o1 = out.first(n), o2 = out.subspan(n, n);
    apply_laplacian(*grid(), v1, o1);
    apply_laplacian(*grid(), v2, o2);
    const double il1 = 1.0 / model_.lambda1, il2 = 1.0 / model_.lambda2;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = v1[k] + v2[k], d = v1[k] - v2[k];
        const double ea = model_.a2 != 0.0 ? model_.m * model_.a2 * (h1m_[k] * ex(model_.m * v1[k]) - 1.0) : 0.0;
        const double eb = model_.b2 != 0.0 ? model_.b2 * (H1_[k] * ex(s) - 1.0) : 0.0;
        const double ec = model_.c2 != 0.0 ? model_.c2 * (H2_[k] * ex(d) - 1.0) : 0.0;
        o1[k] = il1 * (-o1[k] - load1_[k] + g1_[k]) + ea + eb + ec;
        o2[k] = il2 * (-o2[k] - load2_[k] + g2_[k]) + eb - ec;
    }
}

std::unique_ptr<HessianOperator> SystemPlanarProblem::hessian(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    auto h = std::make_unique<BlockHessian>(grid(), 2,
                                            std::array<double, 2>{1.0 / model_.lambda1, 1.0 / model_.lambda2});
    auto &c11 = h->c11(), &c12 = h->c12(), &c22 = h->c22();
    const double mm = static_cast<double>(model_.m) * model_.m;
    for (std::size_t k = 0; k < n; ++k) {
        const double v1 = v[k], v2 = v[n + k];
        const double ea = model_.a2 != 0.0 ? mm * model_.a2 * h1m_[k] * ex(model_.m * v1) : 0.0;
        const double eb = model_.b2 != 0.0 ? model_.b2 * H1_[k] * ex(v1 + v2) : 0.0;
        const double ec = model_.c2 != 0.0 ? model_.c2 * H2_[k] * ex(v1 - v2) : 0.0;
        c11[k] = ea + eb + ec;
        c12[k] = eb - ec;
        c22[k] = eb + ec;
    }
    h->finalize();
    return h;
}

double SystemPlanarProblem::max_exponent(std::span<const double> v) const {
    const std::size_t n = grid()->size();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double v1 = v[k], v2 = v[n + k];
        if (model_.a2 != 0.0) top = std::max(top, model_.m * v1);
        if (model_.b2 != 0.0) top = std::max(top, v1 + v2);
        if (model_.c2 != 0.0) top = std::max(top, v1 - v2);
    }
    return top;
}

// ---------------------------------------------------------------- construction

std::unique_ptr<Problem> build_problem(ProblemClass cls, const ScalarModel& model, const BackgroundScalar& background) {
    model.validate();
    const Grid& grid = background.u0.grid();
    switch (cls) {
        case ProblemClass::scalar_periodic: {
            if (!grid.is_periodic()) throw ConfigError("SCALAR_PERIODIC needs a periodic grid");
            auto verdict = feasibility_scalar_periodic(model, background.vortices.total(), grid.area());
            if (!verdict.feasible) throw FeasibilityError(std::move(verdict));
            return std::make_unique<ScalarPeriodicProblem>(model, background);
        }
        case ProblemClass::scalar_planar:
            if (grid.is_periodic()) throw ConfigError("SCALAR_PLANAR needs a planar box");
            if (!model.on_vacuum())
                throw ConfigError("planar scalar problem requires the vacuum condition m|A|^2 + n|B|^2 = xi");
            return std::make_unique<ScalarPlanarProblem>(model, background);
        default:
            throw ConfigError("problem class " + to_string(cls) + " is not a scalar class");
    }
}

std::unique_ptr<Problem> build_problem(ProblemClass cls, const SystemModel& model, const BackgroundSystem& background) {
    model.validate();
    const Regime regime = classify_regime(model);
    if (regime != Regime::full && regime != Regime::ab && regime != Regime::ac)
        throw ConfigError("regime " + to_string(regime) +
                          " has fewer than two nonzero constants; it is solved by reduction, not by the system functional");
    const Grid& grid = background.u0_1.grid();
    switch (cls) {
        case ProblemClass::system_periodic: {
            if (!grid.is_periodic()) throw ConfigError("SYSTEM_PERIODIC needs a periodic grid");
            auto verdict = feasibility_system_periodic(model, background.vortices1.total(),
                                                       background.vortices2.total(), grid.area(), regime);
            if (!verdict.feasible) throw FeasibilityError(std::move(verdict));
            return std::make_unique<SystemPeriodicProblem>(model, background);
        }
        case ProblemClass::system_planar:
            if (grid.is_periodic()) throw ConfigError("SYSTEM_PLANAR needs a planar box");
            if (!model.on_vacuum())
                throw ConfigError("planar system requires the vacuum constraints m|A|^2 + |B|^2 + |C|^2 = xi1 and "
                                  "|B|^2 - |C|^2 = xi2");
            return std::make_unique<SystemPlanarProblem>(model, background);
        default:
            throw ConfigError("problem class " + to_string(cls) + " is not a system class");
    }
}

}  // namespace vortex
