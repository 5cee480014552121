#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vortex/diagnostics.hpp"
#include "vortex/solver.hpp"

namespace vortex::test {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// λ = ξ = 1, m = n = 1, |A|² = |B|² = ½.
inline ScalarModel unit_scalar() { return ScalarModel{}; }

// A system satisfying both sign conditions, on the vacuum manifold.
inline SystemModel signed_system() {
    SystemModel m;
    m.lambda1 = 1.0;
    m.lambda2 = 3.0;
    m.m = 1;
    m.a2 = 0.01;
    m.b2 = 2.0;
    m.c2 = 1.0;
    m.xi1 = m.m * m.a2 + m.b2 + m.c2;
    m.xi2 = m.b2 - m.c2;
    return m;
}

inline VortexSet vortices(std::initializer_list<Point> points) {
    VortexSet s;
    for (auto p : points) s.add(p);
    return s;
}

inline std::vector<double> smooth_random(const GridPtr& grid, int arity, std::uint64_t seed, double amplitude) {
    auto v = random_field(grid, arity, seed);
    for (auto& x : v) x *= amplitude;
    return v;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// The four problem classes on small grids, for evaluator-level tests.
struct ProblemZoo {
    GridPtr torus = Grid::periodic(kTwoPi, kTwoPi, 64, 64);
    GridPtr torus2 = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 64, 64);
    GridPtr box = Grid::planar(8.0, 63, 63);

    std::vector<std::unique_ptr<Problem>> all() const {
        std::vector<std::unique_ptr<Problem>> out;
        const double sigma = default_sigma(*torus);
        out.push_back(build_problem(ProblemClass::scalar_periodic, unit_scalar(),
                                    periodic_background(torus, vortices({{1.0, 2.0}, {4.0, 4.5}}), sigma)));
        out.push_back(build_problem(ProblemClass::system_periodic, signed_system(),
                                    periodic_composite_fields(signed_system(), vortices({{3, 3}, {8, 7}}),
                                                              vortices({{3, 3}}), torus2, default_sigma(*torus2))));
        out.push_back(build_problem(ProblemClass::scalar_planar, unit_scalar(),
                                    planar_background(vortices({{0.3, -0.2}}), 1.0, box)));
        out.push_back(build_problem(ProblemClass::system_planar, signed_system(),
                                    composite_fields(signed_system(), vortices({{-1, 0}, {1, 0.5}}),
                                                     vortices({{-1, 0}}), 1.0, box)));
        return out;
    }
};

}  // namespace vortex::test
