#include <doctest.h>

#include "support.hpp"

using namespace vortex;
using vortex::test::kPi;
using vortex::test::kTwoPi;

namespace {

std::vector<double> axpy(const std::vector<double>& v, double t, const std::vector<double>& w) {
    std::vector<double> out(v);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += t * w[i];
    return out;
}

std::vector<double> cyclic_shift(const Grid& g, const std::vector<double>& v, int di, int dj) {
    std::vector<double> out(v.size());
    const std::size_t n = g.size();
    for (std::size_t c = 0; c < v.size() / n; ++c)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                out[c * n + g.index((i + di) % g.nx(), (j + dj) % g.ny())] = v[c * n + g.index(i, j)];
    return out;
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("gradient matches central differences") {
    test::ProblemZoo zoo;
    for (const auto& p : zoo.all()) {
        CAPTURE(to_string(p->problem_class()));
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto v = test::smooth_random(p->grid(), p->arity(), 100 + s, 0.5);
            const auto w = test::smooth_random(p->grid(), p->arity(), 200 + s, 1.0);
            const double eps = 1e-5;
            const double fd = (p->energy(axpy(v, eps, w)) - p->energy(axpy(v, -eps, w))) / (2 * eps);
            const double exact = p->inner(gradient(*p, v), w);
            CHECK(std::abs(fd - exact) <= 1e-6 * (1 + std::abs(exact)));
        }
    }
}

TEST_CASE("hessian-vector products") {
    test::ProblemZoo zoo;
    for (const auto& p : zoo.all()) {
        CAPTURE(to_string(p->problem_class()));
        const auto v = test::smooth_random(p->grid(), p->arity(), 1, 0.5);
        const auto w1 = test::smooth_random(p->grid(), p->arity(), 2, 1.0);
        const auto w2 = test::white_noise(p->size(), 3);
        const auto h1 = hessian_vector(*p, v, w1), h2 = hessian_vector(*p, v, w2);

        const double a = p->inner(w1, h2), b = p->inner(w2, h1);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)));
        CHECK(p->inner(w1, h1) > 0);
        CHECK(p->inner(w2, h2) > 0);

        const double eps = 1e-6;
        const auto gp = gradient(*p, axpy(v, eps, w1)), gm = gradient(*p, axpy(v, -eps, w1));
        double err = 0, scale = 0;
        for (std::size_t i = 0; i < h1.size(); ++i) {
            err = std::max(err, std::abs((gp[i] - gm[i]) / (2 * eps) - h1[i]));
            scale = std::max(scale, std::abs(h1[i]));
        }
        CHECK(err <= 1e-5 * scale);
    }
}

TEST_CASE("midpoint convexity is strict") {
    test::ProblemZoo zoo;
    for (const auto& p : zoo.all()) {
        CAPTURE(to_string(p->problem_class()));
        int strict = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto v = test::smooth_random(p->grid(), p->arity(), 1000 + 2 * s, 1.0);
            const auto w = test::smooth_random(p->grid(), p->arity(), 1001 + 2 * s, 1.0);
            std::vector<double> mid(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) mid[i] = 0.5 * (v[i] + w[i]);
            const double avg = 0.5 * (p->energy(v) + p->energy(w));
            const double gap = avg - p->energy(mid);
            CHECK(gap >= -1e-14 * std::max(1.0, std::abs(avg)));
            strict += gap > 0;
        }
        CHECK(strict == 100);
    }
}

TEST_CASE("deep negative fields see only the Laplacian") {
    SUBCASE("scalar") {
        auto g = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
        const auto p = build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                     periodic_background(g, test::vortices({{1, 1}}), default_sigma(*g)));
        const std::vector<double> v(g->size(), -45.0);
        std::vector<double> w(g->size());
        for (int j = 0; j < g->ny(); ++j)
            for (int i = 0; i < g->nx(); ++i) w[g->index(i, j)] = std::cos(2 * g->x(i) + 3 * g->y(j));
        const auto hw = hessian_vector(*p, v, w);
        for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(hw[k] - 13.0 * w[k]) < 1e-10);
    }
    SUBCASE("system") {
        auto g = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 32, 32);
        const auto m = test::signed_system();
        const auto p = build_problem(ProblemClass::system_periodic, m,
                                     periodic_composite_fields(m, test::vortices({{3, 3}}), VortexSet{}, g,
                                                               default_sigma(*g)));
        const std::size_t n = g->size();
        std::vector<double> v(2 * n, 0.0), w(2 * n);
        for (std::size_t k = 0; k < n; ++k) v[k] = -45.0;
        for (int j = 0; j < g->ny(); ++j)
            for (int i = 0; i < g->nx(); ++i) {
                w[g->index(i, j)] = std::sin(g->x(i));
                w[n + g->index(i, j)] = std::cos(0.5 * g->y(j));
            }
        const auto hw = hessian_vector(*p, v, w);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(hw[k] - w[k] / m.lambda1) < 1e-10);
            CHECK(std::abs(hw[n + k] - 0.25 * w[n + k] / m.lambda2) < 1e-10);
        }
    }
}

TEST_CASE("vacuum without vortices is a critical point") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
    const auto ps = build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                  periodic_background(g, VortexSet{}, default_sigma(*g)));
    for (double x : gradient(*ps, std::vector<double>(g->size(), 0.0))) CHECK(std::abs(x) < 1e-14);

    auto box = Grid::planar(5.0, 31, 31);
    const auto m = test::signed_system();
    const auto pp = build_problem(ProblemClass::system_planar, m, composite_fields(m, {}, {}, 1.0, box));
    for (double x : gradient(*pp, std::vector<double>(2 * box->size(), 0.0))) CHECK(std::abs(x) < 1e-14);

    const auto sp = build_problem(ProblemClass::scalar_planar, test::unit_scalar(),
                                  planar_background(test::vortices({{0.5, 0}}), 1.0, box));
    CHECK(sp->energy(std::vector<double>(box->size(), 0.0)) == 0.0);
}

TEST_CASE("energy at zero by independent quadrature") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 64, 64);
    ScalarModel m;
    m.lambda = 1.3;
    m.m = 2;
    m.n = 1;
    m.a2 = 0.2;
    m.b2 = 0.4;
    m.xi = 1.0;
    const auto bg = periodic_background(g, test::vortices({{1, 2}, {3, 3}}), default_sigma(*g));
    const auto p = build_problem(ProblemClass::scalar_periodic, m, bg);
    double expected = 0;
    for (std::size_t k = 0; k < g->size(); ++k)
        expected += m.lambda * (m.a2 * std::exp(m.m * bg.u0[k]) + m.b2 * std::exp(m.n * bg.u0[k])) * g->cell();
    CHECK(p->energy(std::vector<double>(g->size(), 0.0)) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("constant shift of the first field") {
    auto g = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 64, 64);
    const auto m = test::signed_system();
    const VortexSet v1 = test::vortices({{3, 3}, {8, 7}}), v2 = test::vortices({{3, 3}});
    const auto bg = periodic_composite_fields(m, v1, v2, g, default_sigma(*g));
    const auto p = build_problem(ProblemClass::system_periodic, m, bg);
    const std::size_t n = g->size();
    auto v = test::smooth_random(g, 2, 5, 0.5);
    const double c = 0.3;
    auto shifted = v;
    for (std::size_t k = 0; k < n; ++k) shifted[k] += c;

    const double eta1 = m.xi1 - 4 * kPi * v1.total() / (g->area() * m.lambda1);
    double change = -eta1 * c * g->area();
    for (std::size_t k = 0; k < n; ++k) {
        const double u1 = bg.u0_1[k] + v[k], u2 = bg.u0_2[k] + v[n + k];
        change += g->cell() * (m.a2 * (std::exp(m.m * (u1 + c)) - std::exp(m.m * u1)) +
                               m.b2 * std::exp(u1 + u2) * std::expm1(c) + m.c2 * std::exp(u1 - u2) * std::expm1(c));
    }
    CHECK(p->energy(shifted) - p->energy(v) == doctest::Approx(change).epsilon(1e-10));
}

TEST_CASE("periodic energies are translation covariant") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 64, 64);
    const double h = g->hx();
    const int di = 5, dj = 11;
    const auto shift = [&](Point p) { return Point{p.x + di * h, p.y + dj * h}; };

    const auto base = test::vortices({{1, 2}, {4, 4.5}});
    VortexSet moved;
    for (const auto& e : base.entries()) moved.add(shift(e.point), e.multiplicity);
    const auto p0 = build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                  periodic_background(g, base, default_sigma(*g)));
    const auto p1 = build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                  periodic_background(g, moved, default_sigma(*g)));
    const auto v = test::smooth_random(g, 1, 9, 0.7);
    const double e0 = p0->energy(v), e1 = p1->energy(cyclic_shift(*g, v, di, dj));
    CHECK(std::abs(e0 - e1) <= 1e-10 * std::max(1.0, std::abs(e0)));

    auto g2 = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 64, 64);
    const double h2 = g2->hx();
    const auto m = test::signed_system();
    const auto a1 = test::vortices({{3, 3}, {8, 7}}), a2 = test::vortices({{3, 3}});
    VortexSet b1, b2;
    for (const auto& e : a1.entries()) b1.add({e.point.x + di * h2, e.point.y + dj * h2}, e.multiplicity);
    for (const auto& e : a2.entries()) b2.add({e.point.x + di * h2, e.point.y + dj * h2}, e.multiplicity);
    const auto q0 = build_problem(ProblemClass::system_periodic, m,
                                  periodic_composite_fields(m, a1, a2, g2, default_sigma(*g2)));
    const auto q1 = build_problem(ProblemClass::system_periodic, m,
                                  periodic_composite_fields(m, b1, b2, g2, default_sigma(*g2)));
    const auto w = test::smooth_random(g2, 2, 10, 0.7);
    const double f0 = q0->energy(w), f1 = q1->energy(cyclic_shift(*g2, w, di, dj));
    CHECK(std::abs(f0 - f1) <= 1e-10 * std::max(1.0, std::abs(f0)));
}

TEST_CASE("build_problem preconditions") {
    auto torus = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
    auto box = Grid::planar(5.0, 31, 31);
    const auto sigma = default_sigma(*torus);

    VortexSet four;
    for (int i = 0; i < 4; ++i) four.add({0.5 + i, 1.0});
    CHECK_THROWS_AS(build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                  periodic_background(torus, four, sigma)),
                    FeasibilityError);
    CHECK_THROWS_AS(build_problem(ProblemClass::scalar_planar, test::unit_scalar(),
                                  periodic_background(torus, {}, sigma)),
                    ConfigError);

    ScalarModel off = test::unit_scalar();
    off.xi = 2.0;
    CHECK_THROWS_AS(build_problem(ProblemClass::scalar_planar, off, planar_background({}, 1.0, box)), ConfigError);

    SystemModel b_only;
    b_only.a2 = 0;
    b_only.b2 = 1;
    b_only.c2 = 0;
    b_only.xi1 = 1;
    b_only.xi2 = 1;
    CHECK_THROWS_AS(build_problem(ProblemClass::system_planar, b_only, composite_fields(b_only, {}, {}, 1.0, box)),
                    ConfigError);
}

TEST_CASE("large exponents are inadmissible") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
    const auto p = build_problem(ProblemClass::scalar_periodic, test::unit_scalar(),
                                 periodic_background(g, test::vortices({{1, 1}}), default_sigma(*g)));
    std::vector<double> v(g->size(), 0.0);
    CHECK(p->admissible(v));
    v[7] = 60.0;
    CHECK(p->max_exponent(v) > kExponentClamp);
    CHECK_FALSE(p->admissible(v));
    CHECK(std::isfinite(p->energy(v)));
}

}
