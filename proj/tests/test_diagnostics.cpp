#include <doctest.h>

#include "support.hpp"

using namespace vortex;
using vortex::test::kPi;
using vortex::test::kTwoPi;

namespace {

const Residual* find(const std::vector<Residual>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name) return &r;
    return nullptr;
}

const SignCheck* find_sign(const std::vector<SignCheck>& ss, const std::string& name) {
    for (const auto& s : ss)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("identities of a periodic system solve") {
    auto g = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 128, 128);
    auto m = test::signed_system();
    m.lambda2 = 3.0;
    const auto s = solve_system_periodic(m, test::vortices({{3, 3}, {8, 7}}), test::vortices({{3, 3}}), g);
    const auto& rs = s.diagnostics.residuals;
    const auto* q1 = find(rs, "sum_identity");
    const auto* q2 = find(rs, "difference_identity");
    REQUIRE(q1);
    REQUIRE(q2);
    CHECK(q1->rhs == doctest::Approx(4 * kPi * (2 / m.lambda1 + 1 / m.lambda2)));
    CHECK(q2->rhs == doctest::Approx(4 * kPi * (2 / m.lambda1 - 1 / m.lambda2)));
    REQUIRE(find(rs, "flux_first"));
    CHECK(find(rs, "flux_first")->rhs == doctest::Approx(-8 * kPi / m.lambda1));
    REQUIRE(find(rs, "constraint_sum"));
    for (const auto& r : rs) {
        CAPTURE(r.name);
        CHECK(r.pass);
        CHECK(r.rel_error < 1e-8);
    }

    // On the vacuum manifold the identities are sums and differences of the flux forms.
    const double f1 = find(rs, "flux_first")->value, f2 = find(rs, "flux_second")->value;
    CHECK(q1->value == doctest::Approx(-(f1 + f2)).epsilon(1e-12));
    CHECK(q2->value == doctest::Approx(-(f1 - f2)).epsilon(1e-12));

    for (const auto& sc : s.diagnostics.signs) {
        CAPTURE(sc.name);
        CHECK(sc.guaranteed);
        CHECK(sc.max < 0);
    }
}

TEST_CASE("no vortices means exact identities") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
    const auto s = solve_scalar_periodic(test::unit_scalar(), {}, g);
    for (const auto& r : s.diagnostics.residuals) {
        CHECK(r.rhs == 0.0);
        CHECK(std::abs(r.value) < 1e-12);
        CHECK(r.pass);
    }
    auto box = Grid::planar(5.0, 31, 31);
    const auto p = solve_scalar_planar(test::unit_scalar(), {}, box, 1.0);
    CHECK_FALSE(p.diagnostics.decay.has_value());
    CHECK_FALSE(decay_fit(p).has_value());
}

TEST_CASE("sign guarantees decide what is asserted") {
    auto g = Grid::periodic(2 * kTwoPi, 2 * kTwoPi, 64, 64);
    SystemModel m = test::signed_system();
    m.lambda2 = m.lambda1;  // no guarantee
    const auto s = solve_system_periodic(m, test::vortices({{3, 3}, {8, 7}}), test::vortices({{3, 3}}), g);
    for (const auto& sc : s.diagnostics.signs) {
        CHECK_FALSE(sc.guaranteed);
        CHECK(sc.pass);
    }
    CHECK_FALSE(find(s.diagnostics.residuals, "sum_identity"));
    REQUIRE(find(s.diagnostics.residuals, "flux_first"));
    CHECK(find(s.diagnostics.residuals, "flux_first")->note == "fallback");
    CHECK_FALSE(s.diagnostics.skipped.empty());

    // A forced guarantee against a positive maximum fails.
    SignGuarantees all;
    all.weighted_negative = all.sum_difference_negative = true;
    Solution bad = s;
    bad.u[0] += Field(g, 1.0);
    const auto checks = sign_check(bad, all);
    REQUIRE(find_sign(checks, "u1"));
    CHECK_FALSE(find_sign(checks, "u1")->pass);
}

TEST_CASE("interpolation and ring averages") {
    auto box = Grid::planar(4.0, 31, 31);
    Field f(box);
    for (int j = 0; j < box->ny(); ++j)
        for (int i = 0; i < box->nx(); ++i) f.at(i, j) = 2 * box->x(i) - 3 * box->y(j) + 1;
    CHECK(*interpolate(f, {0.13, -1.71}) == doctest::Approx(2 * 0.13 + 3 * 1.71 + 1));
    CHECK_FALSE(interpolate(f, {3.9, 0}).has_value());
    CHECK(*ring_average(f, {0.5, 0.5}, 2.0) == doctest::Approx(2 * 0.5 - 3 * 0.5 + 1).epsilon(1e-12));
    CHECK_FALSE(ring_average(f, {0, 0}, 10.0).has_value());

    auto torus = Grid::periodic(kTwoPi, kTwoPi, 32, 32);
    Field c(torus, 2.5);
    CHECK(*interpolate(c, {-1.0, 100.0}) == doctest::Approx(2.5));
    CHECK(*ring_average(c, {6.0, 6.0}, 2.0) == doctest::Approx(2.5));
}

TEST_CASE("log growth coefficient") {
    SystemModel m;
    m.lambda1 = 1;
    m.lambda2 = 2;
    CHECK(expected_log_growth(m, Regime::b_only, 2, 1) == doctest::Approx(2.0));
    CHECK(expected_log_growth(m, Regime::c_only, 2, 1) == doctest::Approx(2 * 2.0 / 3.0 * 2.5));
}

TEST_CASE("uniqueness probe") {
    auto g = Grid::periodic(kTwoPi, kTwoPi, 64, 64);
    const auto vs = test::vortices({{1, 1}, {4, 4}});
    const auto pipeline = [&](const SolverOptions& o) { return solve_scalar_periodic(test::unit_scalar(), vs, g, o); };
    CHECK(uniqueness_probe(pipeline, SolverOptions{}, 2, 5) <= kUniquenessTolerance);
    CHECK(uniqueness_probe(pipeline, SolverOptions{}, 3, 5) <= kUniquenessTolerance);
    CHECK_THROWS_AS(uniqueness_probe(pipeline, SolverOptions{}, 1, 5), ConfigError);

    VortexSet four;
    for (int i = 0; i < 4; ++i) four.add({0.5 + i, 1.0});
    int calls = 0;
    const auto infeasible = [&](const SolverOptions& o) {
        ++calls;
        return solve_scalar_periodic(test::unit_scalar(), four, g, o);
    };
    CHECK_THROWS_AS(uniqueness_probe(infeasible, SolverOptions{}, 5, 1), FeasibilityError);
    CHECK(calls == 1);
}

TEST_CASE("planar scalar diagnostics") {
    auto box = Grid::planar(16.0, 255, 255);
    const auto s = solve_scalar_planar(test::unit_scalar(), test::vortices({{0, 0}}), box, 1.0);
    REQUIRE(s.diagnostics.decay.has_value());
    const auto& d = *s.diagnostics.decay;
    CHECK(d.pass);
    CHECK(d.rate == doctest::Approx(1.0).epsilon(0.2));
    CHECK(d.window_min == doctest::Approx(16.0 / 3));
    REQUIRE(find(s.diagnostics.residuals, "l1_identity"));
    CHECK(find(s.diagnostics.residuals, "l1_identity")->rel_error < 0.02);
    REQUIRE(s.diagnostics.pde_residual.has_value());
    CHECK(*s.diagnostics.pde_residual < 0.2);
    CHECK_FALSE(log_growth_fit(s).has_value());
}

}
