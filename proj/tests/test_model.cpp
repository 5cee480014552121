#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace vortex;
using vortex::test::kPi;

namespace {

SystemModel constants(double a2, double b2, double c2) {
    SystemModel m;
    m.a2 = a2;
    m.b2 = b2;
    m.c2 = c2;
    return m;
}

bool has(const FeasibilityVerdict& v, const std::string& id) {
    return std::find(v.violated.begin(), v.violated.end(), id) != v.violated.end();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("regime classification") {
    CHECK(classify_regime(constants(1, 0.5, 0.25)) == Regime::full);
    CHECK(classify_regime(constants(1, 0.5, 0)) == Regime::ab);
    CHECK(classify_regime(constants(1, 0, 0.5)) == Regime::ac);
    CHECK(classify_regime(constants(0, 0.5, 0)) == Regime::b_only);
    CHECK(classify_regime(constants(0, 0, 0.5)) == Regime::c_only);
    CHECK(classify_regime(constants(2, 0, 0)) == Regime::a_only);
    CHECK(classify_regime(constants(0, 0, 0)) == Regime::none);
    CHECK(classify_regime(constants(0, 0.5, 0.5)) == Regime::full);

    // The zero threshold is relative to the largest constant.
    CHECK(classify_regime(constants(1e6, 0.5, 1e-7)) == Regime::ab);
    CHECK(classify_regime(constants(1, 0.5, 1e-11)) == Regime::full);
    CHECK(is_zero_coefficient(1e-13, constants(1, 0, 0)));
    CHECK_FALSE(is_zero_coefficient(1e-11, constants(1, 0, 0)));
}

TEST_CASE("scalar feasibility on the torus") {
    ScalarModel m;
    const double area = 4 * kPi * kPi;
    auto v3 = feasibility_scalar_periodic(m, 3, area);
    CHECK(v3.feasible);
    CHECK(v3.slacks.at("eta") == doctest::Approx(area - 12 * kPi));
    auto v4 = feasibility_scalar_periodic(m, 4, area);
    CHECK_FALSE(v4.feasible);
    CHECK(has(v4, "vortex_bound"));
    REQUIRE(v4.messages.size() == 1);
    CHECK(v4.messages[0].find("50.26") != std::string::npos);

    ScalarModel w;
    w.lambda = 2.0;
    w.xi = 0.5;
    CHECK(feasibility_scalar_periodic(w, 2, 16 * kPi).feasible);

    // Near-critical flagging just inside the boundary; rejection at zero slack.
    ScalarModel c;
    const double critical_area = 4 * kPi * 3;
    CHECK(feasibility_scalar_periodic(c, 3, critical_area * (1 + 1e-9)).near_critical);
    CHECK_FALSE(feasibility_scalar_periodic(c, 3, critical_area).feasible);
}

TEST_CASE("feasibility is monotone in the vortex number") {
    ScalarModel m;
    const double area = 4 * kPi * kPi;
    bool seen_infeasible = false;
    for (int n = 0; n < 12; ++n) {
        const bool ok = feasibility_scalar_periodic(m, n, area).feasible;
        if (seen_infeasible) CHECK_FALSE(ok);
        seen_infeasible = seen_infeasible || !ok;
    }
    SystemModel s = constants(0.1, 1.0, 0.5);
    s.xi1 = 2;
    s.xi2 = 1;
    seen_infeasible = false;
    for (int n1 = 0; n1 < 20; ++n1) {
        const bool ok = feasibility_system_periodic(s, n1, 1, area, Regime::full).feasible;
        if (seen_infeasible) CHECK_FALSE(ok);
        seen_infeasible = seen_infeasible || !ok;
    }
}

TEST_CASE("system feasibility examples") {
    SystemModel m = constants(0.1, 1.0, 0.5);
    m.xi1 = 2.0;
    m.xi2 = 1.0;
    const double area = 4 * kPi * kPi;
    auto ok = feasibility_system_periodic(m, 2, 1, area, Regime::full);
    CHECK(ok.feasible);
    CHECK(ok.slacks.count("eta1") == 1);
    CHECK(ok.slacks.count("eta2") == 1);
    auto bad = feasibility_system_periodic(m, 10, 1, area, Regime::full);
    CHECK_FALSE(bad.feasible);
    CHECK(has(bad, "sum_bound"));
    CHECK(has(bad, "difference_bound"));

    SystemModel b = constants(0, 1, 0);
    b.xi1 = 1;
    b.xi2 = 1;
    CHECK(feasibility_system_periodic(b, 1, 1, area, Regime::b_only).feasible);
    auto unbalanced = feasibility_system_periodic(b, 2, 1, area, Regime::b_only);
    CHECK_FALSE(unbalanced.feasible);
    CHECK(has(unbalanced, "difference_balance"));

    CHECK_THROWS_AS(feasibility_system_periodic(m, 1, 1, area, Regime::none), ConfigError);
}

TEST_CASE("slacks are the natural constraint values") {
    SystemModel m = constants(0.1, 1.0, 0.5);
    m.lambda1 = 1.5;
    m.lambda2 = 2.5;
    m.xi1 = 2.0;
    m.xi2 = 0.7;
    const double area = 30.0;
    const int n1 = 3, n2 = 2;
    auto v = feasibility_system_periodic(m, n1, n2, area, Regime::full);
    const double eta1 = 0.5 * (m.xi1 + m.xi2) * area - 2 * kPi * (n1 / m.lambda1 + n2 / m.lambda2);
    const double eta2 = 0.5 * (m.xi1 - m.xi2) * area - 2 * kPi * (n1 / m.lambda1 - n2 / m.lambda2);
    CHECK(v.slacks.at("eta1") == doctest::Approx(eta1).epsilon(1e-14));
    CHECK(v.slacks.at("eta2") == doctest::Approx(eta2).epsilon(1e-14));
}

TEST_CASE("second-field sign flip swaps the degenerate condition pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.3, 3.0), xi(0.1, 3.0), cnt(0.0, 6.0), area(5.0, 60.0);
    const std::map<std::string, std::string> ab_to_ac = {{"difference_bound", "sum_bound"},
                                                         {"second_bound", "second_excess"}};
    for (int trial = 0; trial < 500; ++trial) {
        SystemModel m;
        m.lambda1 = lam(rng);
        m.lambda2 = lam(rng);
        m.xi1 = xi(rng);
        m.xi2 = xi(rng) - 1.5;
        const double n1 = std::floor(cnt(rng)), n2 = std::floor(cnt(rng)), a = area(rng);
        SystemModel flipped = m;
        flipped.xi2 = -m.xi2;

        const auto ab = feasibility_system_periodic(m, n1, n2, a, Regime::ab);
        const auto ac = feasibility_system_periodic(flipped, n1, -n2, a, Regime::ac);
        CHECK(ab.feasible == ac.feasible);
        for (const auto& id : ab.violated) CHECK(has(ac, ab_to_ac.at(id)));
        CHECK(ab.violated.size() == ac.violated.size());

        // Put the balance on the manifold for half of the trials.
        SystemModel bal = m;
        if (trial % 2 == 0) bal.xi2 = m.xi1 - 4 * kPi * (n1 / m.lambda1 - n2 / m.lambda2) / a;
        SystemModel bal_flipped = bal;
        bal_flipped.xi2 = -bal.xi2;
        const auto bo = feasibility_system_periodic(bal, n1, n2, a, Regime::b_only);
        const auto co = feasibility_system_periodic(bal_flipped, n1, -n2, a, Regime::c_only);
        CHECK(bo.feasible == co.feasible);
        CHECK(has(bo, "difference_balance") == has(co, "sum_balance"));
        CHECK(has(bo, "first_bound") == has(co, "first_bound"));
    }
}

TEST_CASE("sign guarantees") {
    SystemModel m = test::signed_system();
    auto g = guaranteed_sign_properties(m);
    CHECK(g.weighted_condition);
    CHECK(g.strong_condition);
    CHECK(g.weighted_negative);
    CHECK(g.sum_difference_negative);

    SystemModel n;
    n.m = 2;
    n.a2 = 1;
    n.b2 = 2;
    n.c2 = 1;
    n.lambda1 = 1;
    n.lambda2 = 1.5;
    n.xi1 = n.m * n.a2 + n.b2 + n.c2;
    n.xi2 = n.b2 - n.c2;
    g = guaranteed_sign_properties(n);
    CHECK_FALSE(g.weighted_negative);
    CHECK_FALSE(g.sum_difference_negative);

    SystemModel e = test::signed_system();
    e.lambda2 = e.lambda1;
    g = guaranteed_sign_properties(e);
    CHECK_FALSE(g.weighted_condition);
    CHECK_FALSE(g.strong_condition);

    // Off the vacuum manifold nothing is promised.
    SystemModel off = test::signed_system();
    off.xi1 += 0.5;
    CHECK_FALSE(guaranteed_sign_properties(off).weighted_negative);
}

TEST_CASE("vortex sets") {
    VortexSet s;
    s.add({1, 2});
    s.add({1, 2}, 2);
    s.add({3, 4});
    CHECK(s.size() == 2);
    CHECK(s.total() == 4);
    CHECK(s.entries()[0].multiplicity == 3);
    CHECK_THROWS_AS(s.add({0, 0}, 0), ConfigError);

    const VortexSet sub = test::vortices({{1, 2}});
    CHECK(VortexSet::contains(s, sub));
    CHECK(VortexSet::difference(s, sub).total() == 3);
    CHECK_FALSE(VortexSet::contains(sub, s));
    try {
        (void)VortexSet::difference(sub, test::vortices({{5, 5}}));
        FAIL("difference should throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
    CHECK(VortexSet::merged(s, sub).total() == 5);
    CHECK(VortexSet{}.total() == 0);
}

TEST_CASE("model validation") {
    ScalarModel m;
    CHECK_NOTHROW(m.validate());
    m.lambda = 0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = ScalarModel{};
    m.a2 = 0;
    m.b2 = 0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK(ScalarModel{}.on_vacuum());
    CHECK(ScalarModel{}.decay_rate() == doctest::Approx(1.0));

    SystemModel s = test::signed_system();
    CHECK(s.on_vacuum());
    s.xi2 = -3;  // the second vacuum value may have either sign
    CHECK_NOTHROW(s.validate());
    s.xi1 = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

}
