#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "ratiodyn/cycles.hpp"

using namespace ratiodyn;

namespace {

const parameters set1{0.2, 1.7, -2.0, 1.1};
const parameters set2{0.1, 1.79, -2.0, 1.0};

void expect_rel(double got, double want, double tol) { EXPECT_NEAR(got, want, tol * std::abs(want)); }

} // namespace

TEST(CyclePoly, Set1HasFourSimplePositiveRootsAndTheDoublingPoint) {
    const auto poly = two_cycle_poly(set1);
    EXPECT_EQ(poly.degree(), 6);
    const auto roots = real_roots_in(poly, 0.0, INFINITY, 1e-13);
    int simple = 0;
    for (const auto& r : roots) {
        if (r.simple) {
            ++simple;
        } else {
            EXPECT_NEAR(r.value, 1.0, 1e-4); // the neutral equilibrium is a double root
        }
    }
    EXPECT_EQ(simple, 4);
}

TEST(CyclePoly, Set2HasSixPositiveRoots) {
    const auto roots = real_roots_in(two_cycle_poly(set2), 0.0, INFINITY, 1e-13);
    EXPECT_EQ(roots.size(), 6u);
    for (const auto& r : roots) {
        EXPECT_TRUE(r.simple);
        EXPECT_NEAR(oracle::phi(set2, oracle::phi(set2, r.value)), r.value, 1e-8 * std::max(1.0, r.value));
    }
}

TEST(FindCycles, Set1) {
    const auto c = find_two_cycles(set1);
    ASSERT_EQ(c.size(), 2u);
    expect_rel(c[0].p, 0.2262, 1e-3);
    expect_rel(c[0].q, 63.6517, 1e-3);
    expect_rel(c[1].p, 0.5110, 1e-3);
    expect_rel(c[1].q, 4.1111, 1e-3);
    EXPECT_FALSE(unit_product_cycle(set1).has_value());
}

TEST(FindCycles, Set2) {
    const auto c = find_two_cycles(set2);
    ASSERT_EQ(c.size(), 3u);
    expect_rel(c[0].p, 0.1024, 1e-3);
    expect_rel(c[0].q, 759.2585, 1e-3);
    expect_rel(c[1].p, 0.6021, 1e-3);
    expect_rel(c[1].q, 2.1370, 1e-3);
    expect_rel(c[2].p, 0.7298, 1e-3);
    expect_rel(c[2].q, 1.3702, 1e-3);
    EXPECT_TRUE(c[2].unit_product);
    EXPECT_FALSE(c[0].unit_product);
    EXPECT_FALSE(c[1].unit_product);
}

TEST(FindCycles, PointsArePeriodicUnderIteration) {
    for (const auto& prm : {set1, set2}) {
        for (const auto& c : find_two_cycles(prm)) {
            double t = c.p;
            for (int k = 1; k <= 3; ++k) {
                t = oracle::phi(prm, oracle::phi(prm, t));
                EXPECT_NEAR(t, c.p, 1e-8 * std::max(1.0, c.p));
            }
            EXPECT_NEAR(oracle::phi(prm, c.p), c.q, 1e-8 * std::max(1.0, c.q));
            EXPECT_NEAR(c.multiplier, oracle::phi_prime(prm, c.p) * oracle::phi_prime(prm, c.q), 1e-9 * std::max(1.0, std::abs(c.multiplier)));
        }
    }
}

TEST(FindCycles, MatchPeriodTwoSignScan) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(0.05, 3.0), any(-3.0, 3.0);
    for (int i = 0; i < 60; ++i) {
        const parameters prm{pos(rng), pos(rng), any(rng), pos(rng)};
        std::vector<two_cycle> cyc;
        try {
            cyc = find_two_cycles(prm);
        } catch (const numerical_error&) {
            continue;
        }
        // every located point is genuinely period 2
        for (const auto& c : cyc) {
            EXPECT_TRUE(is_two_cycle(prm, c.p, c.q, 1e-8)) << prm.a << " " << prm.b << " " << prm.c << " " << prm.d;
            EXPECT_LT(c.p, c.q);
        }
        // every period-2 sign change of phi^2 - t away from fixed points on a
        // moderate window is accounted for, unless its partner is negative
        auto g = [&](double t) { return oracle::phi(prm, oracle::phi(prm, t)) - t; };
        auto scan = oracle::sign_scan_roots(g, 0.05, 20.0, 40000);
        for (double s : scan) {
            if (std::abs(oracle::phi(prm, s) - s) <= 1e-6 * std::max(1.0, s)) continue;
            if (!std::isfinite(oracle::phi(prm, s)) || std::abs(oracle::phi(prm, oracle::phi(prm, s))) > 1e6) continue;
            if (oracle::phi(prm, s) <= 0.0) continue;
            bool found = false;
            for (const auto& c : cyc)
                found = found || std::abs(c.p - s) <= 1e-6 * std::max(1.0, s) || std::abs(c.q - s) <= 1e-6 * std::max(1.0, s);
            EXPECT_TRUE(found) << "missing period-2 point " << s;
        }
    }
}

TEST(UnitCycle, Set2) {
    const auto u = unit_product_cycle(set2);
    ASSERT_TRUE(u.has_value());
    EXPECT_TRUE(u->analytic);
    EXPECT_NEAR(u->p * u->q, 1.0, 1e-12);
    expect_rel(u->p, 0.7298, 1e-3);
    expect_rel(u->q, 1.3702, 1e-3);
    EXPECT_GT(u->multiplier, 0.0);
    EXPECT_LT(u->multiplier, 1.0);
}

TEST(UnitCycle, AbsentOnBoundaryAndWhenConditionsDisagree) {
    // (a-c)/d = (d-b+1)/a = 2 exactly: a = 1, d = 1, c = -1, b = 0.5
    EXPECT_FALSE(unit_product_cycle({1.0, 0.5, -1.0, 1.0}).has_value());
    EXPECT_FALSE(unit_product_cycle({0.1, 1.79, -2.5, 1.0}).has_value());
}

TEST(UnitCycle, ConstructedInstancesRoundTrip) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    int made = 0;
    while (made < 100) {
        const double a = pos(rng), b = pos(rng), d = pos(rng);
        if (!((d - b + 1) / a > 2.05)) continue;
        ++made;
        const auto inst = oracle::unit_from(a, b, d);
        const auto u = unit_product_cycle(inst.prm);
        ASSERT_TRUE(u.has_value());
        EXPECT_NEAR(u->p, inst.p, 1e-12 * inst.q);
        EXPECT_NEAR(u->q, inst.q, 1e-12 * inst.q);
        EXPECT_NEAR(oracle::phi(inst.prm, u->p), u->q, 1e-9 * std::max(1.0, u->q));
        EXPECT_NEAR(oracle::phi(inst.prm, u->q), u->p, 1e-9);
    }
}

TEST(FindCycles, SkipsCyclesWithANegativePoint) {
    // the cycle polynomial has a positive root whose partner lies on the negative axis
    const auto inst = oracle::unit_from(0.8, 0.33, 2.75);
    const auto roots = oracle::sign_scan_roots(
        [&](double t) { return oracle::phi(inst.prm, oracle::phi(inst.prm, t)) - t; }, 0.01, 50.0, 400000);
    bool mixed = false;
    for (double r : roots) {
        const double image = oracle::phi(inst.prm, r);
        // sign changes across poles of phi(phi(t)) have a huge residual
        if (std::abs(oracle::phi(inst.prm, image) - r) <= 1e-6) mixed = mixed || image < 0.0;
    }
    ASSERT_TRUE(mixed);
    std::vector<two_cycle> cs;
    ASSERT_NO_THROW(cs = find_two_cycles(inst.prm));
    bool found = false;
    for (const auto& c : cs) {
        EXPECT_GT(c.p, 0.0);
        EXPECT_GT(c.q, 0.0);
        found = found || std::abs(c.p - inst.p) <= 1e-6 * inst.p;
    }
    EXPECT_TRUE(found);
}

TEST(FindCycles, ContainsConstructedUnitCycles) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    for (int made = 0; made < 100;) {
        const double a = pos(rng), b = pos(rng), d = pos(rng);
        if (!((d - b + 1) / a > 2.05)) continue;
        ++made;
        const auto inst = oracle::unit_from(a, b, d);
        const auto cs = find_two_cycles(inst.prm);
        const bool found = std::any_of(cs.begin(), cs.end(), [&](const two_cycle& c) {
            return std::abs(c.p - inst.p) <= 1e-6 * inst.p && std::abs(c.q - inst.q) <= 1e-6 * inst.q;
        });
        EXPECT_TRUE(found) << a << " " << b << " " << d;
    }
}

TEST(UnitCycle, SignsForSet2) {
    const auto u = *unit_product_cycle(set2);
    const auto s = unit_cycle_signs(set2, u);
    // closed forms from the oracle derivative
    EXPECT_NEAR(s.q_side, u.q + u.p * oracle::phi_prime(set2, u.p), 1e-12);
    EXPECT_NEAR(s.p_side, u.p + u.q * oracle::phi_prime(set2, u.q), 1e-12);
    // published rounded values
    EXPECT_NEAR(s.q_side, -1.291, 5e-3);
    EXPECT_NEAR(s.p_side, 0.388, 5e-3);
    EXPECT_LT(s.q_side * s.p_side, 0.0);

    const auto non_unit = find_two_cycles(set2)[0];
    EXPECT_THROW(unit_cycle_signs(set2, non_unit), std::invalid_argument);
}

TEST(UnitCycle, RecurrenceFamilyIsPeriodTwo) {
    const auto u = *unit_product_cycle(set2);
    for (double x : {1.0, u.p, 3.5}) {
        const auto [xm1, x0] = recurrence_cycle_through(u, x);
        const auto o = oracle::iterate_direct(set2, xm1, x0, 50);
        for (std::size_t k = 2; k < o.size(); ++k) EXPECT_NEAR(o.raw(k), o.raw(k - 2), 1e-6 * std::max(1.0, std::abs(o.raw(k))));
        EXPECT_NE(o.raw(0), o.raw(1));
    }
    const auto [one, partner] = recurrence_cycle_through(u, 1.0);
    EXPECT_EQ(one, 1.0);
    EXPECT_NEAR(partner, 1.3702, 1e-4);
    EXPECT_THROW(recurrence_cycle_through(u, 0.0), std::invalid_argument);
    EXPECT_THROW(recurrence_cycle_through(find_two_cycles(set2)[0], 1.0), std::invalid_argument);
}
