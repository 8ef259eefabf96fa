#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "criteria.hpp"
#include "cycles.hpp"
#include "ratio_map.hpp"
#include "simulator.hpp"

namespace ratiodyn {

/// Two published parameter sets with known equilibria, 2-cycles and fates.
inline constexpr parameters reference_set_1{0.2, 1.7, -2.0, 1.1};
inline constexpr parameters reference_set_2{0.1, 1.79, -2.0, 1.0};

struct check_result {
    std::string name;
    bool passed;
    std::string detail;
};

namespace detail {

inline bool rel_close(double x, double ref, double tol) { return std::abs(x - ref) <= tol * std::abs(ref); }

inline bool cycles_match(const std::vector<two_cycle>& got, const std::vector<std::pair<double, double>>& want,
                         double tol) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (!rel_close(got[i].p, want[i].first, tol) || !rel_close(got[i].q, want[i].second, tol)) return false;
    return true;
}

inline std::string describe(const verdict& v) {
    std::string s = std::string(to_string(v.cls)) + " via " + v.rule;
    if (v.oracle) s += ", oracle " + std::string(to_string(*v.oracle));
    return s;
}

inline double max_log10(const parameters& prm, double xm1, double x0, std::size_t steps) {
    const auto tr = iterate_solution(prm, xm1, x0, steps);
    double m = -std::numeric_limits<double>::infinity();
    for (double l : tr.log10_abs) m = std::max(m, l);
    return m;
}

} // namespace detail

/// Reproduces the published equilibria, 2-cycles and verdicts for both
/// reference parameter sets. `seed` drives the random initial ratios.
inline std::vector<check_result> run_reference_checks(std::uint64_t seed = 1) {
    std::vector<check_result> out;
    auto add = [&](std::string name, bool ok, std::string detail) { out.push_back({std::move(name), ok, std::move(detail)}); };
    std::ostringstream os;
    os.precision(10);

    // first set: t = 1 is the only equilibrium and it is neutral
    {
        const auto& prm = reference_set_1;
        const auto eqs = equilibria(prm);
        add("set1.equilibrium", eqs.size() == 1 && std::abs(eqs[0].value - 1.0) <= 1e-6,
            eqs.empty() ? "none" : "t = " + std::to_string(eqs[0].value));
        const auto cyc = find_two_cycles(prm);
        add("set1.two_cycles", detail::cycles_match(cyc, {{0.2262, 63.6517}, {0.5110, 4.1111}}, 1e-3),
            std::to_string(cyc.size()) + " cycles");
        add("set1.sigma", std::abs(sigma(prm) - 1.0) <= 1e-12, "b+2c+3d = " + std::to_string(sigma(prm)));
        add("set1.R_second", std::abs(R_second_at_1(prm) - 3.62) <= 1e-12, "R''(1) = " + std::to_string(R_second_at_1(prm)));
        add("set1.R_second_positive", R_second_at_1(prm) > 0.0, "R''(1) = " + std::to_string(R_second_at_1(prm)));

        const auto v = classify(prm, 1.0, 1.5);
        add("set1.classify(1,1.5)", v.cls == asymptotic_class::diverges_to_infinity && v.rule == "T1.c3",
            detail::describe(v));
        bool all_ok = true;
        double worst_log = std::numeric_limits<double>::infinity();
        if (cyc.size() == 2) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> pick(cyc[1].p, cyc[1].q);
            for (int i = 0; i < 20; ++i) {
                double t0 = pick(rng);
                if (std::abs(t0 - 1.0) < 1e-9) t0 += 1e-3;
                const auto vi = classify(prm, 1.0, t0, {.run_oracle = false});
                all_ok = all_ok && vi.cls == asymptotic_class::diverges_to_infinity && vi.rule == "T1.c3";
                worst_log = std::min(worst_log, detail::max_log10(prm, 1.0, t0, 100000));
            }
        } else {
            all_ok = false;
        }
        add("set1.classify(random t0)", all_ok, "20 seeds in (p2, q2)");
        const double l15 = detail::max_log10(prm, 1.0, 1.5, 100000);
        add("set1.oracle_divergence", l15 > 12.0 && worst_log > 12.0,
            "smallest per-orbit max log10|x_n| within 1e5 steps: " + std::to_string(std::min(l15, worst_log)));
    }

    // second set: unit-product cycle (p3, q3) attracts the middle band
    {
        const auto& prm = reference_set_2;
        const auto eqs = equilibria(prm);
        add("set2.equilibrium", eqs.size() == 1 && std::abs(eqs[0].value - 0.9423) <= 1e-3,
            eqs.empty() ? "none" : "t = " + std::to_string(eqs[0].value));
        const auto cyc = find_two_cycles(prm);
        add("set2.two_cycles",
            detail::cycles_match(cyc, {{0.1024, 759.2585}, {0.6021, 2.1370}, {0.7298, 1.3702}}, 1e-3),
            std::to_string(cyc.size()) + " cycles");
        const auto unit = unit_product_cycle(prm);
        const bool unit_ok = unit && std::abs(unit->p * unit->q - 1.0) <= 1e-9 &&
                             std::abs((prm.a - prm.c) / prm.d - 2.1) <= 1e-12 && detail::rel_close(unit->p, 0.7298, 1e-3) &&
                             detail::rel_close(unit->q, 1.3702, 1e-3);
        add("set2.unit_product_cycle", unit_ok, unit ? "pq - 1 = " + std::to_string(unit->p * unit->q - 1.0) : "absent");
        add("set2.multiplier", unit && unit->multiplier > 0.0 && unit->multiplier < 1.0,
            unit ? "mu = " + std::to_string(unit->multiplier) : "absent");
        for (double t0 : {0.7, 1.0, 2.0}) {
            const auto v = classify(prm, 1.0, t0);
            add("set2.classify(t0=" + std::to_string(t0).substr(0, 3) + ")",
                v.cls == asymptotic_class::converges_to_two_cycle && v.rule == "T2.c1" && v.oracle_agrees(),
                detail::describe(v));
        }
        for (double t0 : {0.3, 3.0}) {
            const auto v = classify(prm, 1.0, t0);
            add("set2.classify(t0=" + std::to_string(t0).substr(0, 3) + ")",
                v.cls == asymptotic_class::diverges_to_infinity && v.rule == "T2.a" && v.oracle_agrees(),
                detail::describe(v));
        }
    }
    return out;
}

} // namespace ratiodyn
