#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "criteria.hpp"
#include "cycles.hpp"
#include "errors.hpp"
#include "ratio_map.hpp"
#include "simulator.hpp"

namespace ratiodyn {

/// Outcome of classifying one solution. `rule` names the decision branch:
///   T1.a, T1.b, T1.S, T1.c1, T1.c2, T1.c3, T1.c   (ratio limit is an equilibrium)
///   T2.a, T2.b, T2.S, T2.c1, T2.c2, T2.c3, T2.c   (ratio limit is a 2-cycle)
///   R1                                            (invariant-interval criterion)
///   stop                                          (ratio hit zero)
///   oracle                                        (simulation only)
struct verdict {
    asymptotic_class cls = asymptotic_class::undetermined;
    std::string rule;
    std::optional<std::string> monotonic_structure;
    /// Set when the verdict rests on a hypothesis that cannot be checked here.
    bool conditional = false;
    std::string notes;
    /// Empirical class from the simulation oracle, when it was run.
    std::optional<asymptotic_class> oracle;

    bool definite() const {
        return !conditional && cls != asymptotic_class::undetermined && cls != asymptotic_class::hypothesis_violated;
    }
    bool oracle_agrees() const { return oracle && *oracle == cls; }
};

/// Band used when comparing an equilibrium or cycle product with 1.
inline constexpr double unit_band_analytic = 1e-9;
inline constexpr double unit_band_simulated = 1e-6;

namespace detail {
inline void append_note(verdict& v, const std::string& s) {
    if (!v.notes.empty()) v.notes += "; ";
    v.notes += s;
}
} // namespace detail

/// Decision tree for a ratio orbit converging to the equilibrium `eq`.
/// `evidence` is the eventual direction of {x_n}; only the sigma = -1
/// branch consults it.
inline verdict classify_equilibrium_limit(const parameters& prm, const equilibrium& eq,
                                          std::optional<direction> evidence = std::nullopt) {
    const double t = eq.value;
    if (!(t > 0.0) || std::abs(phi(prm, t) - t) > 1e-8 * std::max(1.0, t))
        throw std::invalid_argument("classify_equilibrium_limit: not an equilibrium of the ratio map");
    verdict v;
    if (t > 1.0 + unit_band_analytic) {
        v.cls = asymptotic_class::diverges_to_infinity;
        v.rule = "T1.a";
        return v;
    }
    if (t < 1.0 - unit_band_analytic) {
        v.cls = asymptotic_class::converges_to_zero;
        v.rule = "T1.b";
        return v;
    }
    if (std::abs(prm.a + prm.b + prm.c + prm.d - 1.0) > unit_band_analytic)
        throw std::invalid_argument("classify_equilibrium_limit: equilibrium 1 requires a + b + c + d = 1");

    const double s = sigma(prm);
    if (std::abs(s) < 1.0 - critical_band) {
        v.cls = asymptotic_class::converges_to_equilibrium;
        v.rule = "T1.c1";
        v.monotonic_structure = s > 0.0 ? "one of {x_2n}, {x_2n+1} eventually increasing, the other decreasing"
                                        : "{x_n} eventually monotone";
        return v;
    }
    if (std::abs(s + 1.0) <= critical_band) {
        v.rule = "T1.c2";
        if (evidence == direction::decreasing) {
            v.cls = asymptotic_class::converges_to_equilibrium;
            v.monotonic_structure = "{x_n} eventually decreasing";
        } else if (evidence == direction::increasing) {
            v.monotonic_structure = "{x_n} eventually increasing";
            if (prm.c > -3.0 * prm.d) {
                v.cls = asymptotic_class::diverges_to_infinity;
            } else {
                v.cls = asymptotic_class::undetermined;
                detail::append_note(v, "increasing with c <= -3d: outcome not covered");
            }
        } else {
            v.cls = asymptotic_class::undetermined;
            detail::append_note(v, "needs the eventual direction of {x_n}");
        }
        return v;
    }
    if (std::abs(s - 1.0) <= critical_band) {
        v.rule = "T1.c3";
        v.monotonic_structure = "{x_2n} and {x_2n+1} eventually increasing";
        if (R_second_at_1(prm) > 0.0) {
            v.cls = asymptotic_class::diverges_to_infinity;
        } else {
            v.cls = asymptotic_class::undetermined;
            detail::append_note(v, "R''(1) <= 0: divergence not established");
        }
        return v;
    }
    v.cls = asymptotic_class::hypothesis_violated;
    v.rule = "T1.c";
    detail::append_note(v, "|b+2c+3d| > 1: ratios cannot converge to 1 off its preimages");
    return v;
}

/// Decision tree for a ratio orbit converging to the 2-cycle `cyc`.
/// `evidence` is the common eventual direction of {x_2n} and {x_2n+1}; only
/// the multiplier = 1 branch consults it.
inline verdict classify_cycle_limit(const parameters& prm, const two_cycle& cyc,
                                    std::optional<direction> evidence = std::nullopt) {
    if (!is_two_cycle(prm, cyc.p, cyc.q, 1e-6))
        throw std::invalid_argument("classify_cycle_limit: (p, q) is not a 2-cycle of the ratio map");
    verdict v;
    const double band = cyc.analytic ? unit_band_analytic : unit_band_simulated;
    const double prod = cyc.p * cyc.q;
    if (prod > 1.0 + band) {
        v.cls = asymptotic_class::diverges_to_infinity;
        v.rule = "T2.a";
        return v;
    }
    if (prod < 1.0 - band) {
        v.cls = asymptotic_class::converges_to_zero;
        v.rule = "T2.b";
        return v;
    }
    const double mu = phi_prime(prm, cyc.p) * phi_prime(prm, cyc.q);
    const double mband = multiplier_band(cyc);
    two_cycle unit = cyc;
    unit.unit_product = true;
    if (std::abs(mu) < 1.0 - mband) {
        v.cls = asymptotic_class::converges_to_two_cycle;
        v.rule = "T2.c1";
        v.monotonic_structure = mu < 0.0 ? "{x_4n}, {x_4n+3} eventually monotone one way, {x_4n+1}, {x_4n+2} the other"
                                         : "{x_2n} and {x_2n+1} eventually monotone";
        return v;
    }
    if (std::abs(mu - 1.0) <= mband) {
        v.rule = "T2.c2";
        if (evidence == direction::decreasing) {
            v.cls = asymptotic_class::converges_to_two_cycle;
            v.monotonic_structure = "{x_2n} and {x_2n+1} eventually decreasing";
        } else if (evidence == direction::increasing) {
            v.monotonic_structure = "{x_2n} and {x_2n+1} eventually increasing";
            if (kappa(prm, unit) > 0.0) {
                v.cls = asymptotic_class::diverges_to_infinity;
            } else {
                v.cls = asymptotic_class::undetermined;
                detail::append_note(v, "kappa <= 0: divergence not established");
            }
        } else {
            v.cls = asymptotic_class::undetermined;
            detail::append_note(v, "needs the eventual direction of {x_2n}, {x_2n+1}");
        }
        return v;
    }
    if (std::abs(mu + 1.0) <= mband) {
        v.rule = "T2.c3";
        const double l = l_quantity(prm, unit);
        if (l < 0.0) {
            v.cls = asymptotic_class::converges_to_two_cycle;
            v.monotonic_structure = "{x_4n}, {x_4n+1}, {x_4n+2}, {x_4n+3} eventually decreasing";
        } else if (l > 0.0) {
            v.monotonic_structure = "{x_4n}, {x_4n+1}, {x_4n+2}, {x_4n+3} eventually increasing";
            double s2 = 0.0;
            try {
                s2 = S_second_at_q(prm, unit);
            } catch (const numerical_error& e) {
                detail::append_note(v, e.what());
            }
            if (s2 > 0.0) {
                v.cls = asymptotic_class::diverges_to_infinity;
            } else {
                v.cls = asymptotic_class::undetermined;
                detail::append_note(v, "S''(q) <= 0: divergence not established");
            }
        } else {
            v.cls = asymptotic_class::undetermined;
            detail::append_note(v, "l = 0");
        }
        return v;
    }
    v.cls = asymptotic_class::hypothesis_violated;
    v.rule = "T2.c";
    detail::append_note(v, "|phi'(p) phi'(q)| > 1: ratios cannot converge to this cycle off its preimages");
    return v;
}

/// Invariant-interval criterion for c < -sqrt(3bd) with every equilibrium
/// left of the local minimum x_min: phi(x_min) >= 1 gives divergence,
/// 0 < phi(x_min) <= phi^2(x_min) <= 1 decay to zero. Always conditional, since trapping in
/// [phi(x_min), phi^2(x_min)] is assumed rather than checked.
inline std::optional<verdict> classify_remark(const parameters& prm) {
    const auto cp = critical_points(prm);
    if (!cp) return std::nullopt;
    for (const auto& e : equilibria(prm))
        if (!(e.value < cp->x_min)) return std::nullopt;
    const double lo = phi(prm, cp->x_min);
    verdict v;
    v.rule = "R1";
    v.conditional = true;
    v.notes = "assumes the ratios are trapped in [phi(x_min), phi^2(x_min)]";
    if (lo >= 1.0) {
        v.cls = asymptotic_class::diverges_to_infinity;
        return v;
    }
    // the trapping interval only makes sense on the positive axis
    if (lo > 0.0 && phi(prm, lo) >= lo && phi(prm, lo) <= 1.0) {
        v.cls = asymptotic_class::converges_to_zero;
        return v;
    }
    return std::nullopt;
}

struct classify_options {
    std::size_t budget = 100000;
    std::size_t oracle_factor = 10;
    bool run_oracle = true;
    double tol = 1e-8;
    std::size_t window = 64;
};

/// The ratio limit that classify() identified, if any.
struct identified_limit {
    std::optional<equilibrium> eq;
    std::optional<two_cycle> cycle;
    bool slow = false;  // accepted by proximity, not by tail spread
    bool landed = false; // reached exactly in finitely many steps
};

namespace detail {

inline double rel_gap(double x, double v) { return std::abs(x - v) / std::max(1.0, std::abs(v)); }

inline double dist_to(const std::vector<double>& pts, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (double v : pts) d = std::min(d, rel_gap(x, v));
    return d;
}

// First step at which the orbit jumps onto one of `pts` (from at least 1e-6
// away to within 1e-12) and stays within 1e-9 for the following steps.
inline std::optional<std::size_t> landing_step(const std::vector<double>& orbit, const std::vector<double>& pts) {
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        if (dist_to(pts, orbit[k]) > 1e-12) continue;
        if (k > 0 && dist_to(pts, orbit[k - 1]) < 1e-6) return std::nullopt; // asymptotic approach
        const std::size_t end = std::min(orbit.size(), k + 65);
        for (std::size_t j = k; j < end; ++j)
            if (dist_to(pts, orbit[j]) > 1e-9) return std::nullopt;
        return k;
    }
    return std::nullopt;
}

// Slow (neutral) approach: the tail distance is small and still shrinking.
inline bool approaching(const std::vector<double>& orbit, const std::vector<double>& pts) {
    const std::size_t n = orbit.size();
    if (n < 64) return false;
    const std::size_t eighth = n / 8;
    auto max_dist = [&](std::size_t from, std::size_t to) {
        double m = 0.0;
        for (std::size_t k = from; k < to; ++k) m = std::max(m, dist_to(pts, orbit[k]));
        return m;
    };
    const double recent = max_dist(n - eighth, n);
    const double before = max_dist(n - 2 * eighth, n - eighth);
    return recent <= 1e-2 && recent < before;
}

} // namespace detail

/// Simulates the ratio orbit from x0/x_{-1}, identifies its limit among the
/// analytically located equilibria and 2-cycles, and applies the matching
/// decision tree. The simulation oracle is run with oracle_factor times the
/// budget and recorded in verdict::oracle.
inline verdict classify(const parameters& prm, double x_minus1, double x0, const classify_options& opt = {}) {
    validate(prm);
    if (x_minus1 == 0.0 || x0 == 0.0) throw std::invalid_argument("classify: initial values must be nonzero");
    if (opt.budget < 1) throw std::invalid_argument("classify: budget must be at least 1");

    verdict v;
    std::optional<asymptotic_class> oracle;
    if (opt.run_oracle) oracle = empirical_class(prm, x_minus1, x0, opt.budget * opt.oracle_factor);
    auto finish = [&](verdict out) {
        out.oracle = oracle;
        if (oracle && out.definite() && !out.oracle_agrees()) {
            if (*oracle == asymptotic_class::undetermined)
                detail::append_note(out, "oracle inconclusive within budget");
            else
                detail::append_note(out, std::string("oracle disagrees: ") + to_string(*oracle));
        }
        return out;
    };

    auto ratios = iterate_ratio(prm, x0 / x_minus1, opt.budget);
    if (ratios.status == ratio_status::hit_zero) {
        v.cls = asymptotic_class::iteration_stops;
        v.rule = "stop";
        v.notes = "ratio reached zero at step " + std::to_string(ratios.values.size() - 1);
        return finish(v);
    }

    // Orbits through negative ratios are classified from their first
    // positive ratio on; the fate of {x_n} depends only on the tail.
    std::size_t start = 0;
    while (start < ratios.values.size() && !(ratios.values[start] > 0.0)) ++start;
    if (start == ratios.values.size()) {
        v.cls = oracle.value_or(asymptotic_class::undetermined);
        v.rule = "oracle";
        v.notes = "ratio never became positive within budget";
        return finish(v);
    }
    if (start > 0) {
        detail::append_note(v, "ratio positive from step " + std::to_string(start));
        ratios.values.erase(ratios.values.begin(), ratios.values.begin() + static_cast<std::ptrdiff_t>(start));
    }
    if (std::any_of(ratios.values.begin(), ratios.values.end(), [](double t) { return !(t > 0.0); })) {
        v.cls = oracle.value_or(asymptotic_class::undetermined);
        v.rule = "oracle";
        detail::append_note(v, "ratio orbit leaves the positive axis");
        return finish(v);
    }

    const auto eqs = equilibria(prm);
    std::vector<two_cycle> cycles;
    try {
        cycles = find_two_cycles(prm);
    } catch (const numerical_error& e) {
        detail::append_note(v, std::string("2-cycle search failed: ") + e.what());
    }
    if (const auto unit = unit_product_cycle(prm)) {
        bool replaced = false;
        for (auto& c : cycles)
            if (detail::rel_gap(c.p, unit->p) <= 1e-6 && detail::rel_gap(c.q, unit->q) <= 1e-6) {
                c = *unit;
                replaced = true;
            }
        if (!replaced) cycles.push_back(*unit);
    }

    auto evidence_for = [&](int stride) -> std::optional<direction> {
        const auto sol = iterate_solution(prm, 1.0, ratios.values.front(), opt.budget);
        if (stride == 1) return subsequence_monotonicity(sol, 1, 0, 0.25);
        const auto e0 = subsequence_monotonicity(sol, 2, 0, 0.25);
        const auto e1 = subsequence_monotonicity(sol, 2, 1, 0.25);
        return e0 == e1 ? std::optional<direction>(e0) : std::optional<direction>(direction::mixed);
    };

    // exact landing on a preimage of 1 or of a unit-product cycle
    for (const auto& e : eqs) {
        if (std::abs(e.value - 1.0) > unit_band_analytic) continue;
        if (const auto k = detail::landing_step(ratios.values, {e.value})) {
            v.cls = asymptotic_class::converges_to_equilibrium;
            v.rule = "T1.S";
            detail::append_note(v, "ratio lands on 1 at step " + std::to_string(*k + start));
            return finish(v);
        }
    }
    for (const auto& c : cycles) {
        if (!c.unit_product) continue;
        if (const auto k = detail::landing_step(ratios.values, {c.p, c.q})) {
            v.cls = asymptotic_class::converges_to_two_cycle;
            v.rule = "T2.S";
            detail::append_note(v, "ratio lands on the unit-product cycle at step " + std::to_string(*k + start));
            return finish(v);
        }
    }

    identified_limit lim;
    const auto rep = detect_ratio_limit(prm, ratios, opt.tol, opt.window);
    if (rep.kind == limit_kind::equilibrium) {
        for (const auto& e : eqs)
            if (detail::rel_gap(rep.values[0], e.value) <= 1e-6) lim.eq = e;
        if (!lim.eq && rep.values[0] > 0.0) {
            const double m = phi_prime(prm, rep.values[0]);
            lim.eq = equilibrium{rep.values[0], m, classify_multiplier(m)};
            detail::append_note(v, "ratio limit not among located equilibria");
        }
    } else if (rep.kind == limit_kind::two_cycle) {
        for (const auto& c : cycles)
            if (detail::rel_gap(rep.values[0], c.p) <= 1e-6 && detail::rel_gap(rep.values[1], c.q) <= 1e-6) lim.cycle = c;
        if (!lim.cycle && rep.values[0] > 0.0) {
            lim.cycle = make_two_cycle(prm, rep.values[0], rep.values[1]);
            detail::append_note(v, "ratio limit not among located 2-cycles");
        }
    } else {
        for (const auto& e : eqs)
            if (!lim.eq && detail::approaching(ratios.values, {e.value})) lim.eq = e;
        for (const auto& c : cycles)
            if (!lim.eq && !lim.cycle && detail::approaching(ratios.values, {c.p, c.q})) lim.cycle = c;
        lim.slow = lim.eq || lim.cycle;
    }

    if (lim.eq) {
        const bool is_one = std::abs(lim.eq->value - 1.0) <= unit_band_analytic;
        std::optional<direction> ev;
        if (is_one && std::abs(sigma(prm) + 1.0) <= critical_band) ev = evidence_for(1);
        verdict out = classify_equilibrium_limit(prm, *lim.eq, ev);
        if (!v.notes.empty()) detail::append_note(out, v.notes);
        if (lim.slow) detail::append_note(out, "slow convergence to a neutral equilibrium");
        return finish(out);
    }
    if (lim.cycle) {
        std::optional<direction> ev;
        if (lim.cycle->unit_product && std::abs(lim.cycle->multiplier - 1.0) <= multiplier_band(*lim.cycle))
            ev = evidence_for(2);
        verdict out = classify_cycle_limit(prm, *lim.cycle, ev);
        if (!v.notes.empty()) detail::append_note(out, v.notes);
        if (lim.slow) detail::append_note(out, "slow convergence to a neutral 2-cycle");
        return finish(out);
    }

    if (auto r = classify_remark(prm)) {
        if (!v.notes.empty()) detail::append_note(*r, v.notes);
        detail::append_note(*r, "no ratio limit identified");
        return finish(*r);
    }
    v.cls = oracle.value_or(asymptotic_class::undetermined);
    v.rule = "oracle";
    detail::append_note(v, "no ratio limit identified");
    return finish(v);
}

} // namespace ratiodyn
