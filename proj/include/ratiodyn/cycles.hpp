#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "ratio_map.hpp"

namespace ratiodyn {

/// Band on |pq - 1| for cycles located by root search.
inline constexpr double unit_product_band = 1e-6;

/// A period-2 orbit {p, q} of phi, p < q.
struct two_cycle {
    double p;
    double q;
    double product;
    double multiplier; // phi'(p) phi'(q)
    bool unit_product;
    /// Built in closed form from the unit-product quadratic rather than by
    /// root search; narrows the tolerance bands used downstream.
    bool analytic = false;
};

inline two_cycle make_two_cycle(const parameters& prm, double p, double q, bool analytic = false) {
    if (p > q) std::swap(p, q);
    const double prod = p * q;
    return {p, q, prod, phi_prime(prm, p) * phi_prime(prm, q),
            analytic || std::abs(prod - 1.0) <= unit_product_band, analytic};
}

/// True when phi swaps p and q to within tol (relative, floor 1).
inline bool is_two_cycle(const parameters& prm, double p, double q, double tol) {
    if (p == 0.0 || q == 0.0 || p == q) return false;
    return std::abs(phi(prm, p) - q) <= tol * std::max(1.0, std::abs(q)) &&
           std::abs(phi(prm, q) - p) <= tol * std::max(1.0, std::abs(p));
}

/// Degree-6 polynomial whose roots are the points of period exactly 2 (plus
/// possibly complex or negative ones). phi(phi(t)) = t clears to
///   t N^3 - a N^3 - b N^2 t^3 - c N t^6 - d t^9 = 0,
/// which the fixed-point quartic divides exactly.
inline polynomial two_cycle_poly(const parameters& prm) {
    const polynomial n = numerator(prm);
    const polynomial n2 = n * n;
    const polynomial n3 = n2 * n;
    const polynomial full = n3.shifted(1) - prm.a * n3 - prm.b * n2.shifted(3) - prm.c * n.shifted(6) -
                            polynomial{prm.d}.shifted(9);
    auto [quo, rem] = divide(full, fixed_point_quartic(prm));
    if (rem.max_abs_coeff() > 1e-8 * full.max_abs_coeff()) {
        std::ostringstream os;
        os << "two_cycle_poly: fixed-point quartic leaves remainder " << rem.max_abs_coeff()
           << " (scale " << full.max_abs_coeff() << ")";
        throw numerical_error(os.str());
    }
    return quo;
}

namespace detail {

// Newton on g(t) = phi(phi(t)) - t, kept only while the residual shrinks.
inline double polish_periodic_point(const parameters& prm, double t) {
    auto g = [&](double x) { return second_iterate(prm, x) - x; };
    double best = t;
    double best_res = std::abs(g(t));
    for (int i = 0; i < 8 && best_res > 0.0; ++i) {
        const double u = phi(prm, best);
        const double dg = phi_prime(prm, u) * phi_prime(prm, best) - 1.0;
        if (dg == 0.0 || !std::isfinite(dg)) break;
        const double next = best - (second_iterate(prm, best) - best) / dg;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        const double res = std::abs(g(next));
        if (!(res < best_res)) break;
        best = next;
        best_res = res;
    }
    return best;
}

} // namespace detail

/// All positive 2-cycles, sorted by p ascending. A positive root of the cycle
/// polynomial whose image is negative is skipped; any other root must pair
/// with another root via q = phi(p), or pairing_failure is thrown.
inline std::vector<two_cycle> find_two_cycles(const parameters& prm, double tol = 1e-13) {
    const auto roots = real_roots_in(two_cycle_poly(prm), 0.0, std::numeric_limits<double>::infinity(), tol);
    std::vector<double> pts;
    for (const auto& r : roots) {
        const double t = detail::polish_periodic_point(prm, r.value);
        // a root shared with the quartic (period-doubling point) is a fixed point
        if (std::abs(phi(prm, t) - t) <= 1e-9 * std::max(1.0, t)) continue;
        pts.push_back(t);
    }

    std::vector<two_cycle> out;
    std::vector<bool> used(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (used[i]) continue;
        const double image = phi(prm, pts[i]);
        // partner on the negative axis: a real 2-cycle, but not a positive one
        if (image <= 0.0) {
            used[i] = true;
            continue;
        }
        std::size_t best = pts.size();
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            const double gap = std::abs(pts[j] - image);
            if (gap < best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best == pts.size() || best_gap > 1e-6 * std::max(1.0, std::abs(image))) {
            std::ostringstream os;
            os.precision(17);
            os << "find_two_cycles: periodic point " << pts[i] << " maps to " << image
               << " which matches no located root (nearest gap " << best_gap << ")";
            throw pairing_failure(os.str());
        }
        used[i] = used[best] = true;
        out.push_back(make_two_cycle(prm, pts[i], pts[best]));
    }
    std::sort(out.begin(), out.end(), [](const two_cycle& x, const two_cycle& y) { return x.p < y.p; });
    return out;
}

/// The 2-cycle with pq = 1, built from X^2 - ((a-c)/d) X + 1 = 0. Exists iff
/// (a-c)/d = (d-b+1)/a > 2; both conditions are tested to within tol.
inline std::optional<two_cycle> unit_product_cycle(const parameters& prm, double tol = 1e-9) {
    const double s = (prm.a - prm.c) / prm.d;
    const double s_alt = (prm.d - prm.b + 1.0) / prm.a;
    if (!(std::abs(s - s_alt) <= tol) || !(s > 2.0 + tol)) return std::nullopt;
    const double q = 0.5 * (s + std::sqrt(s * s - 4.0));
    const double p = 1.0 / q;
    return make_two_cycle(prm, p, q, true);
}

/// q + p phi'(p) and p + q phi'(q) for a unit-product cycle; the first is
/// negative and the second positive whenever the cycle is attracting.
struct cycle_signs {
    double q_side; // q + p phi'(p)
    double p_side; // p + q phi'(q)
};

inline cycle_signs unit_cycle_signs(const parameters& prm, const two_cycle& cyc) {
    if (!cyc.unit_product) throw std::invalid_argument("unit_cycle_signs: cycle does not have unit product");
    return {cyc.q + cyc.p * phi_prime(prm, cyc.p), cyc.p + cyc.q * phi_prime(prm, cyc.q)};
}

/// Initial pair (x, x/p) of a period-2 solution of the recurrence. Every pair
/// whose ratio is p or q = 1/p is such a solution.
inline std::pair<double, double> recurrence_cycle_through(const two_cycle& cyc, double x) {
    if (!cyc.unit_product) throw std::invalid_argument("recurrence_cycle_through: cycle does not have unit product");
    if (!(x > 0.0)) throw std::invalid_argument("recurrence_cycle_through: x must be positive");
    return {x, x / cyc.p};
}

} // namespace ratiodyn
