#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "cycles.hpp"
#include "errors.hpp"
#include "ratio_map.hpp"

namespace ratiodyn {

// Orbit-indexed coefficients are exposed as functions of the ratio t the
// caller's trajectory supplies (t = t_n unless noted).

namespace detail {
inline void require_positive(double t, const char* what) {
    if (!(t > 0.0)) throw std::domain_error(std::string(what) + ": t must be positive");
}
inline void require_unit(const two_cycle& cyc, const char* what) {
    if (!cyc.unit_product) throw std::invalid_argument(std::string(what) + ": cycle does not have unit product");
    if (cyc.p == cyc.q) throw std::invalid_argument(std::string(what) + ": p = q is an equilibrium, not a cycle");
}
} // namespace detail

/// b + 2c + 3d, which equals -phi'(1).
inline double sigma(const parameters& p) { return p.b + 2.0 * p.c + 3.0 * p.d; }

/// x_{n+1} - x_n = r(t_n) (x_n - x_{n-1}) when a + b + c + d = 1.
inline double r_of(const parameters& p, double t) {
    detail::require_positive(t, "r_of");
    return -(p.b + p.c + p.d + (p.c + p.d) / t + p.d / (t * t));
}

/// x_{n+1} - x_{n-1} = rho(t_n) (x_n - x_{n-1}) when a + b + c + d = 1 and b + 2c + 3d = 1.
inline double rho_of(const parameters& p, double t) {
    detail::require_positive(t, "rho_of");
    return p.c + 2.0 * p.d - (p.c + p.d) / t - p.d / (t * t);
}

/// Second derivative at 1 of R(t) = r(t) r(phi(t)), by the chain rule.
/// With a + b + c + d = 1 and b + 2c + 3d = 1 it reduces to 2(a+d) + 4d - 4(a+d)^2.
inline double R_second_at_1(const parameters& p) {
    auto r = [&](double t) { return -(p.b + p.c + p.d + (p.c + p.d) / t + p.d / (t * t)); };
    auto r1 = [&](double t) { return (p.c + p.d) / (t * t) + 2.0 * p.d / (t * t * t); };
    auto r2 = [&](double t) { return -2.0 * (p.c + p.d) / (t * t * t) - 6.0 * p.d / (t * t * t * t); };
    const double f = phi(p, 1.0), f1 = phi_prime(p, 1.0), f2 = phi_double_prime(p, 1.0);
    return r2(1.0) * r(f) + 2.0 * r1(1.0) * r1(f) * f1 + r(1.0) * (r2(f) * f1 * f1 + r1(f) * f2);
}

/// phi(t) - q = gamma(t) (t - p) for a 2-cycle (p, q).
inline double gamma_of(const parameters& prm, double p, double t) {
    detail::require_positive(t, "gamma_of");
    return -(prm.b / (p * t) + prm.c * (t + p) / (p * p * t * t) + prm.d * (t * t + p * t + p * p) / (p * p * p * t * t * t));
}

/// phi(t) - p = theta(t) (t - q) for a 2-cycle (p, q).
inline double theta_of(const parameters& prm, double q, double t) { return gamma_of(prm, q, t); }

/// x_{n+2}/x_n - 1 = lambda'(t_n) (t_{n+1} - q), unit-product cycles only.
inline double lambda_prime_of(const parameters& prm, const two_cycle& cyc, double t) {
    const double next = phi(prm, t);
    if (next == 0.0) throw std::domain_error("lambda_prime_of: orbit maps to 0");
    return next * theta_of(prm, cyc.q, next) + cyc.p;
}

/// x_{n+2}/x_n - 1 = xi'(t_n) (t_{n+1} - p), unit-product cycles only.
inline double xi_prime_of(const parameters& prm, const two_cycle& cyc, double t) {
    const double next = phi(prm, t);
    if (next == 0.0) throw std::domain_error("xi_prime_of: orbit maps to 0");
    return next * gamma_of(prm, cyc.p, next) + cyc.q;
}

/// p + q phi'(q) + phi'(q)^2 phi''(p)/2 + phi'(p) phi''(q)/2; the slope
/// s'(q) of the difference multiplier when the cycle multiplier is 1.
inline double kappa(const parameters& prm, const two_cycle& cyc) {
    detail::require_unit(cyc, "kappa");
    const double dp = phi_prime(prm, cyc.p), dq = phi_prime(prm, cyc.q);
    const double ddp = phi_double_prime(prm, cyc.p), ddq = phi_double_prime(prm, cyc.q);
    return cyc.p + cyc.q * dq + dq * dq * ddp / 2.0 + dp * ddq / 2.0;
}

/// Slope at q of the four-step deviation coefficient, used when the cycle
/// multiplier is -1.
inline double l_quantity(const parameters& prm, const two_cycle& cyc) {
    detail::require_unit(cyc, "l_quantity");
    const double p = cyc.p, q = cyc.q;
    const double dp = phi_prime(prm, p), dq = phi_prime(prm, q);
    const double ddp = phi_double_prime(prm, p), ddq = phi_double_prime(prm, q);
    return -(p * p + dq * dq * q * q) + (q + p * dp) * ddq / 2.0 + (p + q * dq) * dq * dq * ddp / 2.0;
}

/// D_{n+2} = s(t_{n-1}) D_n with D_n = x_n - x_{n-2}:
///   s(t) = t phi(t) gamma(phi(t)) theta(t) [phi^2(t) theta(phi^2(t)) + p] / (t theta(t) + p).
/// s(q) equals the cycle multiplier.
inline double s_of(const parameters& prm, const two_cycle& cyc, double t) {
    detail::require_unit(cyc, "s_of");
    detail::require_positive(t, "s_of");
    const double p = cyc.p, q = cyc.q;
    const double th = theta_of(prm, q, t);
    const double den = t * th + p;
    if (std::abs(den) <= 1e-12 * (std::abs(t * th) + p)) throw numerical_error("s_of: pole of the denominator t theta(t) + p");
    const double t1 = phi(prm, t);
    const double t2 = phi(prm, t1);
    return t * t1 * gamma_of(prm, p, t1) * th * (t2 * theta_of(prm, q, t2) + p) / den;
}

/// s'(q) and s''(q) by Richardson-extrapolated central differences.
struct s_derivatives {
    double first;
    double second;
};

inline s_derivatives s_derivatives_at_q(const parameters& prm, const two_cycle& cyc) {
    const double q = cyc.q;
    const double h = 1e-4 * q;
    auto s = [&](double t) { return s_of(prm, cyc, t); };
    const double s0 = s(q);
    auto d1 = [&](double k) { return (s(q + k) - s(q - k)) / (2.0 * k); };
    auto d2 = [&](double k) { return (s(q + k) - 2.0 * s0 + s(q - k)) / (k * k); };
    return {(4.0 * d1(h / 2) - d1(h)) / 3.0, (4.0 * d2(h / 2) - d2(h)) / 3.0};
}

/// -2 s''(q) - 2 s'(q)^2 - s'(q) (phi^2)''(q)
inline double S_second_at_q(const parameters& prm, const two_cycle& cyc) {
    const auto ds = s_derivatives_at_q(prm, cyc);
    const double pp = second_iterate_second_derivative(prm, cyc.q, cyc.p);
    return -2.0 * ds.second - 2.0 * ds.first * ds.first - ds.first * pp;
}

/// A criterion value together with whether its hypothesis holds.
struct gated_value {
    std::optional<double> value;
    bool applicable = false;
};

struct criterion_report {
    double sigma = 0.0;
    gated_value r_second_at_1; // a+b+c+d = 1 and sigma = 1
    gated_value kappa;         // unit-product cycle, multiplier 1
    gated_value l_value;       // unit-product cycle, multiplier -1
    gated_value s_second_at_q; // unit-product cycle, multiplier -1, l > 0
};

/// Band on multiplier = +-1 tests; narrower for closed-form cycles.
inline double multiplier_band(const two_cycle& cyc) { return cyc.analytic ? 1e-9 : 1e-6; }

inline criterion_report criteria_for(const parameters& prm, const std::optional<two_cycle>& unit) {
    criterion_report rep;
    rep.sigma = sigma(prm);
    const bool unit_sum = std::abs(prm.a + prm.b + prm.c + prm.d - 1.0) <= critical_band;
    rep.r_second_at_1 = {R_second_at_1(prm), unit_sum && std::abs(rep.sigma - 1.0) <= critical_band};
    if (unit && unit->unit_product) {
        const double band = multiplier_band(*unit);
        const bool mu_plus = std::abs(unit->multiplier - 1.0) <= band;
        const bool mu_minus = std::abs(unit->multiplier + 1.0) <= band;
        rep.kappa = {kappa(prm, *unit), mu_plus};
        const double l = l_quantity(prm, *unit);
        rep.l_value = {l, mu_minus};
        try {
            rep.s_second_at_q = {S_second_at_q(prm, *unit), mu_minus && l > 0.0};
        } catch (const numerical_error&) {
            rep.s_second_at_q = {std::nullopt, false};
        }
    }
    return rep;
}

} // namespace ratiodyn
