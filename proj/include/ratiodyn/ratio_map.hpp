#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poly.hpp"

namespace ratiodyn {

/// Coefficients shared by the second-order recurrence
///   x_{n+1} = (a x_n^3 + b x_n^2 x_{n-1} + c x_n x_{n-1}^2 + d x_{n-1}^3) / x_n^2
/// and its ratio map phi(t) = (a t^3 + b t^2 + c t + d) / t^3.
struct parameters {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    friend bool operator==(const parameters&, const parameters&) = default;
};

/// a, b, d must be positive; c is any finite real.
inline void validate(const parameters& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) || !std::isfinite(p.d))
        throw std::invalid_argument("parameters must be finite");
    if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.d > 0.0))
        throw std::invalid_argument("parameters a, b and d must be positive");
}

/// Tolerance band for classifying closed-form multipliers as neutral.
inline constexpr double critical_band = 1e-9;

/// N(t) = a t^3 + b t^2 + c t + d.
inline polynomial numerator(const parameters& p) { return polynomial{p.d, p.c, p.b, p.a}; }

/// t^4 - a t^3 - b t^2 - c t - d; its positive roots are the fixed points of phi.
inline polynomial fixed_point_quartic(const parameters& p) { return polynomial{-p.d, -p.c, -p.b, -p.a, 1.0}; }

namespace detail {
inline void reject_pole(double t, const char* what) {
    if (t == 0.0) throw std::domain_error(std::string(what) + ": t = 0 is a pole of the ratio map");
}
} // namespace detail

inline double phi(const parameters& p, double t) {
    detail::reject_pole(t, "phi");
    const double u = 1.0 / t;
    return p.a + u * (p.b + u * (p.c + u * p.d));
}

/// phi'(t) = -(b t^2 + 2 c t + 3 d) / t^4
inline double phi_prime(const parameters& p, double t) {
    detail::reject_pole(t, "phi_prime");
    const double u = 1.0 / t;
    return -u * u * (p.b + u * (2.0 * p.c + u * 3.0 * p.d));
}

/// phi''(t) = (2 b t^2 + 6 c t + 12 d) / t^5
inline double phi_double_prime(const parameters& p, double t) {
    detail::reject_pole(t, "phi_double_prime");
    const double u = 1.0 / t;
    return u * u * u * (2.0 * p.b + u * (6.0 * p.c + u * 12.0 * p.d));
}

/// |a| + |b/t| + |c/t^2| + |d/t^3|, the scale of rounding error in phi(t).
inline double phi_magnitude(const parameters& p, double t) {
    const double u = 1.0 / std::abs(t);
    return std::abs(p.a) + u * (std::abs(p.b) + u * (std::abs(p.c) + u * std::abs(p.d)));
}

/// True when phi(t) = value is zero to within the rounding error of its evaluation.
inline bool phi_is_zero(const parameters& p, double t, double value) {
    return std::abs(value) <= 8.0 * std::numeric_limits<double>::epsilon() * phi_magnitude(p, t);
}

enum class stability { attracting, repelling, neutral };

inline const char* to_string(stability s) {
    switch (s) {
    case stability::attracting: return "attracting";
    case stability::repelling: return "repelling";
    case stability::neutral: return "neutral";
    }
    return "?";
}

inline stability classify_multiplier(double m, double band = critical_band) {
    if (std::abs(m) < 1.0 - band) return stability::attracting;
    if (std::abs(m) > 1.0 + band) return stability::repelling;
    return stability::neutral;
}

struct equilibrium {
    double value;
    double multiplier;
    stability kind;
};

/// Positive fixed points of phi, ascending.
inline std::vector<equilibrium> equilibria(const parameters& p, double tol = 1e-13) {
    std::vector<equilibrium> out;
    for (const auto& r : real_roots_in(fixed_point_quartic(p), 0.0, std::numeric_limits<double>::infinity(), tol)) {
        const double m = phi_prime(p, r.value);
        out.push_back({r.value, m, classify_multiplier(m)});
    }
    return out;
}

/// Local minimum x_min and local maximum x_max of phi on the positive axis.
struct extrema {
    double x_min;
    double x_max;
};

/// Present iff c < -sqrt(3bd), i.e. b t^2 + 2 c t + 3 d has two positive roots.
inline std::optional<extrema> critical_points(const parameters& p) {
    const double disc = p.c * p.c - 3.0 * p.b * p.d;
    if (!(p.c < -std::sqrt(3.0 * p.b * p.d)) || !(disc > 0.0)) return std::nullopt;
    const double s = std::sqrt(disc);
    // -c + s is free of cancellation; recover the smaller root from the product 3d/b
    const double x_max = (-p.c + s) / p.b;
    const double x_min = 3.0 * p.d / (p.b * x_max);
    return extrema{x_min, x_max};
}

inline double second_iterate(const parameters& p, double t) {
    const double u = phi(p, t);
    if (u == 0.0) throw std::domain_error("second_iterate: orbit passes through 0");
    return phi(p, u);
}

/// (phi o phi)''(q) for a 2-cycle point q with partner p = phi(q):
/// phi''(p) phi'(q)^2 + phi'(p) phi''(q).
inline double second_iterate_second_derivative(const parameters& prm, double q, double partner) {
    const double dq = phi_prime(prm, q);
    return phi_double_prime(prm, partner) * dq * dq + phi_prime(prm, partner) * phi_double_prime(prm, q);
}

/// Negative ratios outside [r, r'] return to the positive axis within a few
/// iterations: r is the negative zero of phi and r' in (r, 0) its preimage.
struct escape_region {
    double r;
    double r_prime;
};

inline std::optional<escape_region> negative_escape_region(const parameters& p, double tol = 1e-14) {
    const auto neg = real_roots_in(numerator(p), -std::numeric_limits<double>::infinity(), 0.0, tol);
    if (neg.size() != 1 || !neg.front().simple) return std::nullopt;
    const double r = neg.front().value;
    // phi(t) = r  <=>  N(t) - r t^3 = 0
    const polynomial pre = numerator(p) - polynomial{0.0, 0.0, 0.0, r};
    const auto cands = real_roots_in(pre, r, 0.0, tol);
    if (cands.size() != 1) return std::nullopt;
    return escape_region{r, cands.front().value};
}

} // namespace ratiodyn
