#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ratiodyn {

/// Real univariate polynomial, coefficients stored in ascending degree order.
///
/// Trailing zero coefficients are trimmed on construction, so the leading
/// coefficient is nonzero unless the polynomial is identically zero (stored
/// as the single coefficient 0, degree 0).
class polynomial {
public:
    polynomial() : c_{0.0} {}
    explicit polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { normalize(); }
    polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { normalize(); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
    double leading() const { return c_.back(); }
    std::span<const double> coeffs() const { return c_; }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

    /// Horner evaluation.
    double operator()(double t) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    /// Sum of |c_i||t|^i, the natural scale of rounding error in operator().
    double magnitude_at(double t) const {
        const double at = std::abs(t);
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * at + std::abs(*it);
        return acc;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    friend polynomial operator+(const polynomial& p, const polynomial& q) {
        std::vector<double> r(std::max(p.c_.size(), q.c_.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = p[i] + q[i];
        return polynomial(std::move(r));
    }

    friend polynomial operator-(const polynomial& p, const polynomial& q) {
        std::vector<double> r(std::max(p.c_.size(), q.c_.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = p[i] - q[i];
        return polynomial(std::move(r));
    }

    friend polynomial operator*(const polynomial& p, const polynomial& q) {
        std::vector<double> r(p.c_.size() + q.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.c_.size(); ++i)
            for (std::size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
        return polynomial(std::move(r));
    }

    friend polynomial operator*(double s, const polynomial& p) {
        std::vector<double> r(p.c_);
        for (double& v : r) v *= s;
        return polynomial(std::move(r));
    }

    /// p(t) * t^k
    polynomial shifted(int k) const {
        std::vector<double> r(static_cast<std::size_t>(k), 0.0);
        r.insert(r.end(), c_.begin(), c_.end());
        return polynomial(std::move(r));
    }

    friend bool operator==(const polynomial&, const polynomial&) = default;

private:
    void normalize() {
        while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
        if (c_.empty()) c_.push_back(0.0);
    }

    std::vector<double> c_;
};

inline polynomial derivative(const polynomial& p) {
    if (p.degree() == 0) return polynomial{};
    std::vector<double> r(static_cast<std::size_t>(p.degree()));
    for (std::size_t i = 1; i <= r.size(); ++i) r[i - 1] = static_cast<double>(i) * p[i];
    return polynomial(std::move(r));
}

struct division_result {
    polynomial quotient;
    polynomial remainder;
};

/// Long (synthetic) division: p = q * quotient + remainder, deg remainder < deg q.
inline division_result divide(const polynomial& p, const polynomial& q) {
    if (q.is_zero()) throw std::domain_error("polynomial division by the zero polynomial");
    const int dp = p.degree();
    const int dq = q.degree();
    if (dp < dq) return {polynomial{}, p};

    std::vector<double> rem(p.coeffs().begin(), p.coeffs().end());
    std::vector<double> quo(static_cast<std::size_t>(dp - dq + 1), 0.0);
    const double lead = q.leading();
    for (int k = dp - dq; k >= 0; --k) {
        const double f = rem[static_cast<std::size_t>(k + dq)] / lead;
        quo[static_cast<std::size_t>(k)] = f;
        for (int j = 0; j <= dq; ++j) rem[static_cast<std::size_t>(k + j)] -= f * q[static_cast<std::size_t>(j)];
        rem[static_cast<std::size_t>(k + dq)] = 0.0;
    }
    rem.resize(static_cast<std::size_t>(std::max(dq, 1)));
    return {polynomial(std::move(quo)), polynomial(std::move(rem))};
}

/// Cauchy bound: every complex root satisfies |z| < 1 + max |c_i / c_n|.
inline double cauchy_bound(const polynomial& p) {
    double m = 0.0;
    for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::abs(p[static_cast<std::size_t>(i)] / p.leading()));
    return 1.0 + m;
}

struct real_root {
    double value;
    /// false for a root at which the derivative also vanishes (even or
    /// higher odd multiplicity).
    bool simple = true;
};

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Bisection on a bracket with p(lo) and p(hi) of opposite strict sign.
inline double bisect(const polynomial& p, double lo, double hi, double tol) {
    int slo = sign_of(p(lo));
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const int sm = sign_of(p(mid));
        if (sm == 0) return mid;
        if (sm == slo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

// Roots of p strictly inside (lo, hi). The interval is split at the real
// roots of p' (found recursively); on each piece p is monotone, so it holds
// at most one simple root, which a sign change brackets. Critical points
// where p itself vanishes are reported as non-simple roots.
inline std::vector<real_root> isolate(const polynomial& p, double lo, double hi, double tol) {
    std::vector<real_root> out;
    if (p.degree() == 0) return out;
    if (p.degree() == 1) {
        const double r = -p[0] / p[1];
        if (r > lo && r < hi) out.push_back({r, true});
        return out;
    }

    const auto crit = isolate(derivative(p), lo, hi, tol);

    struct knot {
        double x;
        int sign;
    };
    std::vector<knot> knots;
    knots.reserve(crit.size() + 2);
    knots.push_back({lo, sign_of(p(lo))});
    for (const auto& c : crit) {
        const double v = p(c.value);
        // a critical point is a root when |p| is at rounding level there
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * p.magnitude_at(c.value);
        if (std::abs(v) <= std::max(floor, tol * tol * p.magnitude_at(c.value))) {
            knots.push_back({c.value, 0});
        } else {
            knots.push_back({c.value, sign_of(v)});
        }
    }
    knots.push_back({hi, sign_of(p(hi))});

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const auto& l = knots[i];
        const auto& r = knots[i + 1];
        if (i > 0 && l.sign == 0) out.push_back({l.x, false});
        if (l.sign != 0 && r.sign != 0 && l.sign != r.sign) {
            if (r.x - l.x <= tol && i > 0 && i + 2 < knots.size()) {
                throw inconclusive_roots("sign change between critical points " + std::to_string(l.x) + " and " +
                                         std::to_string(r.x) + " cannot be resolved at tolerance " +
                                         std::to_string(tol));
            }
            out.push_back({bisect(p, l.x, r.x, tol), true});
        }
    }
    return out;
}

} // namespace detail

/// Every real root of p in the open interval (lo, hi), ascending, each
/// located to within tol. Infinite endpoints are clipped to the Cauchy
/// bound. Throws inconclusive_roots when roots cannot be separated at tol.
inline std::vector<real_root> real_roots_in(const polynomial& p, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("real_roots_in: tol must be positive");
    if (!(lo < hi)) throw std::invalid_argument("real_roots_in: need lo < hi");
    if (p.is_zero()) throw std::invalid_argument("real_roots_in: zero polynomial has no isolated roots");
    if (p.degree() == 0) return {};
    const double bound = cauchy_bound(p);
    if (std::isinf(lo)) lo = -bound;
    if (std::isinf(hi)) hi = bound;
    lo = std::max(lo, -bound);
    hi = std::min(hi, bound);
    if (!(lo < hi)) return {};
    auto roots = detail::isolate(p, lo, hi, tol);
    std::sort(roots.begin(), roots.end(), [](const real_root& x, const real_root& y) { return x.value < y.value; });
    return roots;
}

/// Convenience: just the root values.
inline std::vector<double> root_values(const std::vector<real_root>& roots) {
    std::vector<double> v;
    v.reserve(roots.size());
    for (const auto& r : roots) v.push_back(r.value);
    return v;
}

} // namespace ratiodyn
