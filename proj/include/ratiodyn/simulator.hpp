#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratio_map.hpp"

namespace ratiodyn {

inline constexpr double default_zero_guard = 1e-300;

enum class ratio_status { completed, hit_zero, escaped_negative_unrecoverable };

/// t_0, t_1 = phi(t_0), ...
struct ratio_trajectory {
    std::vector<double> values;
    ratio_status status = ratio_status::completed;
};

/// Iterates phi for up to `steps` steps. Stops with hit_zero once |t_k| drops
/// below zero_guard or below the rounding error of phi, since the recurrence
/// would then divide by zero.
inline ratio_trajectory iterate_ratio(const parameters& prm, double t0, std::size_t steps,
                                      double zero_guard = default_zero_guard) {
    if (t0 == 0.0) throw std::invalid_argument("iterate_ratio: t0 must be nonzero");
    if (!(zero_guard > 0.0)) throw std::invalid_argument("iterate_ratio: zero_guard must be positive");
    ratio_trajectory tr;
    tr.values.reserve(steps + 1);
    tr.values.push_back(t0);
    double t = t0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double prev = t;
        t = phi(prm, t);
        if (!std::isfinite(t)) {
            tr.status = ratio_status::hit_zero;
            return tr;
        }
        tr.values.push_back(t);
        if (std::abs(t) < zero_guard || phi_is_zero(prm, prev, t)) {
            tr.status = ratio_status::hit_zero;
            return tr;
        }
    }
    return tr;
}

enum class solution_status { completed, stopped_division_by_zero, overflowed_budget };

/// x_n in log-magnitude/sign form, n = -1, 0, 1, ... . Index k of each
/// vector holds n = k - 1. ratios[k] = x_k / x_{k-1} for k >= 0 is kept so
/// that short-range comparisons avoid differencing large accumulated logs.
struct solution_trajectory {
    std::vector<double> log10_abs;
    std::vector<std::int8_t> signs;
    std::vector<double> ratios; // ratios[n] = t_n, n >= 0
    solution_status status = solution_status::completed;

    /// Number of indices n >= -1 stored.
    std::size_t size() const { return log10_abs.size(); }
    /// Largest n stored.
    long last_index() const { return static_cast<long>(log10_abs.size()) - 2; }
    double log10_at(long n) const { return log10_abs.at(static_cast<std::size_t>(n + 1)); }
    int sign_at(long n) const { return signs.at(static_cast<std::size_t>(n + 1)); }

    /// x_n in direct space, when |log10 |x_n|| < 300.
    std::optional<double> value(long n) const {
        const double l = log10_at(n);
        if (!(std::abs(l) < 300.0)) return std::nullopt;
        return sign_at(n) * std::pow(10.0, l);
    }

    /// log10 |x_m / x_n| summed from the stored ratios (m > n >= -1).
    double log10_ratio(long m, long n) const {
        double s = 0.0;
        for (long k = n + 1; k <= m; ++k) s += std::log10(std::abs(ratios.at(static_cast<std::size_t>(k))));
        return s;
    }
};

/// Iterates the second-order recurrence through its ratios:
/// log10|x_n| = log10|x_0| + sum_{k=1..n} log10|t_k|.
inline solution_trajectory iterate_solution(const parameters& prm, double x_minus1, double x0, std::size_t steps,
                                            double zero_guard = default_zero_guard) {
    if (x_minus1 == 0.0 || x0 == 0.0) throw std::invalid_argument("iterate_solution: initial values must be nonzero");
    solution_trajectory tr;
    tr.log10_abs.reserve(steps + 2);
    tr.signs.reserve(steps + 2);
    tr.ratios.reserve(steps + 1);
    auto sgn = [](double v) { return static_cast<std::int8_t>(v < 0.0 ? -1 : 1); };
    tr.log10_abs.push_back(std::log10(std::abs(x_minus1)));
    tr.signs.push_back(sgn(x_minus1));
    tr.log10_abs.push_back(std::log10(std::abs(x0)));
    tr.signs.push_back(sgn(x0));
    double t = x0 / x_minus1;
    tr.ratios.push_back(t);
    double log_mag = tr.log10_abs.back();
    std::int8_t sign = tr.signs.back();
    for (std::size_t k = 0; k < steps; ++k) {
        const double prev = t;
        t = phi(prm, t);
        if (!std::isfinite(t) || std::abs(t) < zero_guard || phi_is_zero(prm, prev, t)) {
            tr.status = solution_status::stopped_division_by_zero;
            return tr;
        }
        tr.ratios.push_back(t);
        log_mag += std::log10(std::abs(t));
        sign = static_cast<std::int8_t>(sign * sgn(t));
        tr.log10_abs.push_back(log_mag);
        tr.signs.push_back(sign);
    }
    return tr;
}

/// One step of the recurrence in direct space (no overflow protection).
inline double recurrence_step(const parameters& p, double x_prev, double x) {
    if (x == 0.0) throw std::domain_error("recurrence_step: x_n = 0");
    return (p.a * x * x * x + p.b * x * x * x_prev + p.c * x * x_prev * x_prev + p.d * x_prev * x_prev * x_prev) /
           (x * x);
}

enum class limit_kind { equilibrium, two_cycle, none };

struct limit_report {
    limit_kind kind = limit_kind::none;
    std::vector<double> values;
    double residual = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {
inline double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}
inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
} // namespace detail

/// Classifies the tail of a ratio orbit: constant to within tol (relative,
/// floor 1) is an equilibrium; alternating between two such values an
/// exchanged pair; anything else none.
inline limit_report detect_ratio_limit(const parameters& prm, const ratio_trajectory& tr, double tol = 1e-8,
                                       std::size_t window = 64) {
    if (window < 4) throw std::invalid_argument("detect_ratio_limit: window must be at least 4");
    limit_report rep;
    if (tr.status != ratio_status::completed || tr.values.size() < window) return rep;
    const std::vector<double> tail(tr.values.end() - static_cast<std::ptrdiff_t>(window), tr.values.end());
    const double m = detail::mean(tail);
    if (detail::spread(tail) <= tol * std::max(1.0, std::abs(m))) {
        rep.kind = limit_kind::equilibrium;
        rep.values = {m};
        rep.residual = m != 0.0 ? std::abs(phi(prm, m) - m) : std::numeric_limits<double>::infinity();
        return rep;
    }
    std::vector<double> even, odd;
    for (std::size_t i = 0; i < tail.size(); ++i) (i % 2 == 0 ? even : odd).push_back(tail[i]);
    const double me = detail::mean(even), mo = detail::mean(odd);
    if (detail::spread(even) <= tol * std::max(1.0, std::abs(me)) &&
        detail::spread(odd) <= tol * std::max(1.0, std::abs(mo)) &&
        std::abs(me - mo) > 10.0 * tol * std::max(1.0, std::max(std::abs(me), std::abs(mo)))) {
        rep.kind = limit_kind::two_cycle;
        rep.values = {std::min(me, mo), std::max(me, mo)};
        const double u = rep.values[0], v = rep.values[1];
        rep.residual = (u != 0.0 && v != 0.0) ? std::max(std::abs(phi(prm, u) - v), std::abs(phi(prm, v) - u))
                                              : std::numeric_limits<double>::infinity();
    }
    return rep;
}

/// Asymptotic fate of a solution {x_n}.
enum class asymptotic_class {
    converges_to_equilibrium,
    converges_to_two_cycle,
    converges_to_zero,
    diverges_to_infinity,
    iteration_stops,
    undetermined,
    hypothesis_violated
};

inline const char* to_string(asymptotic_class c) {
    switch (c) {
    case asymptotic_class::converges_to_equilibrium: return "ConvergesToEquilibrium";
    case asymptotic_class::converges_to_two_cycle: return "ConvergesToTwoCycle";
    case asymptotic_class::converges_to_zero: return "ConvergesToZero";
    case asymptotic_class::diverges_to_infinity: return "DivergesToInfinity";
    case asymptotic_class::iteration_stops: return "IterationStops";
    case asymptotic_class::undetermined: return "Undetermined";
    case asymptotic_class::hypothesis_violated: return "HypothesisViolated";
    }
    return "?";
}

struct oracle_thresholds {
    double log10_up = 12.0;
    double log10_down = -12.0;
    double tol = 1e-8;
    std::size_t window = 64;
    /// Fraction of the run over which a divergence/decay trend must hold.
    double trend_fraction = 0.1;
};

/// Brute-force classification by simulation alone.
inline asymptotic_class empirical_class(const parameters& prm, double x_minus1, double x0, std::size_t budget,
                                        const oracle_thresholds& th = {}) {
    const auto tr = iterate_solution(prm, x_minus1, x0, budget);
    if (tr.status == solution_status::stopped_division_by_zero) return asymptotic_class::iteration_stops;
    const long last = tr.last_index();
    const double final_log = tr.log10_at(last);
    const long span = std::max<long>(2, static_cast<long>(th.trend_fraction * static_cast<double>(last + 1)));
    const long ref = std::max<long>(-1, last - span);
    // compare like parities so a large 2-cycle swing does not mask the trend
    const long ref_aligned = ((last - ref) % 2 == 0) ? ref : ref + 1;
    const double trend = tr.log10_ratio(last, ref_aligned);

    if (final_log > th.log10_up && trend > 0.0) return asymptotic_class::diverges_to_infinity;
    if (final_log < th.log10_down && trend < 0.0) return asymptotic_class::converges_to_zero;

    if (tr.size() < th.window) return asymptotic_class::undetermined;
    std::vector<double> tail;
    for (long n = last - static_cast<long>(th.window) + 1; n <= last; ++n) {
        const auto v = tr.value(n);
        if (!v) return asymptotic_class::undetermined;
        tail.push_back(*v);
    }
    const double m = detail::mean(tail);
    if (detail::spread(tail) <= th.tol * std::max(1.0, std::abs(m))) return asymptotic_class::converges_to_equilibrium;
    std::vector<double> even, odd;
    for (std::size_t i = 0; i < tail.size(); ++i) (i % 2 == 0 ? even : odd).push_back(tail[i]);
    const double me = detail::mean(even), mo = detail::mean(odd);
    if (detail::spread(even) <= th.tol * std::max(1.0, std::abs(me)) &&
        detail::spread(odd) <= th.tol * std::max(1.0, std::abs(mo)))
        return asymptotic_class::converges_to_two_cycle;
    return asymptotic_class::undetermined;
}

enum class direction { increasing, decreasing, mixed };

inline const char* to_string(direction d) {
    switch (d) {
    case direction::increasing: return "increasing";
    case direction::decreasing: return "decreasing";
    case direction::mixed: return "mixed";
    }
    return "?";
}

/// Direction of {x_{stride k + offset}}_{k>=0} over the trailing tail_fraction
/// of the subsequence, by strict majority of consecutive steps. A step counts
/// only when it moves by more than 1e-14 relative.
inline direction subsequence_monotonicity(const solution_trajectory& tr, int stride, int offset,
                                          double tail_fraction) {
    if (stride != 1 && stride != 2 && stride != 4) throw std::invalid_argument("stride must be 1, 2 or 4");
    if (offset < 0 || offset >= stride) throw std::invalid_argument("offset must lie in [0, stride)");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail_fraction must lie in (0, 1]");
    const long last = tr.last_index();
    if (last < offset) return direction::mixed;
    const long count = (last - offset) / stride + 1;
    if (count < 8) return direction::mixed;
    const long tail = std::max<long>(2, static_cast<long>(std::ceil(tail_fraction * static_cast<double>(count))));
    const long first_k = count - tail;
    const double margin = std::log10(1.0 + 1e-14);
    long up = 0, down = 0, steps = 0;
    for (long k = first_k; k + 1 < count; ++k) {
        const long n0 = static_cast<long>(stride) * k + offset;
        const long n1 = n0 + stride;
        ++steps;
        const int s0 = tr.sign_at(n0), s1 = tr.sign_at(n1);
        if (s0 != s1) {
            (s1 > 0 ? up : down) += 1;
            continue;
        }
        const double dl = tr.log10_ratio(n1, n0);
        // for negative terms growth in magnitude is a decrease
        if (dl > margin) (s0 > 0 ? up : down) += 1;
        else if (dl < -margin) (s0 > 0 ? down : up) += 1;
    }
    if (2 * up > steps) return direction::increasing;
    if (2 * down > steps) return direction::decreasing;
    return direction::mixed;
}

} // namespace ratiodyn
