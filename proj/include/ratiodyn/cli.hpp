#pragma once

// Batch front end. Requires the vendored CLI11.hpp and json.hpp.

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "classifier.hpp"
#include "criteria.hpp"
#include "cycles.hpp"
#include "errors.hpp"
#include "ratio_map.hpp"
#include "reference_checks.hpp"
#include "simulator.hpp"

namespace ratiodyn::cli {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int report_schema_version = 1;

enum exit_code : int { ok = 0, bad_arguments = 1, numerical_failure = 2, fixture_mismatch = 3 };

enum class float_style { shortest, fixed17 };

inline std::string format_double(double v, float_style style) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    if (style == float_style::fixed17) {
        // '#' keeps trailing zeros so every value shows 17 significant digits
        const int n = std::snprintf(buf.data(), buf.size(), "%#.17g", v);
        return std::string(buf.data(), static_cast<std::size_t>(n));
    }
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

using json = nlohmann::ordered_json;

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) {
    os << json(s).dump();
}

inline void write_json(std::ostream& os, const json& j, float_style style, int indent, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            write_string(os, it.key());
            os << ": ";
            write_json(os, it.value(), style, indent, depth + 1);
        }
        os << "\n" << close_pad << "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            write_json(os, e, style, indent, depth + 1);
        }
        os << "\n" << close_pad << "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            os << "null";
        } else {
            os << format_double(v, style);
        }
        return;
    }
    default: os << j.dump(); return;
    }
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json gated(const gated_value& g) {
    json j;
    j["value"] = optional_number(g.value);
    j["applicable"] = g.applicable;
    return j;
}

inline json cycle_json(const two_cycle& c) {
    json j;
    j["p"] = c.p;
    j["q"] = c.q;
    j["product"] = c.product;
    j["multiplier"] = c.multiplier;
    j["unit_product"] = c.unit_product;
    return j;
}

inline json verdict_json(const verdict& v) {
    json j;
    j["class"] = to_string(v.cls);
    j["rule"] = v.rule;
    j["conditional"] = v.conditional;
    j["monotonic_structure"] = v.monotonic_structure ? json(*v.monotonic_structure) : json(nullptr);
    j["notes"] = v.notes;
    if (v.oracle) {
        j["oracle_class"] = to_string(*v.oracle);
        j["oracle_agrees"] = v.oracle_agrees();
    }
    return j;
}

} // namespace detail

/// Full analysis of one parameter set as a JSON document (schema in
/// docs/report_schema.md).
inline json analysis_report(const parameters& prm, double limit_tol) {
    json rep;
    rep["schema_version"] = report_schema_version;
    rep["tool_version"] = tool_version;
    rep["parameters"] = {{"a", prm.a}, {"b", prm.b}, {"c", prm.c}, {"d", prm.d}};
    rep["tolerances"] = {{"root", 1e-13},
                         {"critical_band", critical_band},
                         {"unit_product_band", unit_product_band},
                         {"limit_tol", limit_tol}};

    const auto eqs = equilibria(prm);
    json je = json::array();
    for (const auto& e : eqs) je.push_back({{"value", e.value}, {"multiplier", e.multiplier}, {"stability", to_string(e.kind)}});
    rep["equilibria"] = je;

    const auto cycles = find_two_cycles(prm);
    json jc = json::array();
    for (const auto& c : cycles) jc.push_back(detail::cycle_json(c));
    rep["two_cycles"] = jc;

    const auto unit = unit_product_cycle(prm);
    rep["unit_product_cycle"] = unit ? detail::cycle_json(*unit) : json(nullptr);

    const auto cp = critical_points(prm);
    rep["critical_points"] = cp ? json{{"x_min", cp->x_min}, {"x_max", cp->x_max}} : json(nullptr);
    const auto esc = negative_escape_region(prm);
    rep["negative_escape_region"] = esc ? json{{"r", esc->r}, {"r_prime", esc->r_prime}} : json(nullptr);

    const auto cr = criteria_for(prm, unit);
    rep["criteria"] = {{"sigma", cr.sigma},
                       {"r_second_at_1", detail::gated(cr.r_second_at_1)},
                       {"kappa", detail::gated(cr.kappa)},
                       {"l", detail::gated(cr.l_value)},
                       {"s_second_at_q", detail::gated(cr.s_second_at_q)}};

    json jv = json::array();
    for (const auto& e : eqs) {
        json row;
        row["attractor"] = "equilibrium";
        row["values"] = json::array({e.value});
        try {
            row["verdict"] = detail::verdict_json(classify_equilibrium_limit(prm, e));
        } catch (const std::invalid_argument& ex) {
            row["verdict"] = nullptr;
            row["error"] = ex.what();
        }
        jv.push_back(row);
    }
    for (auto c : cycles) {
        if (unit && std::abs(c.p - unit->p) <= 1e-6 * std::max(1.0, unit->p)) c = *unit;
        json row;
        row["attractor"] = "two_cycle";
        row["values"] = json::array({c.p, c.q});
        row["verdict"] = detail::verdict_json(classify_cycle_limit(prm, c));
        jv.push_back(row);
    }
    if (const auto r = classify_remark(prm)) {
        json row;
        row["attractor"] = "invariant_interval";
        row["values"] = json::array();
        row["verdict"] = detail::verdict_json(*r);
        jv.push_back(row);
    }
    rep["verdicts"] = jv;
    return rep;
}

inline void write_report_text(std::ostream& os, const json& rep, float_style style) {
    auto num = [&](const json& v) { return v.is_null() ? std::string("n/a") : format_double(v.get<double>(), style); };
    const auto& p = rep["parameters"];
    os << "ratiodyn " << rep["tool_version"].get<std::string>() << " analysis\n";
    os << "parameters: a=" << num(p["a"]) << " b=" << num(p["b"]) << " c=" << num(p["c"]) << " d=" << num(p["d"]) << "\n";
    os << "equilibria:\n";
    for (const auto& e : rep["equilibria"])
        os << "  t = " << num(e["value"]) << "  phi' = " << num(e["multiplier"]) << "  ("
           << e["stability"].get<std::string>() << ")\n";
    os << "2-cycles:\n";
    for (const auto& c : rep["two_cycles"])
        os << "  (" << num(c["p"]) << ", " << num(c["q"]) << ")  pq = " << num(c["product"])
           << "  multiplier = " << num(c["multiplier"]) << (c["unit_product"].get<bool>() ? "  [unit product]" : "")
           << "\n";
    const auto& cr = rep["criteria"];
    os << "criteria:\n  b+2c+3d = " << num(cr["sigma"]) << "\n";
    for (const char* k : {"r_second_at_1", "kappa", "l", "s_second_at_q"})
        os << "  " << k << " = " << num(cr[k]["value"]) << (cr[k]["applicable"].get<bool>() ? "" : "  (inapplicable)")
           << "\n";
    os << "verdicts:\n";
    for (const auto& row : rep["verdicts"]) {
        os << "  " << row["attractor"].get<std::string>();
        for (const auto& v : row["values"]) os << " " << num(v);
        if (row["verdict"].is_null()) {
            os << ": " << row["error"].get<std::string>() << "\n";
            continue;
        }
        const auto& v = row["verdict"];
        os << ": " << v["class"].get<std::string>() << " [" << v["rule"].get<std::string>() << "]"
           << (v["conditional"].get<bool>() ? " (conditional)" : "") << "\n";
    }
}

/// Closed grid lo:hi:count with inclusive endpoints.
struct grid {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;

    double at(std::size_t i) const {
        if (count == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

inline grid parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("range must be lo:hi:count, got '" + s + "'");
    grid g{std::stod(parts[0]), std::stod(parts[1]), static_cast<std::size_t>(std::stoul(parts[2]))};
    if (g.count == 0) throw std::invalid_argument("range count must be positive");
    if (g.count > 1 && !(g.lo <= g.hi)) throw std::invalid_argument("range needs lo <= hi");
    return g;
}

/// --params value: four comma-separated numbers; a letter A/B/C/D in its own
/// slot marks that coefficient as swept.
struct param_spec {
    std::array<std::optional<double>, 4> values;
};

inline param_spec parse_params(const std::string& s) {
    param_spec out;
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 4) throw std::invalid_argument("--params needs four comma-separated values a,b,c,d");
    static constexpr std::array<char, 4> names{'a', 'b', 'c', 'd'};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& p = parts[i];
        if (p.size() == 1 && std::tolower(static_cast<unsigned char>(p[0])) == names[i]) continue;
        std::size_t used = 0;
        const double v = std::stod(p, &used);
        if (used != p.size()) throw std::invalid_argument("malformed number '" + p + "' in --params");
        out.values[i] = v;
    }
    return out;
}

inline parameters to_parameters(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }

struct sweep_row {
    std::vector<double> coords;
    std::string cls;
    std::string rule;
    bool conditional = false;
    std::string oracle;
    std::string agrees;
};

/// Evaluates every grid point; rows are written in row-major order
/// regardless of how many worker threads ran them.
inline std::vector<sweep_row> run_sweep(const param_spec& spec, const std::array<std::optional<grid>, 4>& ranges,
                                        double x0_ratio, std::size_t steps, unsigned threads) {
    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < 4; ++i)
        if (!spec.values[i]) axes.push_back(i);
    std::size_t total = 1;
    for (auto ax : axes) total *= ranges[ax]->count;

    std::vector<sweep_row> rows(total);
    auto work = [&](std::size_t idx) {
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i)
            if (spec.values[i]) v[i] = *spec.values[i];
        std::size_t rem = idx;
        sweep_row row;
        row.coords.resize(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            const auto& g = *ranges[axes[k]];
            v[axes[k]] = g.at(rem % g.count);
            row.coords[k] = v[axes[k]];
            rem /= g.count;
        }
        const auto prm = to_parameters(v);
        try {
            validate(prm);
            const auto vd = classify(prm, 1.0, x0_ratio, {.budget = steps});
            row.cls = to_string(vd.cls);
            row.rule = vd.rule;
            row.conditional = vd.conditional;
            row.oracle = vd.oracle ? to_string(*vd.oracle) : "";
            row.agrees = vd.oracle ? (vd.oracle_agrees() ? "true" : "false") : "";
        } catch (const std::invalid_argument&) {
            row.cls = "InvalidParameters";
        } catch (const numerical_error&) {
            row.cls = "NumericalFailure";
        }
        rows[idx] = std::move(row);
    };

    threads = std::max(1u, threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < total; ++i) work(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) work(i);
        });
    for (auto& th : pool) th.join();
    return rows;
}

/// Entry point shared by the ratiodyn executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis of x_{n+1} = (a x_n^3 + b x_n^2 x_{n-1} + c x_n x_{n-1}^2 + d x_{n-1}^3) / x_n^2", "ratiodyn"};
    std::string command;
    std::string params_text;
    std::optional<double> x_minus1, x0;
    std::optional<std::size_t> steps;
    double tol = 1e-8;
    std::string format;
    std::array<std::string, 4> range_text;
    double x0_ratio = 1.0;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    std::string float_text = "shortest";

    app.add_option("command", command, "analyze | simulate | classify | sweep | verify-paper")
        ->required()
        ->check(CLI::IsMember({"analyze", "simulate", "classify", "sweep", "verify-paper"}));
    app.add_option("--params", params_text, "coefficients a,b,c,d (letters mark swept coefficients)");
    app.add_option("--x-1", x_minus1, "initial value x_{-1}");
    app.add_option("--x0", x0, "initial value x_0");
    app.add_option("--steps", steps, "iteration budget");
    app.add_option("--tol", tol, "limit-detection tolerance")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "json | text | csv")->check(CLI::IsMember({"json", "text", "csv"}));
    app.add_option("--a-range", range_text[0], "sweep grid for a, lo:hi:count");
    app.add_option("--b-range", range_text[1], "sweep grid for b, lo:hi:count");
    app.add_option("--c-range", range_text[2], "sweep grid for c, lo:hi:count");
    app.add_option("--d-range", range_text[3], "sweep grid for d, lo:hi:count");
    app.add_option("--x0-ratio", x0_ratio, "initial ratio x_0 / x_{-1} for sweeps (x_{-1} = 1)");
    app.add_option("--threads", threads, "worker threads for sweep");
    app.add_option("--seed", seed, "seed for randomized checks");
    app.add_option("--float", float_text, "shortest | fixed17")->check(CLI::IsMember({"shortest", "fixed17"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return bad_arguments;
    }
    const float_style style = float_text == "fixed17" ? float_style::fixed17 : float_style::shortest;
    auto fmt = [&](double v) { return format_double(v, style); };

    try {
        if (command == "verify-paper") {
            const auto results = run_reference_checks(seed);
            bool all = true;
            for (const auto& r : results) {
                out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
                all = all && r.passed;
            }
            return all ? ok : fixture_mismatch;
        }

        if (params_text.empty()) throw std::invalid_argument("--params is required");
        const auto spec = parse_params(params_text);

        if (command == "sweep") {
            std::array<std::optional<grid>, 4> ranges;
            int swept = 0;
            for (std::size_t i = 0; i < 4; ++i) {
                if (!range_text[i].empty()) ranges[i] = parse_grid(range_text[i]);
                if (!spec.values[i]) {
                    ++swept;
                    if (!ranges[i]) throw std::invalid_argument("swept coefficient needs a matching --X-range");
                }
            }
            if (swept < 1 || swept > 2) throw std::invalid_argument("sweep needs one or two swept coefficients");
            if (!(x0_ratio > 0.0)) throw std::invalid_argument("--x0-ratio must be positive");
            const auto rows = run_sweep(spec, ranges, x0_ratio, steps.value_or(100000), threads);
            static constexpr std::array<const char*, 4> names{"a", "b", "c", "d"};
            for (std::size_t i = 0; i < 4; ++i)
                if (!spec.values[i]) out << names[i] << ",";
            out << "class,rule,conditional,oracle_class,oracle_agrees\n";
            for (const auto& r : rows) {
                for (double c : r.coords) out << fmt(c) << ",";
                out << r.cls << "," << r.rule << "," << (r.conditional ? "true" : "false") << "," << r.oracle << ","
                    << r.agrees << "\n";
            }
            return ok;
        }

        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!spec.values[i]) throw std::invalid_argument("placeholders are only allowed with sweep");
            v[i] = *spec.values[i];
        }
        const auto prm = to_parameters(v);
        validate(prm);

        if (command == "analyze") {
            const auto rep = analysis_report(prm, tol);
            if (format == "text") {
                write_report_text(out, rep, style);
            } else {
                detail::write_json(out, rep, style, 2);
                out << "\n";
            }
            return ok;
        }

        if (!x_minus1 || !x0) throw std::invalid_argument(command + " needs --x-1 and --x0");

        if (command == "simulate") {
            const auto tr = iterate_solution(prm, *x_minus1, *x0, steps.value_or(1000));
            out << "n,t_n,log10_abs_x_n,sign_x_n\n";
            for (long n = 0; n <= tr.last_index(); ++n)
                out << n << "," << fmt(tr.ratios[static_cast<std::size_t>(n)]) << "," << fmt(tr.log10_at(n)) << ","
                    << tr.sign_at(n) << "\n";
            if (tr.status == solution_status::stopped_division_by_zero) err << "iteration stopped: ratio reached zero\n";
            return ok;
        }

        // classify
        const auto vd = classify(prm, *x_minus1, *x0, {.budget = steps.value_or(100000), .tol = tol});
        if (format == "json") {
            detail::write_json(out, detail::verdict_json(vd), style, 2);
            out << "\n";
        } else {
            out << "class: " << to_string(vd.cls) << "\n";
            out << "rule: " << vd.rule << "\n";
            out << "conditional: " << (vd.conditional ? "true" : "false") << "\n";
            if (vd.monotonic_structure) out << "structure: " << *vd.monotonic_structure << "\n";
            if (vd.oracle)
                out << "oracle: " << to_string(*vd.oracle) << (vd.oracle_agrees() ? " (agrees)" : " (differs)") << "\n";
            if (!vd.notes.empty()) out << "notes: " << vd.notes << "\n";
        }
        return ok;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return bad_arguments;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return bad_arguments;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return bad_arguments;
    }
}

} // namespace ratiodyn::cli
