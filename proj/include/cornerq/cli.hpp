#pragma once

// Scenario runner behind tools/cornerq. Needs nlohmann/json (vendor/json.hpp).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflect.hpp"

namespace cornerq::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "0.1.0";

/// Shortest round-trip-safe text at 17 significant digits, locale independent.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

struct Check {
    std::string invariant;
    bool pass;
    double value;      ///< observed worst error or count
    double tolerance;  ///< threshold the value was held to
};

struct Table {
    std::string name;
    std::string csv;
};

struct Report {
    json scenario;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    json constants = json::object();
    json notes = json::array();
    std::vector<Table> tables;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    json summary() const {
        json out;
        out["scenario"] = scenario;
        out["passed"] = passed();
        json cs = json::array();
        for (const auto& c : checks)
            cs.push_back({{"invariant", c.invariant}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
        out["checks"] = std::move(cs);
        out["constants"] = constants;
        if (!notes.empty()) out["notes"] = notes;
        out["provenance"] = {{"version", version}, {"seed", seed}};
        return out;
    }
};

struct RunOptions {
    std::optional<std::size_t> trunc_order;
    std::optional<std::uint64_t> seed;
};

/// Grid of (r, phi) on L; n points per axis, endpoints included.
struct GridSpec {
    double r0, r1;
    int nr;
    double phi0, phi1;
    int nphi;

    static double at(double a, double b, int n, int i) { return n == 1 ? a : a + (b - a) * i / (n - 1); }
};

/**
 * CSV rows r, phi, re_u, im_f, status in phi-major order. Points outside the
 * evaluator's domain keep their row with status "outside".
 */
inline std::string emit_grid(const SurfaceFunction& f, const GridSpec& g,
                             const std::function<double(const LPoint&)>& u = {}) {
    std::string out = "r,phi,re_u,im_f,status\n";
    for (int j = 0; j < g.nphi; ++j) {
        const double phi = GridSpec::at(g.phi0, g.phi1, g.nphi, j);
        for (int i = 0; i < g.nr; ++i) {
            const double r = GridSpec::at(g.r0, g.r1, g.nr, i);
            const LPoint z{r, phi};
            std::string re = "nan", im = "nan", status = "ok";
            try {
                const complex v = f(z);
                re = format_double(u ? u(z) : v.real());
                im = format_double(v.imag());
            } catch (const outside_extension&) {
                status = "outside";
            } catch (const out_of_radius&) {
                status = "outside";
            }
            out += format_double(r) + ',' + format_double(phi) + ',' + re + ',' + im + ',' + status + '\n';
        }
    }
    return out;
}

namespace detail {

inline const json& need(const json& j, const std::string& key, const std::string& at) {
    if (!j.is_object()) throw schema_error(at + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw schema_error(at + "." + key + ": missing");
    return *it;
}

inline double number(const json& j, const std::string& at) {
    if (!j.is_number()) throw schema_error(at + ": expected a number");
    return j.get<double>();
}

inline double number(const json& j, const std::string& key, const std::string& at) {
    return number(need(j, key, at), at + "." + key);
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& at) {
    return j.contains(key) ? number(j, key, at) : fallback;
}

inline std::int64_t integer(const json& j, const std::string& at) {
    if (!j.is_number_integer()) throw schema_error(at + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::int64_t integer(const json& j, const std::string& key, const std::string& at) {
    return integer(need(j, key, at), at + "." + key);
}

inline std::int64_t integer_or(const json& j, const std::string& key, std::int64_t fallback, const std::string& at) {
    return j.contains(key) ? integer(j.at(key), at + "." + key) : fallback;
}

inline double positive(double x, const std::string& at) {
    if (!(x > 0.0)) throw schema_error(at + ": must be positive");
    return x;
}

inline std::string string_field(const json& j, const std::string& key, const std::string& at) {
    const json& v = need(j, key, at);
    if (!v.is_string()) throw schema_error(at + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline AngleDescriptor parse_theta(const json& j, const std::string& at) {
    const std::string kind = string_field(j, "kind", at);
    try {
        if (kind == "rational_pi") return AngleDescriptor::rational_pi(integer(j, "p", at), integer(j, "q", at));
        if (kind == "irrational") return AngleDescriptor::irrational(number(j, "value", at));
        if (kind == "undeclared") return AngleDescriptor::undeclared(number(j, "value", at));
    } catch (const std::invalid_argument& e) {
        throw schema_error(at + ": " + e.what());
    }
    throw schema_error(at + ".kind: expected rational_pi, irrational or undeclared");
}

/// "p/q" or an integer is exact; any other number is a real exponent.
inline Exponent parse_exponent(const json& j, const std::string& at) {
    try {
        if (j.is_number_integer()) return Exponent::integer(j.get<std::int64_t>());
        if (j.is_number()) return Exponent::real(j.get<double>());
        if (j.is_string()) {
            const std::string s = j.get<std::string>();
            const auto slash = s.find('/');
            std::int64_t p = 0, q = 1;
            const char* end = s.data() + s.size();
            const char* mid = slash == std::string::npos ? end : s.data() + slash;
            if (std::from_chars(s.data(), mid, p).ptr != mid) throw schema_error(at + ": bad rational '" + s + "'");
            if (mid != end && std::from_chars(mid + 1, end, q).ptr != end)
                throw schema_error(at + ": bad rational '" + s + "'");
            return Exponent::rational(p, q);
        }
    } catch (const std::invalid_argument& e) {
        throw schema_error(at + ": " + e.what());
    }
    throw schema_error(at + ": expected an exponent (integer, number or \"p/q\")");
}

inline std::vector<WedgeTerm> parse_edge(const json& j, const std::string& key, const std::string& at) {
    std::vector<WedgeTerm> out;
    if (!j.contains(key)) return out;
    const json& arr = j.at(key);
    if (!arr.is_array()) throw schema_error(at + "." + key + ": expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = at + "." + key + "[" + std::to_string(i) + "]";
        out.push_back({parse_exponent(need(arr[i], "beta", where), where + ".beta"), number(arr[i], "coeff", where)});
    }
    return out;
}

inline WedgeProblem parse_wedge(const json& j, const std::string& at) {
    WedgeProblem p{parse_theta(need(j, "theta", at), at + ".theta"), parse_edge(j, "edge0", at),
                   parse_edge(j, "edge1", at)};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw schema_error(at + ": " + e.what());
    }
    return p;
}

inline GridSpec parse_grid(const json& j, const std::string& at) {
    auto axis = [&](const std::string& key) {
        const json& a = need(j, key, at);
        const std::string where = at + "." + key;
        if (!a.is_array() || a.size() != 3) throw schema_error(where + ": expected [min, max, n]");
        const std::int64_t n = integer(a[2], where + "[2]");
        if (n < 1 || n > 100000) throw schema_error(where + "[2]: point count out of range");
        return std::tuple{number(a[0], where + "[0]"), number(a[1], where + "[1]"), static_cast<int>(n)};
    };
    const auto [r0, r1, nr] = axis("r");
    const auto [p0, p1, np] = axis("phi");
    if (!(r0 > 0.0) || !(r1 >= r0)) throw schema_error(at + ".r: need 0 < min <= max");
    return {r0, r1, nr, p0, p1, np};
}

/// Positive tolerance from scenario["tolerances"][key], or the default.
inline double tolerance(const json& s, const std::string& key, double fallback) {
    if (!s.contains("tolerances")) return fallback;
    const json& t = s.at("tolerances");
    if (!t.is_object()) throw schema_error("$.tolerances: expected an object");
    if (!t.contains(key)) return fallback;
    return positive(number(t.at(key), "$.tolerances." + key), "$.tolerances." + key);
}

inline double uniform(std::mt19937_64& gen, double a, double b) { return a + (b - a) * cornerq::detail::unit_draw(gen); }

inline void check(Report& rep, std::string name, double value, double tol) {
    rep.checks.push_back({std::move(name), value <= tol, value, tol});
}

inline std::string expansion_csv(const LogPowerSeries& s) {
    std::string out = "alpha,log_power,re,im\n";
    for (const auto& t : s.terms())
        for (std::size_t m = 0; m < t.poly.size(); ++m)
            out += format_double(t.alpha.value()) + ',' + std::to_string(m) + ',' + format_double(t.poly[m].real()) +
                   ',' + format_double(t.poly[m].imag()) + '\n';
    return out;
}

/// Fourth-order five-point-per-axis Laplacian on z's sheet.
inline double laplacian(const std::function<double(const LPoint&)>& u, const LPoint& z, double h) {
    double sum = -60.0 * u(z);
    for (complex d : {complex{1, 0}, complex{0, 1}}) {
        sum += 16.0 * (u(offset(z, h * d)) + u(offset(z, -h * d)));
        sum -= u(offset(z, 2.0 * h * d)) + u(offset(z, -2.0 * h * d));
    }
    return sum / (12.0 * h * h);
}

inline double edge_value(const std::vector<WedgeTerm>& e, double t) {
    double v = 0.0;
    for (const auto& w : e) v += w.coeff * std::pow(t, w.beta.value());
    return v;
}

inline bool any_resonant(const WedgeProblem& p) {
    for (const auto* e : {&p.edge0, &p.edge1})
        for (const auto& t : *e)
            if (t.beta.value() != 0.0 && is_resonant(p.theta, t.beta)) return true;
    return false;
}

inline void run_wedge(const json& s, Report& rep, std::mt19937_64& gen) {
    const WedgeProblem p = parse_wedge(s, "$");
    const double R = number_or(s, "R", 3.0, "$");
    const auto sol = wedge_solve(p);
    const double theta = p.theta.value();
    const auto samples = integer_or(s, "samples", 1000, "$");
    if (samples < 1) throw schema_error("$.samples: must be positive");

    double lap = 0.0, completion = 0.0, b0 = 0.0, b1 = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const LPoint z{uniform(gen, 0.3, 1.0), theta * uniform(gen, 0.02, 0.98)};
        const double u = sol.evaluator.u(z);
        lap = std::max(lap, std::abs(laplacian(sol.evaluator.u, z, 1e-3)) / (1.0 + std::abs(u)));
        completion = std::max(completion, std::abs(sol.evaluator.f(z).real() - u) / std::max(1.0, std::abs(u)));
        const double t = uniform(gen, 0.01, 1.0);
        b0 = std::max(b0, std::abs(sol.evaluator.u({t, 0.0}) - edge_value(p.edge0, t)));
        b1 = std::max(b1, std::abs(sol.evaluator.u({t, theta}) - edge_value(p.edge1, t)));
    }
    check(rep, "harmonicity", lap, tolerance(s, "harmonicity", 1e-4));
    check(rep, "boundary_edge0", b0, tolerance(s, "boundary", 1e-10));
    check(rep, "boundary_edge1", b1, tolerance(s, "boundary", 1e-10));
    check(rep, "completion_real_part", completion, tolerance(s, "completion", 1e-12));
    const bool logs = !is_log_free(sol.expansion);
    check(rep, "log_term_iff_resonant", logs == any_resonant(p) ? 0.0 : 1.0, 0.0);
    rep.constants["log_free"] = !logs;
    rep.tables.push_back({"expansion", expansion_csv(truncate(sol.expansion, R))});
    if (s.contains("grid"))
        rep.tables.push_back({"grid", emit_grid(sol.evaluator.f, parse_grid(s.at("grid"), "$.grid"), sol.evaluator.u)});
}

inline std::vector<ReflectionState> wedge_states(const WedgeProblem& p, const json& s, std::size_t order,
                                                 int min_steps) {
    const auto steps = integer(s, "steps", "$");
    if (steps < min_steps || steps > 60)
        throw schema_error("$.steps: must lie in [" + std::to_string(min_steps) + ", 60]");
    ReflectionOptions opt;
    opt.order = order;
    if (s.contains("s")) opt.s = positive(number(s, "s", "$"), "$.s");
    return iterate(init(wedge_corner(p), opt), static_cast<int>(steps));
}

inline void envelope_checks(const std::vector<ReflectionState>& states, Report& rep) {
    const Envelope env = envelope(states);
    const EnvelopeCheck ec = verify_envelope(states, env);
    check(rep, "envelope_window_containment", static_cast<double>(ec.window_violations), 0.0);
    check(rep, "envelope_quadratic_containment", static_cast<double>(ec.quadratic_violations), 0.0);
    rep.constants["K"] = env.K;
    rep.constants["c"] = env.Q.c;
    rep.constants["C"] = env.Q.C;
}

inline void run_reflect(const json& s, Report& rep, std::mt19937_64& gen, std::size_t order) {
    const json& corner = need(s, "corner", "$");
    const WedgeProblem p = parse_wedge(corner, "$.corner");
    const double R = number_or(s, "R", 3.0, "$");
    const auto sol = wedge_solve(p);
    const auto states = wedge_states(p, s, order, 1);
    const auto& first = states.front();

    double drift = 0.0, angle = 0.0, modulus = 0.0, denom = 0.0;
    for (const auto& st : states) {
        const double scale = std::pow(100.0, 1 - st.k);
        drift = std::max({drift, std::abs(st.s - first.s * scale) / (first.s * scale),
                          std::abs(st.r - first.r * scale) / (first.r * scale)});
        angle = std::max(angle, std::abs(st.phi.a().phi() - st.alpha - std::ldexp(first.theta.value(), st.k - 1)));
        modulus = std::max(modulus, std::abs(st.phi.a().r() - 1.0));
        if (st.h.denominator() != first.h.denominator() && !st.h.is_zero() && !first.h.is_zero()) denom = 1.0;
    }
    check(rep, "radius_recursion", drift, tolerance(s, "radius", 1e-12));
    check(rep, "angle_doubling", angle, tolerance(s, "angle", 1e-10));
    check(rep, "unit_modulus", modulus, tolerance(s, "modulus", 1e-10));
    check(rep, "denominator_stability", denom, 0.0);

    const auto samples = integer_or(s, "samples", 100, "$");
    if (samples < 1) throw schema_error("$.samples: must be positive");
    double oracle = 0.0, boundary = 0.0;
    std::int64_t taken = 0;
    for (int attempt = 0; taken < samples && attempt < 100 * samples; ++attempt) {
        const auto& st = states[static_cast<std::size_t>(attempt) % states.size()];
        const LPoint z{st.s * uniform(gen, 1e-3, 0.5), st.alpha + (st.phi.a().phi() - st.alpha) * uniform(gen, 0, 1)};
        if (!membership(states, z)) continue;
        ++taken;
        const complex exact = sol.evaluator.f(z);
        oracle = std::max(oracle, std::abs(extend_eval(states, sol.evaluator.f, z) - exact) /
                                      std::max(std::abs(exact), 1e-300));
    }
    check(rep, "oracle_equivalence", taken == samples ? oracle : INFINITY, tolerance(s, "oracle", 1e-8));
    for (std::size_t k = 1; k < states.size(); ++k) {
        for (int i = 0; i < 10; ++i) {
            const LPoint z = apply(states[k - 1].phi, LPoint(states[k].s * uniform(gen, 0.05, 0.5), 0.0));
            boundary = std::max(boundary, std::abs(extend_eval(states, sol.evaluator.f, z).real() -
                                                   eval(states[k - 1].h, z).real()));
        }
    }
    if (states.size() > 1) check(rep, "re_boundary_condition", boundary, tolerance(s, "boundary", 1e-8));
    const bool log_free = is_log_free(truncate(sol.expansion, R));
    check(rep, "is_log_free", log_free == !any_resonant(p) ? 0.0 : 1.0, 0.0);
    rep.constants["log_free"] = log_free;
    if (states.size() >= 3) envelope_checks(states, rep);
    rep.notes.push_back("D_k membership uses angular windows of half-width pi/2 around arg a(phi_k)");

    rep.tables.push_back({"expansion", expansion_csv(truncate(sol.expansion, R))});
    if (s.contains("grid")) {
        const SurfaceFunction ext = [&](const LPoint& z) { return extend_eval(states, sol.evaluator.f, z); };
        rep.tables.push_back({"grid", emit_grid(ext, parse_grid(s.at("grid"), "$.grid"))});
    }
}

inline void run_expansion_compare(const json& s, Report& rep, std::mt19937_64& gen, std::size_t order) {
    const json& corner = need(s, "corner", "$");
    const WedgeProblem p = parse_wedge(corner, "$.corner");
    const double R = number(s, "R", "$");
    const std::string expect = string_field(s, "expect", "$");
    if (expect != "pass" && expect != "fail") throw schema_error("$.expect: expected pass or fail");
    const bool strip = s.contains("strip_log") && need(s, "strip_log", "$").get<bool>();
    std::optional<double> next;
    if (s.contains("next_support")) next = number(s, "next_support", "$");
    const auto sol = wedge_solve(p);
    const auto states = wedge_states(p, s, order, 1);

    LogPowerSeries gamma = truncate(sol.expansion, R);
    if (strip) {
        std::vector<LogPowerTerm> terms;
        for (auto t : gamma.terms()) {
            t.poly.resize(1);
            terms.push_back(std::move(t));
        }
        gamma = LogPowerSeries(std::move(terms));
    }
    CertifyOptions opt;
    opt.samples_per_step = static_cast<std::size_t>(integer_or(s, "samples", 200, "$"));
    const auto cert = certify_expansion(states, sol.evaluator.f, gamma, R, next, gen, opt);
    check(rep, "certificate_matches_expectation", cert.holds() == (expect == "pass") ? 0.0 : 1.0, 0.0);
    rep.constants["R"] = cert.R;
    rep.constants["R_prime"] = cert.R_prime;
    rep.constants["S"] = cert.S;
    rep.constants["A"] = cert.A;
    rep.constants["C_k"] = cert.C;
    rep.constants["certificate_holds"] = cert.holds();
    rep.constants["gamma_log_free"] = is_log_free(gamma);
    std::string csv = "k,C,t,window_samples,window_violations,worst_window_ratio\n";
    for (const auto& st : cert.steps)
        csv += std::to_string(st.k) + ',' + format_double(st.C) + ',' + format_double(st.t) + ',' +
               std::to_string(st.window_samples) + ',' + std::to_string(st.window_violations) + ',' +
               format_double(st.worst_window_ratio) + '\n';
    rep.tables.push_back({"certificate", std::move(csv)});
}

inline std::vector<double> coefficient_list(const json& j, const std::string& key, const std::string& at) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const json& a = j.at(key);
    if (!a.is_array()) throw schema_error(at + "." + key + ": expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], at + "." + key + "[" + std::to_string(i) + "]"));
    return out;
}

inline int node_count(const json& s) {
    const auto n = integer_or(s, "nodes", 1024, "$");
    if (n < 16 || n > (1 << 20)) throw schema_error("$.nodes: must lie in [16, 2^20]");
    return static_cast<int>(n);
}

/// Boundary data a0 + sum a_n cos(n phi) + b_n sin(n phi), n >= 1.
inline void run_poisson(const json& s, Report& rep, std::mt19937_64& gen) {
    const json& b = need(s, "boundary", "$");
    const double a0 = number_or(b, "a0", 0.0, "$.boundary");
    const auto a = coefficient_list(b, "cos", "$.boundary");
    const auto bs = coefficient_list(b, "sin", "$.boundary");
    const int nodes = node_count(s);
    const auto samples = integer_or(s, "samples", 100, "$");
    const double rmax = number_or(s, "rmax", 0.9, "$");
    if (!(rmax > 0.0 && rmax < 1.0)) throw schema_error("$.rmax: must lie in (0, 1)");

    const PlanarFunction h = [&](complex e) {
        const double phi = std::arg(e);
        double v = a0;
        for (std::size_t n = 0; n < a.size(); ++n) v += a[n] * std::cos((n + 1) * phi);
        for (std::size_t n = 0; n < bs.size(); ++n) v += bs[n] * std::sin((n + 1) * phi);
        return v;
    };
    std::string csv = "x,y,value,exact\n";
    double mean = 0.0, linear = 0.0, closed = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const complex xi = std::polar(rmax * std::sqrt(uniform(gen, 0, 1)), uniform(gen, -std::numbers::pi, std::numbers::pi));
        mean = std::max(mean, std::abs(poisson_disk([](complex) { return 1.0; }, xi, nodes) - 1.0));
        linear = std::max(linear, std::abs(poisson_disk([](complex e) { return e.real(); }, xi, nodes) - xi.real()));
        double exact = a0;
        const double rho = std::abs(xi), arg = std::arg(xi);
        for (std::size_t n = 0; n < a.size(); ++n) exact += a[n] * std::pow(rho, n + 1) * std::cos((n + 1) * arg);
        for (std::size_t n = 0; n < bs.size(); ++n) exact += bs[n] * std::pow(rho, n + 1) * std::sin((n + 1) * arg);
        const double v = poisson_disk(h, xi, nodes);
        closed = std::max(closed, std::abs(v - exact));
        csv += format_double(xi.real()) + ',' + format_double(xi.imag()) + ',' + format_double(v) + ',' +
               format_double(exact) + '\n';
    }
    check(rep, "mean_value", mean, tolerance(s, "mean_value", 1e-10));
    check(rep, "re_eta_extension", linear, tolerance(s, "re_eta", 1e-6));
    check(rep, "fourier_closed_form", closed, tolerance(s, "closed_form", 1e-6));
    rep.tables.push_back({"poisson", std::move(csv)});
}

inline void run_green(const json& s, Report& rep, std::mt19937_64& gen) {
    const auto solver = disk_solver(node_count(s));
    const auto samples = integer_or(s, "samples", 100, "$");
    const double rmax = number_or(s, "rmax", 0.9, "$");
    if (!(rmax > 0.0 && rmax < 1.0)) throw schema_error("$.rmax: must lie in (0, 1)");
    auto draw = [&] {
        return std::polar(rmax * std::sqrt(uniform(gen, 0, 1)), uniform(gen, -std::numbers::pi, std::numbers::pi));
    };
    std::string csv = "x_re,x_im,y_re,y_im,green,closed_form\n";
    double closed = 0.0, sym = 0.0, negative = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const complex x = draw(), y = draw();
        const double g = green_function(solver, y, x);
        const double exact = std::log(std::abs(1.0 - x * std::conj(y)) / std::abs(x - y));
        closed = std::max(closed, std::abs(g - exact));
        sym = std::max(sym, std::abs(g - green_function(solver, x, y)));
        negative = std::max(negative, -g);
        csv += format_double(x.real()) + ',' + format_double(x.imag()) + ',' + format_double(y.real()) + ',' +
               format_double(y.imag()) + ',' + format_double(g) + ',' + format_double(exact) + '\n';
    }
    check(rep, "disk_closed_form", closed, tolerance(s, "closed_form", 1e-5));
    check(rep, "symmetry", sym, tolerance(s, "symmetry", 1e-5));
    check(rep, "positivity", std::max(negative, 0.0), tolerance(s, "positivity", 1e-10));
    rep.tables.push_back({"green", std::move(csv)});
}

inline void run_envelope(const json& s, Report& rep, std::size_t order) {
    const json& corner = need(s, "corner", "$");
    const WedgeProblem p = parse_wedge(corner, "$.corner");
    const auto steps = integer(s, "steps", "$");
    if (steps < 1 || steps > 60) throw schema_error("$.steps: must lie in [1, 60]");
    ReflectionOptions opt;
    opt.order = order;
    if (s.contains("s")) opt.s = positive(number(s, "s", "$"), "$.s");
    const auto states = iterate(init(wedge_corner(p), opt), static_cast<int>(steps));
    envelope_checks(states, rep);
    const Envelope env = envelope(states);
    std::string csv = "x,radius,window,quadratic\n";
    const double theta = states.front().theta.value();
    for (int i = 0; i <= 200; ++i) {
        const double x = std::pow(1e4, i / 200.0);
        const int k = cornerq::detail::window_index(theta, x);
        csv += format_double(x) + ',' + format_double(std::pow(env.K, -cornerq::detail::log_plus(x))) + ',' +
               format_double(states.front().s * std::pow(100.0, 1 - k)) + ',' + format_double(env.Q.bound(x)) + '\n';
    }
    rep.tables.push_back({"envelope", std::move(csv)});
}

} // namespace detail

/// Runs one parsed scenario. Malformed input raises schema_error, domain failures scenario_error.
inline Report run(const json& s, const RunOptions& opt = {}) {
    if (!s.is_object()) throw schema_error("$: expected an object");
    const std::string kind = detail::string_field(s, "scenario", "$");
    Report rep;
    rep.scenario = s;
    rep.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(detail::integer_or(s, "seed", 0, "$"));
    const auto order_in = detail::integer_or(s, "trunc_order", static_cast<std::int64_t>(default_trunc_order), "$");
    if (order_in < 1 || order_in > 512) throw schema_error("$.trunc_order: must lie in [1, 512]");
    const std::size_t order = opt.trunc_order ? *opt.trunc_order : static_cast<std::size_t>(order_in);
    std::mt19937_64 gen(rep.seed);
    try {
        if (kind == "wedge") detail::run_wedge(s, rep, gen);
        else if (kind == "reflect") detail::run_reflect(s, rep, gen, order);
        else if (kind == "expansion_compare") detail::run_expansion_compare(s, rep, gen, order);
        else if (kind == "poisson") detail::run_poisson(s, rep, gen);
        else if (kind == "green") detail::run_green(s, rep, gen);
        else if (kind == "envelope") detail::run_envelope(s, rep, order);
        else throw schema_error("$.scenario: unknown kind '" + kind + "'");
    } catch (const schema_error&) {
        throw;
    } catch (const json::exception& e) {
        throw schema_error(std::string("$: ") + e.what());
    } catch (const std::exception& e) {
        throw scenario_error("$ (" + kind + "): " + e.what());
    }
    return rep;
}

inline json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw schema_error(path.string() + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw schema_error(path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline Report run_file(const std::filesystem::path& path, const RunOptions& opt = {}) {
    const json s = parse_file(path);
    try {
        return run(s, opt);
    } catch (const schema_error& e) {
        throw schema_error(path.string() + ": " + e.what());
    } catch (const scenario_error& e) {
        throw scenario_error(path.string() + ": " + e.what());
    }
}

/// summary.json plus one CSV per table.
inline void write_report(const Report& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "summary.json", std::ios::binary);
        out << rep.summary().dump(2) << '\n';
    }
    for (const auto& t : rep.tables) {
        std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
        out << t.csv;
    }
}

} // namespace cornerq::cli
