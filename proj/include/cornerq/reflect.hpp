#pragma once

/**
 * @file reflect.hpp
 * @brief Iterated Schwarz reflection across the moving second boundary curve.
 *
 * State k carries phi_k (Gamma'_k = phi_k(]0, eps_k[)) and the series h_k with
 * Re f_k = Re h_k on Gamma'_k. One step reflects across Gamma'_k with
 * sigma_k = phi_k o tau o phi_k^{-1}:
 *
 *   phi_{k+1} = sigma_k o psi o tau,
 *   h_{k+1}   = -conj((h0 - h_k) o sigma_k) + h_k,
 *   f_{k+1}   = -conj((f_k - h_k) o sigma_k) + h_k   beyond Gamma'_k.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "compose.hpp"
#include "corner.hpp"
#include "errors.hpp"
#include "germs.hpp"
#include "logpower.hpp"
#include "lsurf.hpp"
#include "series.hpp"

namespace cornerq {

struct ReflectionState {
    int k;
    double r;
    double s;
    Germ phi;
    Germ phi_inv;
    PuiseuxSeries h;
    Germ psi;
    Germ psi_inv;
    PuiseuxSeries h0;
    double alpha;
    AngleDescriptor theta;
    std::size_t order;
};

struct ReflectionOptions {
    std::optional<double> r;  ///< r_1; default min of the radii of psi, chi and their inverses
    std::optional<double> s;  ///< s_1; default min{r_1, radii of h0 and h1, 1}
    std::size_t order = default_trunc_order;
};

/// Complex-valued function on a region of L (f_1 on the corner).
using SurfaceFunction = std::function<complex(const LPoint&)>;

inline ReflectionState init(const CornerSpec& corner, const ReflectionOptions& opt = {}) {
    if (!corner.normalized()) throw not_normalized("reflection needs k(psi) = k(chi) = 1 and |a| = 1");
    if (!(corner.psi().a().phi() < corner.chi().a().phi()))
        throw not_normalized("reflection needs arg a(psi) < arg a(chi)");
    const std::size_t order = opt.order;
    Germ psi_inv = invert(corner.psi(), order);
    Germ chi_inv = invert(corner.chi(), order);
    PuiseuxSeries h0 = compose_germ(corner.g0(), psi_inv, order);
    PuiseuxSeries h1 = compose_germ(corner.g1(), chi_inv, order);
    const double r = opt.r.value_or(
        std::min({corner.psi().radius(), corner.chi().radius(), psi_inv.radius(), chi_inv.radius()}));
    const double s = opt.s.value_or(std::min({r, h0.radius(), h1.radius(), 1.0}));
    if (!(s > 0.0) || !(s <= r)) throw std::invalid_argument("reflection needs 0 < s <= r");
    return {1,
            r,
            s,
            corner.chi(),
            std::move(chi_inv),
            std::move(h1),
            corner.psi(),
            std::move(psi_inv),
            std::move(h0),
            corner.psi().a().phi(),
            corner.theta(),
            order};
}

inline ReflectionState step(const ReflectionState& st) {
    const std::size_t N = st.order;
    Germ phi = compose(compose(st.phi, tau_conj(st.phi_inv), N), tau_conj(st.psi), N);
    Germ phi_inv = invert(phi, N);
    const PuiseuxSeries diff = sub(st.h0, st.h);
    const PuiseuxSeries reflected = compose_germ(conj_tau(compose_germ(diff, st.phi, N)), st.phi_inv, N);
    PuiseuxSeries h = sub(st.h, reflected);
    h = h.with_radius(std::min(h.radius(), st.s / 4.0));
    return {st.k + 1,     st.r * 0.01, st.s * 0.01, std::move(phi), std::move(phi_inv), std::move(h),
            st.psi,       st.psi_inv,  st.h0,       st.alpha,       st.theta,           st.order};
}

/// States 1..k_max.
inline std::vector<ReflectionState> iterate(ReflectionState first, int k_max) {
    if (k_max < 1) throw std::invalid_argument("iterate needs k_max >= 1");
    std::vector<ReflectionState> out{std::move(first)};
    while (static_cast<int>(out.size()) < k_max) out.push_back(step(out.back()));
    return out;
}

/// sigma_k(z) = phi_k(tau(phi_k^{-1}(z))).
inline LPoint reflect_point(const ReflectionState& st, const LPoint& z) {
    return apply(st.phi, tau(apply(st.phi_inv, z)));
}

namespace detail {

inline bool in_window(double phi, double anchor) { return std::abs(phi - anchor) <= std::numbers::pi / 2.0; }

/// Angular slack for points on Gamma itself; reflections of Gamma'_k land there up to rounding.
inline constexpr double gamma_slack = 1e-12;

/// On Gamma or past it, on the corner's side.
inline bool past_gamma(const ReflectionState& st, const LPoint& z) {
    if (in_window(z.phi(), st.alpha) && z.r() < st.psi_inv.radius())
        return apply(st.psi_inv, z).phi() >= -gamma_slack;
    return z.phi() > st.alpha;
}

/// Not past Gamma'_k (the curve itself included).
inline bool before_gamma_prime(const ReflectionState& st, const LPoint& z) {
    const double anchor = st.phi.a().phi();
    if (in_window(z.phi(), anchor) && z.r() < st.phi_inv.radius()) return apply(st.phi_inv, z).phi() <= 0.0;
    return z.phi() < anchor;
}

} // namespace detail

/**
 * Smallest k with z in D_k inside B(s_k): |z| < s_k and z between Gamma and
 * Gamma'_k. Within pi/2 of a curve's anchor arg a(.) the side is decided
 * exactly through the inverse germ; outside, by comparing arg z to the anchor.
 */
inline std::optional<int> membership(const std::vector<ReflectionState>& states, const LPoint& z) {
    if (states.empty() || !detail::past_gamma(states.front(), z)) return std::nullopt;
    for (const auto& st : states) {
        if (z.r() < st.s && detail::before_gamma_prime(st, z)) return st.k;
    }
    return std::nullopt;
}

/// f on the union of the D_k, by descending through reflections to f_1 = base.
inline complex extend_eval(const std::vector<ReflectionState>& states, const SurfaceFunction& base, const LPoint& z) {
    struct Frame {
        LPoint z;
        LPoint w;
        const ReflectionState* st;
    };
    std::vector<Frame> stack;
    LPoint cur = z;
    for (;;) {
        const auto j = membership(states, cur);
        if (!j) throw outside_extension("point outside the computed extension region");
        if (*j == 1) break;
        if (stack.size() >= states.size()) throw outside_extension("reflection depth exceeded k_max");
        const ReflectionState& st = states[static_cast<std::size_t>(*j) - 2];
        const LPoint w = reflect_point(st, cur);
        stack.push_back({cur, w, &st});
        cur = w;
    }
    complex value = base(cur);
    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        value = -std::conj(value - eval(fr.st->h, fr.w)) + eval(fr.st->h, fr.z);
    }
    return value;
}

/// The corner seen through tau: Gamma and Gamma' swap, data conjugated. Runs the negative direction.
inline CornerSpec negative_corner(const CornerSpec& c) {
    return {tau_conj(c.chi()), tau_conj(c.psi()), c.theta(), conj_tau(c.g1()), conj_tau(c.g0()), c.eps()};
}

/// f on the tau-image: z -> conj(f(tau z)).
inline SurfaceFunction mirrored(SurfaceFunction f) {
    return [f = std::move(f)](const LPoint& z) { return std::conj(f(tau(z))); };
}

struct Envelope {
    double K;
    QuadraticDomain Q;  ///< in the variable phi - alpha
};

namespace detail {

inline double log_plus(double x) { return std::max(1.0, std::log(x)); }

/// 2^{k-1} theta - pi/2.
inline double reach(double theta, int k) { return std::ldexp(theta, k - 1) - std::numbers::pi / 2.0; }

/// Smallest k with x < reach(theta, k).
inline int window_index(double theta, double x) {
    int k = 1;
    while (!(x < reach(theta, k))) ++k;
    return k;
}

} // namespace detail

/**
 * K with {phi - alpha = x >= 1, r < K^{-log+ x}} inside the union of the
 * windows {r < s_1 100^{1-k}, 0 < x < 2^{k-1} theta - pi/2}, and the quadratic
 * domain (1, log K). The recursions are exact, so windows beyond k_max are
 * continued from them; the supremum over breakpoints is taken together with
 * its limit log 100 / log 2.
 */
inline Envelope envelope(const std::vector<ReflectionState>& states) {
    if (states.size() < 3) throw insufficient_steps("envelope needs at least 3 states");
    const double theta = states.front().theta.value();
    const double ln_s = std::log(states.front().s);
    const double ln100 = std::log(100.0);
    double ln_k = ln100 / std::log(2.0);
    // On [max(1, reach(k-1)), reach(k)) the window index is k; the worst x is the left end.
    for (int k = 1; k < 1100; ++k) {
        const double right = detail::reach(theta, k);
        if (!(right > 1.0)) continue;
        const double left = std::max(1.0, detail::reach(theta, k - 1));
        ln_k = std::max(ln_k, ((k - 1) * ln100 - ln_s) / detail::log_plus(left));
    }
    ln_k = std::max(ln_k, 1e-3) * (1.0 + 1e-9);
    const double K = std::exp(ln_k);
    // Equality at x = 1; the margin absorbs exp/pow rounding.
    return {K, QuadraticDomain(1.0, std::log(K) * (1.0 + 1e-12))};
}

struct EnvelopeCheck {
    std::size_t samples = 0;
    std::size_t window_violations = 0;     ///< K-envelope not covered by the windows
    std::size_t quadratic_violations = 0;  ///< c exp(-C sqrt x) > K^{-log+ x}

    bool holds() const noexcept { return window_violations == 0 && quadratic_violations == 0; }
};

/// Both containments on `samples` log-spaced x = phi - alpha in [1, x_max].
inline EnvelopeCheck verify_envelope(const std::vector<ReflectionState>& states, const Envelope& env,
                                     std::size_t samples = 10000, double x_max = 1e4) {
    const double theta = states.front().theta.value();
    const double s = states.front().s;
    EnvelopeCheck out;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
        const double x = std::exp(t * std::log(x_max));
        const double radius = std::pow(env.K, -detail::log_plus(x));
        const int k = detail::window_index(theta, x);
        const double window = s * std::pow(100.0, 1 - k);
        ++out.samples;
        if (!(radius <= window)) ++out.window_violations;
        if (!(env.Q.bound(x) <= radius)) ++out.quadratic_violations;
    }
    return out;
}

struct StepReport {
    int k;
    double C;            ///< max |f - gamma| / |z|^{R'}
    double t;            ///< window radius A^{-k/(R'-S)}
    std::size_t window_samples;
    std::size_t window_violations;
    double worst_window_ratio;  ///< max |f - gamma| / |z|^S on the window
};

struct ExtensionCertificate {
    double R;
    double R_prime;
    double S;
    std::vector<double> C;
    double A;
    std::vector<StepReport> steps;

    bool holds() const {
        for (std::size_t i = 0; i < C.size(); ++i)
            if (!(C[i] <= std::pow(A, static_cast<double>(i + 1)))) return false;
        return std::all_of(steps.begin(), steps.end(), [](const StepReport& s) { return s.window_violations == 0; });
    }
};

struct CertifyOptions {
    std::size_t samples_per_step = 200;
    double safety = 1.1;
};

/**
 * R' = R + (upper - R)/2 with upper the least of: the next support point of the
 * full expansion above R, ([R d] + 1)/d, and [R - a] + a + 1 over supp(gamma).
 * S is the midpoint of R and R'.
 */
inline std::pair<double, double> certificate_exponents(const LogPowerSeries& gamma, double R, int d,
                                                       std::optional<double> next_support) {
    double upper = (std::floor(R * d) + 1.0) / d;
    if (next_support) upper = std::min(upper, *next_support);
    for (const auto& t : gamma.terms()) {
        const double a = t.alpha.value();
        upper = std::min(upper, std::floor(R - a) + a + 1.0);
    }
    if (!(upper > R)) throw std::invalid_argument("no admissible R' above R");
    const double Rp = R + 0.5 * (upper - R);
    return {Rp, 0.5 * (R + Rp)};
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// A point of D_k with s_k/10 <= |z| < rmax, arguments between Gamma and Gamma'_k.
inline LPoint sample_region(const std::vector<ReflectionState>& states, std::size_t k, double rmax,
                            std::mt19937_64& gen) {
    const ReflectionState& st = states[k - 1];
    const double lo = std::log(rmax / 10.0);
    const double hi = std::log(rmax);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double r = std::exp(lo + (hi - lo) * unit_draw(gen));
        const double phi = st.alpha + (st.phi.a().phi() - st.alpha) * unit_draw(gen);
        const LPoint z{r, phi};
        const auto m = membership(states, z);
        if (m && *m <= static_cast<int>(k)) return z;
    }
    throw outside_extension("could not sample the region D_k");
}

} // namespace detail

/**
 * Sampled cascade: C_k on D_k with s_k/10 <= |z| < s_k, A = max(safety,
 * safety max C_k^{1/k}), then |f - gamma| <= |z|^S checked on D_k with
 * |z| < min(t_k, s_k). The sampling stops early only through WindowEmpty.
 */
inline ExtensionCertificate certify_expansion(const std::vector<ReflectionState>& states, const SurfaceFunction& base,
                                              const LogPowerSeries& gamma, double R,
                                              std::optional<double> next_support, std::mt19937_64& gen,
                                              const CertifyOptions& opt = {}) {
    if (states.empty()) throw std::invalid_argument("certify_expansion needs states");
    const int d = std::lcm(states.front().h0.denominator(), states.front().h.denominator());
    const auto [Rp, S] = certificate_exponents(gamma, R, d, next_support);

    ExtensionCertificate cert{R, Rp, S, {}, 0.0, {}};
    for (std::size_t k = 1; k <= states.size(); ++k) {
        double C = 0.0;
        for (std::size_t i = 0; i < opt.samples_per_step; ++i) {
            const LPoint z = detail::sample_region(states, k, states[k - 1].s, gen);
            const double err = std::abs(extend_eval(states, base, z) - eval(gamma, z));
            C = std::max(C, err / std::pow(z.r(), Rp));
        }
        cert.C.push_back(C);
    }
    double A = opt.safety;
    for (std::size_t k = 1; k <= cert.C.size(); ++k)
        A = std::max(A, opt.safety * std::pow(cert.C[k - 1], 1.0 / static_cast<double>(k)));
    cert.A = A;

    for (std::size_t k = 1; k <= states.size(); ++k) {
        const double t = std::pow(A, -static_cast<double>(k) / (Rp - S));
        const double rmax = std::min(t, states[k - 1].s);
        if (!(rmax / 10.0 >= std::numeric_limits<double>::min()) || std::pow(rmax / 10.0, S) == 0.0)
            throw window_empty("window radius underflows at step " + std::to_string(k));
        StepReport rep{static_cast<int>(k), cert.C[k - 1], t, 0, 0, 0.0};
        for (std::size_t i = 0; i < opt.samples_per_step; ++i) {
            const LPoint z = detail::sample_region(states, k, rmax, gen);
            const double ratio = std::abs(extend_eval(states, base, z) - eval(gamma, z)) / std::pow(z.r(), S);
            ++rep.window_samples;
            rep.worst_window_ratio = std::max(rep.worst_window_ratio, ratio);
            if (!(ratio <= 1.0)) ++rep.window_violations;
        }
        cert.steps.push_back(rep);
    }
    return cert;
}

} // namespace cornerq
