#pragma once

/**
 * @file germs.hpp
 * @brief Germs z -> m(a, m(p^k(z), 1 + h(z))) on the log surface.
 *
 * The data (a, k, h, radius) describe an element of the germ class; k >= 1 is
 * the composable subclass and k == 1 the group. The constructor enforces
 * |h| <= 1/2 on the disc by sampling and halves the radius until it holds.
 */

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "lsurf.hpp"
#include "series.hpp"

namespace cornerq {

/// Radius used by germs whose h vanishes identically (identity, rotations).
inline constexpr double germ_sentinel_radius = 1e12;

class Germ {
public:
    Germ(LPoint a, int k, std::vector<complex> h, double radius, std::size_t order = default_trunc_order)
        : a_(a), k_(k), h_(ps::resized(h, std::max<std::size_t>(order, h.empty() ? 0 : h.size() - 1))) {
        if (k < 0) throw invalid_germ("germ degree k must be nonnegative");
        if (h_.coeffs[0] != complex{0.0}) throw invalid_germ("germ requires h(0) = 0");
        if (!(radius > 0.0)) throw invalid_germ("germ radius must be positive");
        trim();
        h_.radius = shrink_until_small(radius);
        h_.bound_m = 0.5;
    }

    static Germ identity() { return {unit_point, 1, {}, germ_sentinel_radius}; }
    static Germ rotation(double theta) { return {LPoint{1.0, theta}, 1, {}, germ_sentinel_radius}; }

    const LPoint& a() const noexcept { return a_; }
    int k() const noexcept { return k_; }
    const PowerSeries& h() const noexcept { return h_; }
    double radius() const noexcept { return h_.radius; }

    bool composable() const noexcept { return k_ >= 1; }
    bool invertible() const noexcept { return k_ == 1; }

    /// s(z) = a^1 z^k (1 + h(z)) as a planar power series truncated at `order`.
    std::vector<complex> s_series(std::size_t order) const {
        std::vector<complex> out(order + 1, complex{0.0});
        const complex A = project(a_);
        for (std::size_t n = 0; n < h_.coeffs.size() && n + static_cast<std::size_t>(k_) <= order; ++n) {
            out[n + static_cast<std::size_t>(k_)] = A * (n == 0 ? complex{1.0} : h_.coeffs[n]);
        }
        return out;
    }

    std::size_t order() const noexcept { return h_.order(); }

private:
    void trim() {
        while (h_.coeffs.size() > 1 && h_.coeffs.back() == complex{0.0}) h_.coeffs.pop_back();
    }

    bool sampled_small(double radius) const {
        constexpr int angles = 64;
        for (double frac : {1.0, 0.5, 0.25}) {
            for (int j = 0; j < angles; ++j) {
                const complex w = std::polar(frac * radius, 2.0 * std::numbers::pi * j / angles);
                if (!(std::abs(eval(h_, w)) <= 0.5)) return false;
            }
        }
        return true;
    }

    double shrink_until_small(double radius) const {
        if (h_.coeffs.size() == 1) return radius;
        for (int i = 0; i < 4096; ++i) {
            if (sampled_small(radius)) return radius;
            radius *= 0.5;
        }
        throw invalid_germ("could not find a radius with |h| <= 1/2");
    }

    LPoint a_;
    int k_;
    PowerSeries h_;
};

/// Evaluation of the germ as a map of the log surface.
inline LPoint apply(const Germ& phi, const LPoint& z) {
    if (!(z.r() < phi.radius())) {
        std::ostringstream os;
        os << "germ applied at |z| = " << z.r() << " outside radius " << phi.radius();
        throw out_of_radius(os.str());
    }
    // |h| <= 1/2 keeps 1 + h in the right half plane, so the principal lift is the right one.
    const LPoint lifted = LPoint::principal(1.0 + eval(phi.h(), project(z)));
    return mul(phi.a(), mul(pow(static_cast<double>(phi.k()), z), lifted));
}

/// phi o psi. The radius is the conservative (1/10) min{r(phi), r(psi)} / max{1, |a(psi)|}.
inline Germ compose(const Germ& phi, const Germ& psi, std::size_t order = default_trunc_order) {
    if (!psi.composable()) throw invalid_germ("compose: inner germ must have k >= 1");
    const LPoint a = mul(phi.a(), pow(static_cast<double>(phi.k()), psi.a()));
    const int k = phi.k() * psi.k();
    const auto h_inner = ps::compose(phi.h().coeffs, psi.s_series(order), order);
    auto one_plus = h_inner;
    one_plus[0] += 1.0;
    auto base = ps::resized(psi.h().coeffs, order);
    base[0] = 1.0;
    auto h = ps::mul(ps::ipow(base, static_cast<unsigned>(phi.k()), order), one_plus, order);
    h[0] = 0.0;
    const double radius = 0.1 * std::min(phi.radius(), psi.radius()) / std::max(1.0, psi.a().r());
    return {a, k, std::move(h), radius, order};
}

/**
 * Inverse of a germ with k = 1.
 *
 * The planar map s(z) = A z (1 + h(z)) is reverted as A^{-1} w (1 + g(w)) by the
 * fixed point g = 1 / (1 + h(A^{-1} w (1 + g))) - 1, which fixes one more
 * coefficient per sweep. The leading factor is b with m(a, b) = (1, 0).
 */
inline Germ invert(const Germ& phi, std::size_t order = default_trunc_order) {
    if (!phi.invertible()) throw not_invertible("invert: only germs with k = 1 are invertible");
    const complex A_inv = 1.0 / project(phi.a());
    std::vector<complex> g(order + 1, complex{0.0});
    for (std::size_t sweep = 0; sweep <= order; ++sweep) {
        std::vector<complex> inner(order + 1, complex{0.0});
        for (std::size_t n = 0; n + 1 <= order; ++n) inner[n + 1] = A_inv * (n == 0 ? complex{1.0} : g[n]);
        const auto hc = ps::compose(phi.h().coeffs, inner, order);
        auto next = ps::binomial_pow(hc, -1.0, order);
        next[0] = 0.0;
        if (next == g) break;
        g = std::move(next);
    }
    const double radius = phi.radius() * std::min(1.0, phi.a().r());
    return {inv(phi.a()), 1, std::move(g), radius, order};
}

/// tau o phi o tau: conjugated leading factor and coefficients, same k and radius.
inline Germ tau_conj(const Germ& phi) {
    std::vector<complex> h(phi.h().coeffs);
    for (auto& c : h) c = std::conj(c);
    return {tau(phi.a()), phi.k(), std::move(h), phi.radius(), phi.order()};
}

struct ArgShift {
    double shift;  ///< |arg phi(z) - arg a(phi)|
    double bound;  ///< |arg z| + pi/2
    bool holds() const noexcept { return shift <= bound; }
};

inline ArgShift arg_shift_bound(const Germ& phi, const LPoint& z) {
    if (!phi.invertible()) throw invalid_germ("arg_shift_bound is stated for k = 1");
    const LPoint w = apply(phi, z);
    return {std::abs(w.phi() - phi.a().phi()), std::abs(z.phi()) + std::numbers::pi / 2.0};
}

/// p^{1/k} o phi for a germ with k(phi) divisible by k: leading factor a^{1/k}, degree k(phi)/k,
/// and h replaced by (1 + h)^{1/k} - 1.
inline Germ root_of(const Germ& phi, int k, std::size_t order = default_trunc_order) {
    if (k < 1 || phi.k() % k != 0) throw invalid_germ("root_of: k must divide k(phi)");
    if (k == 1) return phi;
    auto h = ps::binomial_pow(phi.h().coeffs, 1.0 / k, order);
    h[0] = 0.0;
    return {pow(1.0 / k, phi.a()), phi.k() / k, std::move(h), phi.radius(), order};
}

/// phi o p^m for a positive integer m: degree k m, h(z) -> h(z^m), radius^{1/m}.
inline Germ precompose_int_pow(const Germ& phi, int m, std::size_t order = default_trunc_order) {
    if (m < 1) throw invalid_germ("precompose_int_pow: m must be >= 1");
    if (m == 1) return phi;
    std::vector<complex> h(order + 1, complex{0.0});
    for (std::size_t n = 0; n < phi.h().coeffs.size() && n * static_cast<std::size_t>(m) <= order; ++n) {
        h[n * static_cast<std::size_t>(m)] = phi.h().coeffs[n];
    }
    return {phi.a(), phi.k() * m, std::move(h), std::pow(phi.radius(), 1.0 / m), order};
}

/// Rescaled parameter z -> phi(z / |a|) for k = 1: unit leading factor, radius scaled by |a|.
inline Germ unit_rescaled(const Germ& phi, std::size_t order = default_trunc_order) {
    if (!phi.invertible()) throw invalid_germ("unit_rescaled requires k = 1");
    const double s = 1.0 / phi.a().r();
    std::vector<complex> h(phi.h().coeffs);
    double sn = 1.0;
    for (auto& c : h) {
        c *= sn;
        sn *= s;
    }
    return {LPoint{1.0, phi.a().phi()}, 1, std::move(h), phi.radius() * phi.a().r(), order};
}

} // namespace cornerq
