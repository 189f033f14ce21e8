#pragma once

#include <cmath>
#include <vector>

#include "germs.hpp"
#include "series.hpp"

namespace cornerq {

/// Radius of g o phi: min{ r(phi), (r(g) / (2 |a(phi)|))^{1/k(phi)} }.
inline double composed_radius(double series_radius, const Germ& phi) {
    return std::min(phi.radius(), std::pow(series_radius / (2.0 * phi.a().r()), 1.0 / phi.k()));
}

/**
 * Puiseux series g o phi for a germ with k >= 1.
 *
 * Each term a_n z^{n/d} becomes a_n a^{n/d} z^{k n/d} (1 + h(z))^{n/d}; the
 * binomial factor is a power series in z = w^d, so the denominator d is kept.
 * The result is truncated at index max(order, k * order(g)) in w = z^{1/d}.
 */
inline PuiseuxSeries compose_germ(const PuiseuxSeries& g, const Germ& phi,
                                  std::size_t order = default_trunc_order) {
    if (!phi.composable()) throw invalid_germ("compose_germ: germ must have k >= 1");
    const auto d = static_cast<std::size_t>(g.denominator());
    const auto k = static_cast<std::size_t>(phi.k());
    const std::size_t top = std::max(order, k * g.order());
    std::vector<complex> out(top + 1, complex{0.0});
    for (std::size_t n = 0; n <= g.order(); ++n) {
        const complex an = g.coeffs()[n];
        if (an == complex{0.0}) continue;
        const std::size_t shift = k * n;
        if (shift > top) break;
        const double beta = static_cast<double>(n) / static_cast<double>(d);
        const complex lead = an * cpow(beta, phi.a());
        const std::size_t jmax = (top - shift) / d;
        const auto binom = ps::binomial_pow(phi.h().coeffs, beta, jmax);
        for (std::size_t j = 0; j <= jmax; ++j) out[shift + d * j] += lead * binom[j];
    }
    const double radius = composed_radius(g.radius(), phi);
    std::optional<double> bound;
    if (const double m = majorant(g); std::isfinite(m)) bound = m;
    return {g.denominator(), std::move(out), radius, bound};
}

} // namespace cornerq
