#pragma once

/**
 * @file series.hpp
 * @brief Truncated power series and Puiseux series evaluated on the log surface.
 *
 * Coefficients are complex doubles. Every series carries the radius on which it
 * is asserted to converge; operations propagate radii only through the printed
 * closed-form rules (minimum of radii for ring operations), never through
 * numerical estimates.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "lsurf.hpp"

namespace cornerq {

/// Truncation order used when an operation has to cut an infinite expansion.
inline constexpr std::size_t default_trunc_order = 32;

inline constexpr double unbounded_radius = std::numeric_limits<double>::infinity();

struct PowerSeries {
    std::vector<complex> coeffs;
    double radius = unbounded_radius;
    std::optional<double> bound_m;

    PowerSeries() : coeffs{complex{0.0}} {}
    explicit PowerSeries(std::vector<complex> c, double r = unbounded_radius,
                         std::optional<double> m = std::nullopt)
        : coeffs(std::move(c)), radius(r), bound_m(m) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        if (!(radius > 0.0)) throw std::invalid_argument("PowerSeries radius must be positive");
    }

    std::size_t order() const noexcept { return coeffs.size() - 1; }
    complex operator[](std::size_t n) const noexcept { return n < coeffs.size() ? coeffs[n] : complex{0.0}; }
};

/// Sum in ascending order of the exponent.
inline complex eval(const PowerSeries& p, complex w) {
    complex sum = 0.0;
    complex wn = 1.0;
    for (std::size_t n = 0; n < p.coeffs.size(); ++n) {
        if (p.coeffs[n] != complex{0.0}) sum += p.coeffs[n] * wn;
        wn *= w;
    }
    return sum;
}

namespace ps {

inline std::vector<complex> resized(std::span<const complex> c, std::size_t order) {
    std::vector<complex> out(order + 1, complex{0.0});
    std::copy_n(c.begin(), std::min(c.size(), order + 1), out.begin());
    return out;
}

inline std::vector<complex> mul(std::span<const complex> a, std::span<const complex> b, std::size_t order) {
    std::vector<complex> out(order + 1, complex{0.0});
    for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
        if (a[i] == complex{0.0}) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

/// p o q truncated at `order`; requires q(0) = 0.
inline std::vector<complex> compose(std::span<const complex> p, std::span<const complex> q, std::size_t order) {
    if (!q.empty() && q[0] != complex{0.0})
        throw std::invalid_argument("ps::compose: inner series must vanish at 0");
    std::vector<complex> out(order + 1, complex{0.0});
    // Horner from the top coefficient that can still contribute.
    const std::size_t top = std::min(p.size(), order + 1);
    for (std::size_t n = top; n-- > 0;) {
        out = mul(out, q, order);
        out[0] += p[n];
    }
    return out;
}

/// (1 + h)^beta for h(0) = 0 via the recurrence n f_n = sum_j (beta j - (n - j)) h_j f_{n-j}.
inline std::vector<complex> binomial_pow(std::span<const complex> h, double beta, std::size_t order) {
    if (!h.empty() && h[0] != complex{0.0})
        throw std::invalid_argument("ps::binomial_pow: h must vanish at 0");
    std::vector<complex> f(order + 1, complex{0.0});
    f[0] = 1.0;
    for (std::size_t n = 1; n <= order; ++n) {
        complex acc = 0.0;
        for (std::size_t j = 1; j <= n && j < h.size(); ++j) {
            acc += (beta * static_cast<double>(j) - static_cast<double>(n - j)) * h[j] * f[n - j];
        }
        f[n] = acc / static_cast<double>(n);
    }
    return f;
}

/// log(1 + h) for h(0) = 0, from L' = h' / (1 + h).
inline std::vector<complex> log1p(std::span<const complex> h, std::size_t order) {
    const auto recip = binomial_pow(h, -1.0, order);
    std::vector<complex> dh(order + 1, complex{0.0});
    for (std::size_t n = 1; n < h.size() && n <= order + 1; ++n) dh[n - 1] = static_cast<double>(n) * h[n];
    const auto dl = mul(dh, recip, order);
    std::vector<complex> out(order + 1, complex{0.0});
    for (std::size_t n = 1; n <= order; ++n) out[n] = dl[n - 1] / static_cast<double>(n);
    return out;
}

/// Integer power of a series, truncated.
inline std::vector<complex> ipow(std::span<const complex> a, unsigned e, std::size_t order) {
    std::vector<complex> out(order + 1, complex{0.0});
    out[0] = 1.0;
    for (unsigned i = 0; i < e; ++i) out = mul(out, a, order);
    return out;
}

} // namespace ps

/**
 * Puiseux series sum_n a_n z^{n/d}, stored as a power series in w = z^{1/d}.
 *
 * `radius` is measured in z. The base power series carries radius^{1/d}.
 */
class PuiseuxSeries {
public:
    PuiseuxSeries() : PuiseuxSeries(1, {complex{0.0}}, unbounded_radius) {}

    PuiseuxSeries(int d, std::vector<complex> coeffs, double radius, std::optional<double> bound_m = std::nullopt)
        : d_(d), base_(std::move(coeffs), std::pow(radius, 1.0 / d), bound_m), radius_(radius) {
        if (d < 1) throw std::invalid_argument("PuiseuxSeries denominator must be >= 1");
        if (!(radius > 0.0)) throw std::invalid_argument("PuiseuxSeries radius must be positive");
    }

    static PuiseuxSeries constant(complex c, double radius = unbounded_radius) { return {1, {c}, radius}; }
    static PuiseuxSeries zero(double radius = unbounded_radius) { return constant(0.0, radius); }

    /// c z^{num/den}.
    static PuiseuxSeries monomial(complex c, int num, int den, double radius = unbounded_radius) {
        if (num < 0 || den < 1) throw std::invalid_argument("monomial exponent must be num/den >= 0");
        const int g = std::gcd(num, den);
        const int d = num == 0 ? 1 : den / g;
        const int n = num == 0 ? 0 : num / g;
        std::vector<complex> c_(static_cast<std::size_t>(n) + 1, complex{0.0});
        c_.back() = c;
        return {d, std::move(c_), radius};
    }

    int denominator() const noexcept { return d_; }
    double radius() const noexcept { return radius_; }
    const PowerSeries& base() const noexcept { return base_; }
    const std::vector<complex>& coeffs() const noexcept { return base_.coeffs; }
    std::size_t order() const noexcept { return base_.order(); }
    std::optional<double> bound_m() const noexcept { return base_.bound_m; }

    bool is_zero() const {
        return std::all_of(coeffs().begin(), coeffs().end(), [](complex c) { return c == complex{0.0}; });
    }

    PuiseuxSeries with_radius(double r) const { return {d_, coeffs(), r, bound_m()}; }

    /// Re-express with denominator d * factor (index n -> n * factor).
    PuiseuxSeries refined(int factor) const {
        if (factor == 1) return *this;
        std::vector<complex> c(order() * static_cast<std::size_t>(factor) + 1, complex{0.0});
        for (std::size_t n = 0; n <= order(); ++n) c[n * static_cast<std::size_t>(factor)] = coeffs()[n];
        return {d_ * factor, std::move(c), radius_, bound_m()};
    }

private:
    int d_;
    PowerSeries base_;
    double radius_;
};

/// Evaluation on the log surface; ascending order of exponent.
inline complex eval(const PuiseuxSeries& g, const LPoint& z) {
    if (!(z.r() < g.radius())) {
        std::ostringstream os;
        os << "Puiseux evaluation at |z| = " << z.r() << " outside radius " << g.radius();
        throw out_of_radius(os.str());
    }
    const double inv_d = 1.0 / g.denominator();
    const complex w = std::polar(std::pow(z.r(), inv_d), z.phi() * inv_d);
    return eval(g.base(), w);
}

/**
 * Cauchy tail bound for a Puiseux series bounded by c on B(radius):
 * c (|z|/radius)^{(N+1)/d} / (1 - (|z|/radius)^{1/d}).
 */
inline double tail_bound(double c, int d, double radius, std::size_t N, double abs_z) {
    if (!(abs_z < radius)) throw out_of_radius("tail_bound requires |z| < radius");
    const double q = std::pow(abs_z / radius, 1.0 / d);
    return c * std::pow(q, static_cast<double>(N + 1)) / (1.0 - q);
}

inline double tail_bound(double c, int d, double radius, std::size_t N, const LPoint& z) {
    return tail_bound(c, d, radius, N, z.r());
}

/// sum |a_n| radius^{n/d}: a sup bound valid on B(radius) for the truncated series.
inline double majorant(const PuiseuxSeries& g) {
    double m = 0.0;
    const double rho = std::pow(g.radius(), 1.0 / g.denominator());
    double rn = 1.0;
    for (complex c : g.coeffs()) {
        if (c != complex{0.0}) m += std::abs(c) * rn;
        rn *= rho;
    }
    return m;
}

/// conj(g o tau): conjugated coefficients, same denominator and radius.
inline PuiseuxSeries conj_tau(const PuiseuxSeries& g) {
    std::vector<complex> c(g.coeffs());
    for (auto& x : c) x = std::conj(x);
    return {g.denominator(), std::move(c), g.radius(), g.bound_m()};
}

namespace detail {

inline std::pair<PuiseuxSeries, PuiseuxSeries> common_denominator(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    const int d = std::lcm(a.denominator(), b.denominator());
    return {a.refined(d / a.denominator()), b.refined(d / b.denominator())};
}

inline std::optional<double> combine_bounds(std::optional<double> a, std::optional<double> b, bool product) {
    if (!a || !b) return std::nullopt;
    return product ? *a * *b : *a + *b;
}

} // namespace detail

inline PuiseuxSeries add(const PuiseuxSeries& g1, const PuiseuxSeries& g2) {
    auto [a, b] = detail::common_denominator(g1, g2);
    std::vector<complex> c(std::max(a.coeffs().size(), b.coeffs().size()), complex{0.0});
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = a.base()[n] + b.base()[n];
    return {a.denominator(), std::move(c), std::min(a.radius(), b.radius()),
            detail::combine_bounds(a.bound_m(), b.bound_m(), false)};
}

inline PuiseuxSeries scale(complex s, const PuiseuxSeries& g) {
    std::vector<complex> c(g.coeffs());
    for (auto& x : c) x *= s;
    std::optional<double> m;
    if (g.bound_m()) m = std::abs(s) * *g.bound_m();
    return {g.denominator(), std::move(c), g.radius(), m};
}

inline PuiseuxSeries sub(const PuiseuxSeries& g1, const PuiseuxSeries& g2) { return add(g1, scale(-1.0, g2)); }

/// Product truncated at index `order` in the common variable z^{1/lcm(d1,d2)}.
inline PuiseuxSeries mul_series(const PuiseuxSeries& g1, const PuiseuxSeries& g2,
                                std::size_t order = default_trunc_order) {
    auto [a, b] = detail::common_denominator(g1, g2);
    auto c = ps::mul(a.coeffs(), b.coeffs(), std::min(order, a.order() + b.order()));
    return {a.denominator(), std::move(c), std::min(a.radius(), b.radius()),
            detail::combine_bounds(a.bound_m(), b.bound_m(), true)};
}

/// g o p^m for a positive integer m: exponent n/d becomes n m / d. The radius becomes radius^{1/m}.
inline PuiseuxSeries compose_int_pow(const PuiseuxSeries& g, int m) {
    if (m < 1) throw std::invalid_argument("compose_int_pow requires m >= 1");
    std::vector<complex> c(g.order() * static_cast<std::size_t>(m) + 1, complex{0.0});
    for (std::size_t n = 0; n <= g.order(); ++n) c[n * static_cast<std::size_t>(m)] = g.coeffs()[n];
    return {g.denominator(), std::move(c), std::pow(g.radius(), 1.0 / m), g.bound_m()};
}

/// z -> g(lambda z) for lambda > 0: coefficient n is scaled by lambda^{n/d}, radius by 1/lambda.
inline PuiseuxSeries rescale_variable(const PuiseuxSeries& g, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale_variable requires lambda > 0");
    std::vector<complex> c(g.coeffs());
    const double step = std::pow(lambda, 1.0 / g.denominator());
    double f = 1.0;
    for (auto& x : c) {
        x *= f;
        f *= step;
    }
    return {g.denominator(), std::move(c), g.radius() / lambda};
}

/// Coefficient-wise real part (real boundary data from a complex series).
inline PuiseuxSeries real_part(const PuiseuxSeries& g) {
    std::vector<complex> c(g.coeffs());
    for (auto& x : c) x = x.real();
    return {g.denominator(), std::move(c), g.radius()};
}

} // namespace cornerq
