#pragma once

/**
 * @file logpower.hpp
 * @brief Finite generalized log-power series  sum_alpha P_alpha(log z) z^alpha.
 *
 * Exponents are exact rationals when declared so and doubles otherwise. Two
 * floating exponents within `Exponent::merge_tolerance` of each other are one
 * support point; a rational and a floating exponent are compared by value.
 * Polynomials in lambda = log z are stored dense by degree with raw (not
 * monic) coefficients; `normalized_terms` produces the monic display form.
 */

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "compose.hpp"
#include "errors.hpp"
#include "germs.hpp"
#include "lsurf.hpp"
#include "series.hpp"

namespace cornerq {

class Exponent {
public:
    static constexpr double merge_tolerance = 1e-12;

    static Exponent rational(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::invalid_argument("Exponent: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        Exponent e;
        e.num_ = num / g;
        e.den_ = den / g;
        e.rational_ = true;
        e.value_ = static_cast<double>(e.num_) / static_cast<double>(e.den_);
        return e;
    }
    static Exponent integer(std::int64_t n) { return rational(n, 1); }
    static Exponent real(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("Exponent must be finite");
        Exponent e;
        e.value_ = v;
        return e;
    }

    bool is_rational() const noexcept { return rational_; }
    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept { return value_; }

    friend Exponent operator+(const Exponent& a, const Exponent& b) {
        if (a.rational_ && b.rational_) return combine(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, a, b, true);
        return real(a.value_ + b.value_);
    }
    friend Exponent operator*(const Exponent& a, const Exponent& b) {
        if (a.rational_ && b.rational_) return combine(a.num_ * b.num_, a.den_ * b.den_, a, b, false);
        return real(a.value_ * b.value_);
    }

    friend bool operator==(const Exponent& a, const Exponent& b) { return (a <=> b) == 0; }
    friend std::weak_ordering operator<=>(const Exponent& a, const Exponent& b) {
        if (a.rational_ && b.rational_) {
            const __int128 l = static_cast<__int128>(a.num_) * b.den_;
            const __int128 r = static_cast<__int128>(b.num_) * a.den_;
            if (l < r) return std::weak_ordering::less;
            if (l > r) return std::weak_ordering::greater;
            return std::weak_ordering::equivalent;
        }
        const double tol = merge_tolerance * std::max(1.0, std::max(std::abs(a.value_), std::abs(b.value_)));
        if (std::abs(a.value_ - b.value_) <= tol) return std::weak_ordering::equivalent;
        return a.value_ < b.value_ ? std::weak_ordering::less : std::weak_ordering::greater;
    }

private:
    static Exponent combine(__int128 num, __int128 den, const Exponent& a, const Exponent& b, bool sum) {
        __int128 g = num < 0 ? -num : num;
        __int128 h = den;
        while (h != 0) {
            const __int128 t = g % h;
            g = h;
            h = t;
        }
        if (g != 0) {
            num /= g;
            den /= g;
        }
        constexpr auto lim = static_cast<__int128>(std::numeric_limits<std::int64_t>::max());
        if (num > lim || num < -lim || den > lim) return real(sum ? a.value_ + b.value_ : a.value_ * b.value_);
        return rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
    }

    bool rational_ = false;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double value_ = 0.0;
};

/// Polynomial in lambda = log z, dense by degree.
using LogPoly = std::vector<complex>;

namespace detail {

inline void trim(LogPoly& p) {
    while (!p.empty() && p.back() == complex{0.0}) p.pop_back();
}

inline LogPoly poly_add(const LogPoly& a, const LogPoly& b) {
    LogPoly out(std::max(a.size(), b.size()), complex{0.0});
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    trim(out);
    return out;
}

inline LogPoly poly_mul(const LogPoly& a, const LogPoly& b) {
    if (a.empty() || b.empty()) return {};
    LogPoly out(a.size() + b.size() - 1, complex{0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    trim(out);
    return out;
}

inline complex poly_eval(const LogPoly& p, complex lambda) {
    complex acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * lambda + p[i];
    return acc;
}

} // namespace detail

struct LogPowerTerm {
    Exponent alpha;
    LogPoly poly;
};

class LogPowerSeries {
public:
    LogPowerSeries() = default;

    /// Terms in any order; equal exponents are merged and zero polynomials dropped.
    explicit LogPowerSeries(std::vector<LogPowerTerm> terms) {
        std::stable_sort(terms.begin(), terms.end(),
                         [](const LogPowerTerm& a, const LogPowerTerm& b) { return a.alpha < b.alpha; });
        for (auto& t : terms) {
            if (t.alpha.value() < 0.0) throw std::invalid_argument("log-power exponents must be >= 0");
            if (!terms_.empty() && terms_.back().alpha == t.alpha) {
                terms_.back().poly = detail::poly_add(terms_.back().poly, t.poly);
            } else {
                detail::trim(t.poly);
                terms_.push_back(std::move(t));
            }
        }
        std::erase_if(terms_, [](const LogPowerTerm& t) { return t.poly.empty(); });
        if (!terms_.empty() && terms_.front().alpha.value() == 0.0 && terms_.front().poly.size() > 1)
            throw std::invalid_argument("the exponent-0 term must have a constant polynomial");
    }

    static LogPowerSeries monomial(Exponent alpha, LogPoly poly) { return LogPowerSeries({{alpha, std::move(poly)}}); }

    const std::vector<LogPowerTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

private:
    std::vector<LogPowerTerm> terms_;
};

inline complex eval(const LogPowerSeries& g, const LPoint& z) {
    const complex lambda = logmap(z);
    complex sum = 0.0;
    for (const auto& t : g.terms()) sum += detail::poly_eval(t.poly, lambda) * cpow(t.alpha.value(), z);
    return sum;
}

inline Exponent nu(const LogPowerSeries& g) {
    if (g.is_zero()) throw no_support("nu of the zero series");
    return g.terms().front().alpha;
}

inline std::vector<Exponent> support(const LogPowerSeries& g) {
    std::vector<Exponent> out;
    for (const auto& t : g.terms()) out.push_back(t.alpha);
    return out;
}

inline LogPowerSeries add(const LogPowerSeries& a, const LogPowerSeries& b) {
    std::vector<LogPowerTerm> t(a.terms());
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return LogPowerSeries(std::move(t));
}

inline LogPowerSeries scale(complex c, const LogPowerSeries& g) {
    std::vector<LogPowerTerm> t(g.terms());
    for (auto& term : t)
        for (auto& x : term.poly) x *= c;
    return LogPowerSeries(std::move(t));
}

inline LogPowerSeries mul_lp(const LogPowerSeries& a, const LogPowerSeries& b) {
    std::vector<LogPowerTerm> t;
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) t.push_back({x.alpha + y.alpha, detail::poly_mul(x.poly, y.poly)});
    return LogPowerSeries(std::move(t));
}

/// g o p^rho: (alpha, sum c_m lambda^m) -> (alpha rho, sum c_m rho^m lambda^m).
inline LogPowerSeries compose_pow(const LogPowerSeries& g, const Exponent& rho) {
    if (!(rho.value() > 0.0)) throw std::invalid_argument("compose_pow requires rho > 0");
    std::vector<LogPowerTerm> t;
    for (const auto& term : g.terms()) {
        LogPoly p(term.poly);
        double rm = 1.0;
        for (auto& c : p) {
            c *= rm;
            rm *= rho.value();
        }
        t.push_back({term.alpha * rho, std::move(p)});
    }
    return LogPowerSeries(std::move(t));
}

/// Partial sum over exponents alpha <= R.
inline LogPowerSeries truncate(const LogPowerSeries& g, double R) {
    std::vector<LogPowerTerm> t;
    for (const auto& term : g.terms())
        if (term.alpha.value() <= R || term.alpha == Exponent::real(R)) t.push_back(term);
    return LogPowerSeries(std::move(t));
}

inline bool is_log_free(const LogPowerSeries& g) {
    return std::all_of(g.terms().begin(), g.terms().end(), [](const LogPowerTerm& t) { return t.poly.size() <= 1; });
}

/// Display form a_alpha P_alpha with P_alpha monic.
struct NormalizedTerm {
    Exponent alpha;
    complex coefficient;
    LogPoly monic;
};

inline std::vector<NormalizedTerm> normalized_terms(const LogPowerSeries& g) {
    std::vector<NormalizedTerm> out;
    for (const auto& t : g.terms()) {
        const complex lead = t.poly.back();
        LogPoly m(t.poly);
        for (auto& c : m) c /= lead;
        m.back() = 1.0;
        out.push_back({t.alpha, lead, std::move(m)});
    }
    return out;
}

/**
 * Result of composing a log-power series with a germ: for each output exponent
 * k alpha, coefficient power series g_ell (ell = 0..m) multiplying lambda^ell.
 */
struct ComposedTerm {
    Exponent exponent;
    std::vector<PowerSeries> coeffs;
};

struct ComposedLogPower {
    std::vector<ComposedTerm> terms;
    double radius = 0.0;
};

/// Sampled check of |g_ell(z)| <= 2^{m+alpha} (|arg a| + 3)^m for unit |a| and k = 1.
struct LogBoundCertificate {
    bool applicable = false;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< max observed |g_ell| / bound

    bool holds() const noexcept { return violations == 0; }
};

inline complex eval(const ComposedLogPower& g, const LPoint& z) {
    if (!(z.r() < g.radius)) throw out_of_radius("composed log-power series evaluated outside its radius");
    const complex lambda = logmap(z);
    const complex w = project(z);
    complex sum = 0.0;
    for (const auto& t : g.terms) {
        complex inner = 0.0;
        complex lp = 1.0;
        for (const auto& c : t.coeffs) {
            inner += eval(c, w) * lp;
            lp *= lambda;
        }
        sum += inner * cpow(t.exponent.value(), z);
    }
    return sum;
}

inline bool is_log_free(const ComposedLogPower& g) {
    for (const auto& t : g.terms)
        for (std::size_t l = 1; l < t.coeffs.size(); ++l)
            for (complex c : t.coeffs[l].coeffs)
                if (c != complex{0.0}) return false;
    return true;
}

/// Expansion of the composed series into monomials z^{k alpha + j} lambda^ell with exponents <= R.
inline LogPowerSeries expand(const ComposedLogPower& g, double R) {
    std::vector<LogPowerTerm> out;
    for (const auto& t : g.terms) {
        for (std::size_t l = 0; l < t.coeffs.size(); ++l) {
            const auto& c = t.coeffs[l].coeffs;
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (c[j] == complex{0.0}) continue;
                const Exponent e = t.exponent + Exponent::integer(static_cast<std::int64_t>(j));
                if (e.value() > R) break;
                LogPoly p(l + 1, complex{0.0});
                p[l] = c[j];
                out.push_back({e, std::move(p)});
            }
        }
    }
    return LogPowerSeries(std::move(out));
}

namespace detail {

inline double binomial(unsigned m, unsigned l) {
    double r = 1.0;
    for (unsigned i = 1; i <= l; ++i) r = r * static_cast<double>(m - l + i) / static_cast<double>(i);
    return r;
}

/// Deterministic spiral of points in the disc of radius `rmax`.
inline std::vector<complex> disc_samples(double rmax, std::size_t n) {
    std::vector<complex> pts;
    pts.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double rr = rmax * std::sqrt((static_cast<double>(i) + 0.5) / static_cast<double>(n));
        pts.push_back(std::polar(rr, golden * static_cast<double>(i)));
    }
    return pts;
}

} // namespace detail

/**
 * (z^alpha lambda^m) o phi = z^{k alpha} sum_ell g_ell lambda^ell with
 * g_ell = k^ell C(m, ell) a^alpha (1 + h)^alpha (log m(a, 1 + h))^{m - ell}.
 * Terms of g are combined linearly; the certificate samples each raw g_ell on
 * the disc of radius 0.99 r(phi) when k = 1 and |a| = 1.
 */
inline std::pair<ComposedLogPower, LogBoundCertificate>
compose_germ_lp(const LogPowerSeries& g, const Germ& phi, std::size_t order = default_trunc_order,
                std::size_t cert_samples = 256) {
    if (!phi.composable()) throw invalid_germ("compose_germ_lp: germ must have k >= 1");
    const double k = phi.k();
    const double radius = phi.radius();
    LogBoundCertificate cert;
    cert.applicable = phi.k() == 1 && std::abs(phi.a().r() - 1.0) <= 1e-12;
    const auto pts = cert.applicable ? detail::disc_samples(0.99 * radius, cert_samples) : std::vector<complex>{};

    // log m(a, 1 + h) = log a + log(1 + h)
    auto log_series = ps::log1p(phi.h().coeffs, order);
    log_series[0] = logmap(phi.a());

    ComposedLogPower out;
    out.radius = radius;
    for (const auto& term : g.terms()) {
        const double alpha = term.alpha.value();
        const unsigned M = static_cast<unsigned>(term.poly.size() - 1);
        auto a_alpha = ps::binomial_pow(phi.h().coeffs, alpha, order);
        const complex lead = cpow(alpha, phi.a());
        for (auto& c : a_alpha) c *= lead;

        std::vector<std::vector<complex>> log_pows{ps::resized(std::vector<complex>{1.0}, order)};
        for (unsigned j = 1; j <= M; ++j) log_pows.push_back(ps::mul(log_pows.back(), log_series, order));

        ComposedTerm ct{Exponent::real(0.0), {}};
        ct.exponent = term.alpha * Exponent::integer(phi.k());
        ct.coeffs.assign(M + 1, PowerSeries(std::vector<complex>(order + 1, complex{0.0}), radius));
        for (unsigned m = 0; m <= M; ++m) {
            const complex cm = term.poly[m];
            if (cm == complex{0.0}) continue;
            const double bound = std::pow(2.0, m + alpha) * std::pow(std::abs(phi.a().phi()) + 3.0, m);
            for (unsigned l = 0; l <= m; ++l) {
                const double factor = std::pow(k, l) * detail::binomial(m, l);
                auto gl = ps::mul(a_alpha, log_pows[m - l], order);
                for (auto& c : gl) c *= factor;
                for (const complex w : pts) {
                    const double ratio = std::abs(eval(PowerSeries(gl, radius), w)) / bound;
                    ++cert.samples;
                    cert.worst_ratio = std::max(cert.worst_ratio, ratio);
                    if (!(ratio <= 1.0)) ++cert.violations;
                }
                for (std::size_t j = 0; j <= order; ++j) ct.coeffs[l].coeffs[j] += cm * gl[j];
            }
        }
        auto it = std::find_if(out.terms.begin(), out.terms.end(),
                               [&](const ComposedTerm& x) { return x.exponent == ct.exponent; });
        if (it == out.terms.end()) {
            out.terms.push_back(std::move(ct));
        } else {
            if (it->coeffs.size() < ct.coeffs.size())
                it->coeffs.resize(ct.coeffs.size(), PowerSeries(std::vector<complex>(order + 1, complex{0.0}), radius));
            for (std::size_t l = 0; l < ct.coeffs.size(); ++l)
                for (std::size_t j = 0; j <= order; ++j) it->coeffs[l].coeffs[j] += ct.coeffs[l].coeffs[j];
        }
    }
    return {std::move(out), cert};
}

} // namespace cornerq
