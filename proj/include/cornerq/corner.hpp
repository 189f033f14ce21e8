#pragma once

/**
 * @file corner.hpp
 * @brief Analytic corners: angle data, normalization, the straight-wedge
 * Dirichlet oracle, the exponent lattice, and disc Poisson/Green solvers.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "compose.hpp"
#include "errors.hpp"
#include "germs.hpp"
#include "logpower.hpp"
#include "lsurf.hpp"
#include "series.hpp"

namespace cornerq {

/// Opening angle with an explicit rationality declaration.
class AngleDescriptor {
public:
    enum class Kind { rational_pi, irrational, undeclared };

    /// (p/q) pi.
    static AngleDescriptor rational_pi(std::int64_t p, std::int64_t q) {
        if (p <= 0 || q <= 0) throw std::invalid_argument("rational angle needs p, q > 0");
        const std::int64_t g = std::gcd(p, q);
        AngleDescriptor a(Kind::rational_pi, std::numbers::pi * static_cast<double>(p) / static_cast<double>(q));
        a.p_ = p / g;
        a.q_ = q / g;
        return a;
    }
    /// A value declared to be an irrational multiple of pi.
    static AngleDescriptor irrational(double value) { return {Kind::irrational, value}; }
    /// A bare float; resonance questions about it are refused.
    static AngleDescriptor undeclared(double value) { return {Kind::undeclared, value}; }

    Kind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }
    std::int64_t p() const noexcept { return p_; }
    std::int64_t q() const noexcept { return q_; }

    /// The angle divided by a positive integer; rationality is preserved.
    AngleDescriptor divided(std::int64_t m) const {
        if (m < 1) throw std::invalid_argument("angle divisor must be >= 1");
        if (kind_ == Kind::rational_pi) return rational_pi(p_, q_ * m);
        return {kind_, value_ / static_cast<double>(m)};
    }

private:
    AngleDescriptor(Kind k, double v) : kind_(k), value_(v) {
        if (!(v > 0.0) || !(v <= 2.0 * std::numbers::pi + 1e-15))
            throw std::invalid_argument("angle must lie in (0, 2 pi]");
    }

    Kind kind_;
    double value_;
    std::int64_t p_ = 0;
    std::int64_t q_ = 1;
};

/// True iff beta * theta / pi is an integer.
inline bool is_resonant(const AngleDescriptor& theta, const Exponent& beta) {
    if (!(beta.value() > 0.0)) throw std::invalid_argument("is_resonant requires beta > 0");
    switch (theta.kind()) {
    case AngleDescriptor::Kind::undeclared:
        throw undecidable_angle("angle has no rationality declaration");
    case AngleDescriptor::Kind::irrational:
        if (beta.is_rational()) return false;
        throw undecidable_angle("irrational angle with a floating exponent");
    case AngleDescriptor::Kind::rational_pi:
        if (beta.is_rational()) {
            const __int128 num = static_cast<__int128>(beta.num()) * theta.p();
            const __int128 den = static_cast<__int128>(beta.den()) * theta.q();
            return num % den == 0;
        }
        const double x = beta.value() * static_cast<double>(theta.p()) / static_cast<double>(theta.q());
        return std::abs(x - std::round(x)) <= Exponent::merge_tolerance * std::max(1.0, std::abs(x));
    }
    return false;
}

/// A harmonic function u on a region of L, with an optional holomorphic f such that Re f = u.
struct HarmonicEvaluator {
    std::function<double(const LPoint&)> u;
    std::function<complex(const LPoint&)> f;

    bool has_completion() const noexcept { return static_cast<bool>(f); }
};

/**
 * Corner data: Gamma = psi(]0, eps[), Gamma' = chi(]0, eps[), boundary values
 * g0(t) on Gamma and g1(t) on Gamma' in the curve parameter t.
 */
class CornerSpec {
public:
    /// Tolerance for the angle against arg a(chi) - arg a(psi), and for real data.
    static constexpr double consistency_tolerance = 1e-9;

    CornerSpec(Germ psi, Germ chi, AngleDescriptor theta, PuiseuxSeries g0, PuiseuxSeries g1, double eps)
        : psi_(std::move(psi)), chi_(std::move(chi)), theta_(theta), g0_(real_checked(g0)), g1_(real_checked(g1)),
          eps_(eps) {
        if (!psi_.composable() || !chi_.composable()) throw invalid_germ("corner germs need k >= 1");
        if (!(eps > 0.0)) throw std::invalid_argument("corner eps must be positive");
        const double opening = chi_.a().phi() - psi_.a().phi();
        if (std::abs(opening - theta_.value()) > consistency_tolerance) {
            std::ostringstream os;
            os << "angle " << theta_.value() << " disagrees with arg a(chi) - arg a(psi) = " << opening;
            throw std::invalid_argument(os.str());
        }
    }

    const Germ& psi() const noexcept { return psi_; }
    const Germ& chi() const noexcept { return chi_; }
    const AngleDescriptor& theta() const noexcept { return theta_; }
    const PuiseuxSeries& g0() const noexcept { return g0_; }
    const PuiseuxSeries& g1() const noexcept { return g1_; }
    double eps() const noexcept { return eps_; }

    bool normalized() const {
        return psi_.k() == 1 && chi_.k() == 1 && std::abs(psi_.a().r() - 1.0) <= 1e-10 &&
               std::abs(chi_.a().r() - 1.0) <= 1e-10;
    }

private:
    static PuiseuxSeries real_checked(const PuiseuxSeries& g) {
        for (complex c : g.coeffs())
            if (std::abs(c.imag()) > consistency_tolerance * std::max(1.0, std::abs(c.real())))
                throw std::invalid_argument("corner boundary data must have real coefficients");
        return real_part(g);
    }

    Germ psi_;
    Germ chi_;
    AngleDescriptor theta_;
    PuiseuxSeries g0_;
    PuiseuxSeries g1_;
    double eps_;
};

/// The coordinate change of normalize: u = u3 o pull.
struct TransformRecord {
    int k_psi = 1;
    int k_chi2 = 1;
    std::optional<Germ> psi1;
    std::optional<Germ> psi1_inv;

    bool is_identity() const noexcept { return !psi1_inv; }

    /// p^{1/k(chi2)} o psi1^{-1} o p^{1/k(psi)}: original coordinates to normalized ones.
    LPoint pull(const LPoint& z) const {
        if (is_identity()) return z;
        const LPoint w = apply(*psi1_inv, pow(1.0 / k_psi, z));
        return pow(1.0 / k_chi2, w);
    }

    /// Inverse of pull.
    LPoint push(const LPoint& w) const {
        if (is_identity()) return w;
        return pow(static_cast<double>(k_psi), apply(*psi1, pow(static_cast<double>(k_chi2), w)));
    }
};

struct NormalizedCorner {
    CornerSpec spec;
    TransformRecord record;
};

namespace detail {

inline bool is_identity_germ(const Germ& g) {
    if (!(g.k() == 1 && g.a() == unit_point)) return false;
    return std::all_of(g.h().coeffs.begin(), g.h().coeffs.end(), [](complex c) { return c == complex{0.0}; });
}

} // namespace detail

/**
 * Brings a corner to k(psi) = k(chi) = 1, psi = identity, |a(chi)| = 1.
 *
 * When k(psi) does not divide k(chi), chi and g1 are first reparametrized by
 * t -> t^{k(psi)}, which leaves Gamma' unchanged. The final rescale t -> t/|a|
 * of chi's parameter is likewise a reparametrization and does not enter the record.
 */
inline NormalizedCorner normalize(const CornerSpec& spec, std::size_t order = default_trunc_order) {
    if (detail::is_identity_germ(spec.psi()) && spec.chi().k() == 1 && spec.chi().a().r() == 1.0)
        return {spec, TransformRecord{}};

    const int kpsi = spec.psi().k();
    Germ chi = spec.chi();
    PuiseuxSeries g1 = spec.g1();
    if (chi.k() % kpsi != 0) {
        chi = precompose_int_pow(chi, kpsi, order);
        g1 = compose_int_pow(g1, kpsi);
    }

    // Step 1: pull back by p^{1/k(psi)}.
    const Germ psi1 = root_of(spec.psi(), kpsi, order);
    const Germ chi1 = root_of(chi, kpsi, order);
    // Step 2: pull back by psi1^{-1}; Gamma becomes the positive ray.
    const Germ psi1_inv = invert(psi1, order);
    const Germ chi2 = compose(psi1_inv, chi1, order);
    // Step 3: pull back by p^{1/k(chi2)}.
    const int kchi2 = chi2.k();
    const Germ chi3 = root_of(chi2, kchi2, order);
    const PuiseuxSeries g0 = compose_int_pow(spec.g0(), kchi2);

    const double scale = chi3.a().r();
    const Germ chi4 = unit_rescaled(chi3, order);
    const PuiseuxSeries g1_out = rescale_variable(g1, 1.0 / scale);

    const double eps = std::pow(spec.eps(), 1.0 / kchi2) * std::min(1.0, scale);
    CornerSpec out(Germ::identity(), chi4, spec.theta().divided(static_cast<std::int64_t>(kpsi) * kchi2), g0, g1_out,
                   eps);
    TransformRecord rec;
    rec.k_psi = kpsi;
    rec.k_chi2 = kchi2;
    rec.psi1 = psi1;
    rec.psi1_inv = psi1_inv;
    return {std::move(out), std::move(rec)};
}

/// Monomial boundary term coeff * t^beta on one edge of a straight wedge.
struct WedgeTerm {
    Exponent beta;
    double coeff;
};

/// Straight wedge 0 < arg z < theta with monomial data on arg z = 0 (edge0) and arg z = theta (edge1).
struct WedgeProblem {
    AngleDescriptor theta;
    std::vector<WedgeTerm> edge0;
    std::vector<WedgeTerm> edge1;

    void validate() const {
        double c0 = 0.0;
        double c1 = 0.0;
        for (const auto& [edge, acc] : {std::pair{&edge0, &c0}, std::pair{&edge1, &c1}}) {
            for (const auto& t : *edge) {
                if (t.beta.value() < 0.0) throw std::invalid_argument("wedge exponents must be >= 0");
                if (t.beta.value() == 0.0) *acc += t.coeff;
            }
        }
        if (c0 != c1) throw std::invalid_argument("exponent-0 data must agree on both edges");
    }
};

struct WedgeSolution {
    HarmonicEvaluator evaluator;
    LogPowerSeries expansion;
};

/**
 * Particular solution of the wedge Dirichlet problem, term by term.
 *
 * Non-resonant t^beta on edge0:  u = r^b sin(b(theta - phi)) / sin(b theta),
 *                                f = c (1 + i cot(b theta)) z^b.
 * Non-resonant t^beta on edge1:  u = r^b sin(b phi) / sin(b theta),  f = -i c / sin(b theta) z^b.
 * Resonant b theta = n pi, edge0: u = r^b cos(b phi) - (1/theta) r^b (sin(b phi) log r + phi cos(b phi)),
 *                                f = c (z^b + (i/theta) z^b log z).
 * Resonant, edge1 (the reflection phi -> theta - phi of the above):
 *                                f = c (-1)^n (-i/theta) z^b log z.
 * No homogeneous r^{m pi/theta} sin(m pi phi/theta) terms are added.
 */
inline WedgeSolution wedge_solve(const WedgeProblem& p) {
    p.validate();
    const double theta = p.theta.value();
    const complex I{0.0, 1.0};

    struct Piece {
        double beta;
        double c;
        bool edge1;
        bool resonant;
        double sign;  // (-1)^n for resonant pieces
    };
    std::vector<Piece> pieces;
    std::vector<LogPowerTerm> terms;
    double constant = 0.0;

    auto resonant = [&](const Exponent& b) {
        try {
            return is_resonant(p.theta, b);
        } catch (const undecidable_angle& e) {
            throw resonance_undeclared(e.what());
        }
    };

    for (int edge = 0; edge < 2; ++edge) {
        for (const auto& t : edge == 0 ? p.edge0 : p.edge1) {
            const double b = t.beta.value();
            if (b == 0.0) {
                if (edge == 0) constant += t.coeff;
                continue;
            }
            const bool res = resonant(t.beta);
            const double bt = b * theta;
            const double sign = res ? (std::llround(bt / std::numbers::pi) % 2 == 0 ? 1.0 : -1.0) : 1.0;
            pieces.push_back({b, t.coeff, edge == 1, res, sign});
            if (!res) {
                const complex lead = edge == 0 ? t.coeff * (1.0 + I * std::cos(bt) / std::sin(bt))
                                               : -I * t.coeff / std::sin(bt);
                terms.push_back({t.beta, {lead}});
            } else if (edge == 0) {
                terms.push_back({t.beta, {t.coeff, I * t.coeff / theta}});
            } else {
                terms.push_back({t.beta, {0.0, -I * sign * t.coeff / theta}});
            }
        }
    }
    if (constant != 0.0) terms.push_back({Exponent::integer(0), {constant}});

    LogPowerSeries expansion(std::move(terms));
    auto u = [pieces, constant, theta](const LPoint& z) {
        const double r = z.r();
        const double phi = z.phi();
        const double lr = std::log(r);
        double sum = constant;
        for (const auto& q : pieces) {
            const double rb = std::pow(r, q.beta);
            const double bt = q.beta * theta;
            if (!q.resonant) {
                sum += q.c * rb * (q.edge1 ? std::sin(q.beta * phi) : std::sin(q.beta * (theta - phi))) / std::sin(bt);
            } else if (!q.edge1) {
                const double bp = q.beta * phi;
                sum += q.c * (rb * std::cos(bp) - rb * (std::sin(bp) * lr + phi * std::cos(bp)) / theta);
            } else {
                const double bp = q.beta * phi;
                sum += q.c * q.sign * rb * (std::sin(bp) * lr + phi * std::cos(bp)) / theta;
            }
        }
        return sum;
    };
    auto f = [expansion](const LPoint& z) { return eval(expansion, z); };
    return {HarmonicEvaluator{u, f}, std::move(expansion)};
}

/// Straight-wedge corner: psi = identity, chi = rotation by theta, monomial data as Puiseux series.
inline CornerSpec wedge_corner(const WedgeProblem& p, double eps = 1.0) {
    p.validate();
    auto series_of = [](const std::vector<WedgeTerm>& edge) {
        PuiseuxSeries g = PuiseuxSeries::zero();
        for (const auto& t : edge) {
            if (!t.beta.is_rational()) throw std::invalid_argument("wedge_corner needs rational exponents");
            g = add(g, PuiseuxSeries::monomial(t.coeff, static_cast<int>(t.beta.num()), static_cast<int>(t.beta.den())));
        }
        return g;
    };
    return {Germ::identity(), Germ::rotation(p.theta.value()), p.theta, series_of(p.edge0), series_of(p.edge1), eps};
}

/// Exponents k + (l/d) alpha <= R, and the leading marker (n0/d) alpha.
struct WasowLattice {
    std::vector<double> exponents;
    double leading_marker;
};

inline WasowLattice wasow_exponents(int d, double alpha, double n0_over_d, double R) {
    if (d < 1) throw std::invalid_argument("denominator must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(R >= 0.0)) throw std::invalid_argument("cutoff must be nonnegative");
    std::vector<double> out;
    const double step = alpha / d;
    for (int k = 0; k <= static_cast<int>(std::floor(R)); ++k) {
        for (int l = 0;; ++l) {
            const double x = k + l * step;
            if (x > R) break;
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    std::vector<double> merged;
    for (double x : out) {
        if (merged.empty() || Exponent::real(x) != Exponent::real(merged.back())) merged.push_back(x);
    }
    return {std::move(merged), n0_over_d * alpha};
}

/// Planar boundary data and harmonic functions on the unit disc.
using PlanarFunction = std::function<double(complex)>;
/// Maps boundary data on the unit circle to its harmonic extension.
using DirichletSolver = std::function<PlanarFunction(PlanarFunction)>;

/// Trapezoidal Poisson integral over `nodes` equispaced points of the unit circle.
inline double poisson_disk(const PlanarFunction& h, complex xi, int nodes) {
    if (!(std::abs(xi) < 1.0)) throw std::invalid_argument("poisson_disk requires |xi| < 1");
    if (nodes < 16) throw std::invalid_argument("poisson_disk requires at least 16 nodes");
    const double kernel_num = 1.0 - std::norm(xi);
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const complex eta = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
        sum += kernel_num / std::norm(eta - xi) * h(eta);
    }
    return sum / nodes;
}

inline DirichletSolver disk_solver(int nodes = 1024) {
    return [nodes](PlanarFunction h) -> PlanarFunction {
        return [h = std::move(h), nodes](complex x) { return poisson_disk(h, x, nodes); };
    };
}

/// G_y(x) = log(1/|x - y|) - u(x), u the solver's extension of log(1/|. - y|) from the boundary.
inline double green_function(const DirichletSolver& solver, complex y, complex x) {
    if (x == y) throw pole_coincidence("green_function evaluated at its pole");
    auto kernel = [y](complex eta) { return -std::log(std::abs(eta - y)); };
    const PlanarFunction u = solver(kernel);
    return -std::log(std::abs(x - y)) - u(x);
}

} // namespace cornerq
