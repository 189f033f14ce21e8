#pragma once

/**
 * @file lsurf.hpp
 * @brief Points and elementary maps on the Riemann surface of the logarithm.
 *
 * A point is stored in polar form (r, phi) with the argument never reduced
 * modulo 2*pi: two points that project to the same complex number but live on
 * different sheets are different points.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace cornerq {

using complex = std::complex<double>;

class LPoint {
public:
    LPoint(double r, double phi) : r_(r), phi_(phi) {
        if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(phi)) {
            std::ostringstream os;
            os << "LPoint requires finite r > 0 and finite phi, got (" << r << ", " << phi << ")";
            throw invalid_point(os.str());
        }
    }

    /// Principal lift of a nonzero complex number, argument in (-pi, pi].
    static LPoint principal(complex w) { return {std::abs(w), std::arg(w)}; }

    /// Lift of a nonzero complex number onto the sheet whose argument is closest to `phi_ref`.
    static LPoint lift_near(complex w, double phi_ref) {
        const double two_pi = 2.0 * std::numbers::pi;
        double phi = std::arg(w);
        phi += two_pi * std::round((phi_ref - phi) / two_pi);
        return {std::abs(w), phi};
    }

    double r() const noexcept { return r_; }
    double phi() const noexcept { return phi_; }

    friend bool operator==(const LPoint&, const LPoint&) = default;

private:
    double r_;
    double phi_;
};

inline const LPoint unit_point{1.0, 0.0};

/// The multiplication map m.
inline LPoint mul(const LPoint& a, const LPoint& b) { return {a.r() * b.r(), a.phi() + b.phi()}; }

/// Inverse with respect to mul.
inline LPoint inv(const LPoint& a) { return {1.0 / a.r(), -a.phi()}; }

/// The power map p^rho, rho >= 0. p^0 is the constant map onto the unit.
inline LPoint pow(double rho, const LPoint& z) {
    if (!(rho >= 0.0)) throw std::invalid_argument("pow: rho must be nonnegative");
    if (rho == 0.0) return unit_point;
    return {std::pow(z.r(), rho), rho * z.phi()};
}

/// Conjugation (r, phi) -> (r, -phi).
inline LPoint tau(const LPoint& z) { return {z.r(), -z.phi()}; }

/// log r + i phi.
inline complex logmap(const LPoint& z) { return {std::log(z.r()), z.phi()}; }

/// z^alpha = exp(alpha log z) on the whole surface.
inline complex cpow(double alpha, const LPoint& z) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("cpow: alpha must be nonnegative");
    if (alpha == 0.0) return 1.0;
    return std::polar(std::pow(z.r(), alpha), alpha * z.phi());
}

/// Projection e = exp o log onto C*.
inline complex project(const LPoint& z) { return std::polar(z.r(), z.phi()); }

/// The point reached from z by moving by the planar displacement `delta`, staying on
/// z's sheet. Valid for |delta| < |z|.
inline LPoint offset(const LPoint& z, complex delta) {
    const complex ratio = 1.0 + delta / project(z);
    return {z.r() * std::abs(ratio), z.phi() + std::arg(ratio)};
}

/// Standard quadratic domain { r < c exp(-C sqrt|phi|) }.
struct QuadraticDomain {
    double c;
    double C;

    QuadraticDomain(double c_, double C_) : c(c_), C(C_) {
        if (!(c_ > 0.0) || !(C_ > 0.0)) throw std::invalid_argument("QuadraticDomain requires c, C > 0");
    }

    double bound(double phi) const { return c * std::exp(-C * std::sqrt(std::abs(phi))); }
};

inline bool sqd_contains(const QuadraticDomain& q, const LPoint& z) { return z.r() < q.bound(z.phi()); }

} // namespace cornerq
