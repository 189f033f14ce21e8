#pragma once

// Seeded generators shared by the test binaries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cornerq/germs.hpp"
#include "cornerq/lsurf.hpp"

namespace testsupport {

using cornerq::complex;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    complex disc(double radius) {
        return std::polar(radius * std::sqrt(uniform(0.0, 1.0)), uniform(-std::numbers::pi, std::numbers::pi));
    }

    cornerq::LPoint point(double rmin = 0.01, double rmax = 10.0, double phimax = 20.0) {
        return {std::exp(uniform(std::log(rmin), std::log(rmax))), uniform(-phimax, phimax)};
    }

    /// k = 1 germ with |a| in [0.5, 2], decaying coefficients, radius 1.
    cornerq::Germ germ(std::size_t order = 16, bool unit = false, double decay = 0.3) {
        std::vector<complex> h(order + 1, complex{0.0});
        double scale = decay;
        for (std::size_t n = 1; n <= order; ++n) {
            h[n] = complex{uniform(-1.0, 1.0), uniform(-1.0, 1.0)} * scale;
            scale *= decay;
        }
        const double ar = unit ? 1.0 : std::exp(uniform(std::log(0.5), std::log(2.0)));
        return {cornerq::LPoint{ar, uniform(-4.0, 4.0)}, 1, std::move(h), 1.0, order};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(complex a, complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace testsupport
