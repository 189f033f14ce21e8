#include <gtest/gtest.h>

#include <numbers>

#include "cornerq/compose.hpp"
#include "cornerq/series.hpp"
#include "support.hpp"

using namespace cornerq;
using std::numbers::pi;

namespace {

PuiseuxSeries geometric(std::size_t N, double radius, int d = 1) {
    return {d, std::vector<complex>(N + 1, complex{1.0}), radius};
}

PuiseuxSeries random_series(testsupport::Gen& g, int d, std::size_t N, double radius) {
    std::vector<complex> c(N + 1);
    double scale = 1.0;
    for (auto& x : c) {
        x = complex{g.uniform(-1, 1), g.uniform(-1, 1)} * scale;
        scale *= 0.5;
    }
    return {d, std::move(c), radius};
}

} // namespace

TEST(Eval, Examples) {
    EXPECT_EQ(eval(PuiseuxSeries::constant(1.0), LPoint(3.0, 17.0)), complex(1.0));
    const complex a = eval(PuiseuxSeries::monomial(1.0, 1, 2), LPoint(4.0, 2 * pi));
    EXPECT_NEAR(a.real(), -2.0, 1e-14);
    EXPECT_NEAR(a.imag(), 0.0, 1e-14);
    const std::size_t N = 40;
    const LPoint z{0.5, 0.0};
    const double err = std::abs(eval(geometric(N, 0.8), z) - 2.0);
    EXPECT_LE(err, tail_bound(1.0 / (1.0 - 0.8), 1, 0.8, N, z));
    EXPECT_THROW(eval(geometric(4, 0.8), LPoint(0.8, 0.0)), out_of_radius);
}

TEST(TailBound, PrintedValues) {
    EXPECT_DOUBLE_EQ(tail_bound(1.0, 1, 1.0, 0, 0.5), 1.0);
    EXPECT_NEAR(tail_bound(2.0, 2, 1.0, 3, 0.25), 0.25, 1e-15);
    EXPECT_THROW(tail_bound(1.0, 1, 1.0, 0, 1.0), out_of_radius);
}

TEST(TailBound, DecreasesToZero) {
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 0.5; r > 1e-8; r *= 0.5) {
        const double b = tail_bound(3.0, 2, 1.0, 5, r);
        EXPECT_LT(b, prev);
        prev = b;
    }
    EXPECT_LT(prev, 1e-20);
}

// Closed forms on B(rho): geometric 1/(1 - w), binomial (1 + w)^alpha, exp(w).
TEST(TailBound, SoundForClosedForms) {
    testsupport::Gen g(21);
    const double rho = 0.8;
    for (int d : {1, 2, 3}) {
        const double R = std::pow(rho, d);  // radius in z
        for (std::size_t N : {0u, 3u, 8u, 16u, 32u}) {
            const auto geo = geometric(N, R, d);
            const double alpha = g.uniform(-1.5, 2.5);
            std::vector<complex> bin(N + 1);
            {
                double c = 1.0;
                for (std::size_t n = 0; n <= N; ++n) {
                    bin[n] = c;
                    c *= (alpha - static_cast<double>(n)) / static_cast<double>(n + 1);
                }
            }
            const PuiseuxSeries binom(d, bin, R);
            const double c_bin = alpha >= 0 ? std::pow(1.0 + rho, alpha) : std::pow(1.0 - rho, alpha);
            std::vector<complex> ex(N + 1);
            {
                double c = 1.0;
                for (std::size_t n = 0; n <= N; ++n) {
                    ex[n] = c;
                    c /= static_cast<double>(n + 1);
                }
            }
            const PuiseuxSeries expo(d, ex, R);
            for (int i = 0; i < 500; ++i) {
                const LPoint z{R * 0.9 * g.uniform(0.0, 1.0) + 1e-300, g.uniform(-10, 10)};
                const complex w = std::polar(std::pow(z.r(), 1.0 / d), z.phi() / d);
                EXPECT_LE(std::abs(eval(geo, z) - 1.0 / (1.0 - w)), tail_bound(1.0 / (1.0 - rho), d, R, N, z) * (1 + 1e-12) + 1e-14);
                EXPECT_LE(std::abs(eval(binom, z) - std::pow(1.0 + w, alpha)), tail_bound(c_bin, d, R, N, z) * (1 + 1e-12) + 1e-14);
                EXPECT_LE(std::abs(eval(expo, z) - std::exp(w)), tail_bound(std::exp(rho), d, R, N, z) * (1 + 1e-12) + 1e-14);
            }
        }
    }
}

TEST(ConjTau, Examples) {
    const PuiseuxSeries real(1, {1.0, -2.0, 0.5}, 1.0);
    EXPECT_EQ(conj_tau(real).coeffs(), real.coeffs());
    const auto c = conj_tau(PuiseuxSeries::monomial(complex(0, 1), 1, 2));
    EXPECT_EQ(c.coeffs().back(), complex(0, -1));
    EXPECT_EQ(c.denominator(), 2);
    testsupport::Gen g(22);
    const auto s = random_series(g, 3, 12, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const LPoint z = g.point(0.01, 1.9, 15.0);
        EXPECT_LT(std::abs(std::conj(eval(s, tau(z))) - eval(conj_tau(s), z)), 1e-13);
    }
}

TEST(Algebra, Examples) {
    testsupport::Gen g(23);
    const auto s = random_series(g, 2, 10, 1.0);
    EXPECT_TRUE(add(s, scale(-1.0, s)).is_zero());
    const auto sq = mul_series(PuiseuxSeries::monomial(1.0, 1, 2), PuiseuxSeries::monomial(1.0, 1, 2));
    const LPoint z{0.3, 5.0};
    EXPECT_LT(std::abs(eval(sq, z) - project(z)), 1e-15);
    EXPECT_EQ(add(PuiseuxSeries::monomial(1.0, 1, 2), PuiseuxSeries::monomial(1.0, 1, 3)).denominator(), 6);
}

TEST(Algebra, PointwiseCompatible) {
    testsupport::Gen g(24);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_series(g, g.integer(1, 3), 8, 1.0);
        const auto b = random_series(g, g.integer(1, 3), 8, 0.7);
        const auto sum = add(a, b);
        const auto prod = mul_series(a, b, 64);
        EXPECT_EQ(sum.radius(), 0.7);
        for (int j = 0; j < 20; ++j) {
            const LPoint z = g.point(0.01, 0.69, 10.0);
            EXPECT_LT(std::abs(eval(sum, z) - (eval(a, z) + eval(b, z))), 1e-13);
            EXPECT_LT(std::abs(eval(prod, z) - eval(a, z) * eval(b, z)), 1e-13);
        }
    }
}

TEST(ConjTau, InvolutionAndCommutation) {
    testsupport::Gen g(25);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_series(g, g.integer(1, 3), 8, 1.0);
        const auto b = random_series(g, g.integer(1, 3), 8, 1.0);
        EXPECT_EQ(conj_tau(conj_tau(a)).coeffs(), a.coeffs());
        EXPECT_EQ(conj_tau(add(a, b)).coeffs(), add(conj_tau(a), conj_tau(b)).coeffs());
        EXPECT_EQ(conj_tau(mul_series(a, b)).coeffs(), mul_series(conj_tau(a), conj_tau(b)).coeffs());
    }
}

TEST(ComposeGerm, Examples) {
    const auto z = PuiseuxSeries::monomial(1.0, 1, 1, 1.0);
    const auto r = compose_germ(z, Germ::identity());
    EXPECT_EQ(r.coeffs()[1], complex(1.0));
    for (std::size_t n = 0; n < r.coeffs().size(); ++n)
        if (n != 1) {
            EXPECT_EQ(r.coeffs()[n], complex(0.0));
        }
    EXPECT_DOUBLE_EQ(composed_radius(1.0, Germ(unit_point, 1, {0.0, 0.1}, 1.0)), 0.5);
    EXPECT_THROW(compose_germ(z, Germ(unit_point, 0, {}, 1.0)), invalid_germ);
}

TEST(ComposeGerm, PointwiseWithinTail) {
    testsupport::Gen g(26);
    for (int i = 0; i < 40; ++i) {
        const int d = g.integer(1, 3);
        const auto s = random_series(g, d, 6, 1.0);
        const Germ phi = g.germ(16);
        const auto c = compose_germ(s, phi);
        EXPECT_EQ(c.denominator(), d);
        ASSERT_TRUE(c.bound_m().has_value());
        for (int j = 0; j < 25; ++j) {
            const LPoint z = g.point(1e-4, 0.9 * c.radius(), 12.0);
            const double err = std::abs(eval(c, z) - eval(s, apply(phi, z)));
            EXPECT_LE(err, tail_bound(*c.bound_m(), d, c.radius(), c.order(), z) + 1e-13);
        }
    }
}

TEST(ComposeGerm, AssociativeWithGermComposition) {
    testsupport::Gen g(27);
    for (int i = 0; i < 30; ++i) {
        const int d = g.integer(1, 3);
        const auto s = random_series(g, d, 6, 1.0);
        const Germ phi = g.germ(24, true);
        const Germ psi = g.germ(24, true);
        const auto lhs = compose_germ(compose_germ(s, phi), psi);
        const auto rhs = compose_germ(s, compose(phi, psi));
        EXPECT_EQ(lhs.denominator(), d);
        EXPECT_EQ(rhs.denominator(), d);
        const double common = std::min(lhs.radius(), rhs.radius());
        for (int j = 0; j < 25; ++j) {
            const LPoint z = g.point(1e-4, 0.5 * common, 12.0);
            EXPECT_LT(std::abs(eval(lhs, z) - eval(rhs, z)), 1e-9);
        }
    }
}
