#include <gtest/gtest.h>

#include <numbers>

#include "cornerq/reflect.hpp"
#include "support.hpp"

using namespace cornerq;
using std::numbers::pi;

namespace {

Exponent Q(std::int64_t p, std::int64_t q = 1) { return Exponent::rational(p, q); }

const WedgeProblem linear_wedge{AngleDescriptor::irrational(1.0), {{Q(1), 1.0}}, {}};

// A normalized corner with curved edges; u = Re F for a global F in z^{1/2}.
struct CurvedCorner {
    PuiseuxSeries F;
    CornerSpec spec;
};

CurvedCorner curved_corner() {
    const Germ psi(LPoint{1.0, 0.0}, 1, {0.0, complex(0.1, 0.05), complex(-0.02, 0.03)}, 0.5, 32);
    const Germ chi(LPoint{1.0, 1.0}, 1, {0.0, complex(-0.05, 0.08)}, 0.5, 32);
    PuiseuxSeries F(2, {0.0, 0.0, 1.0, complex(0.0, 0.25)}, 100.0);
    const auto g0 = real_part(compose_germ(F, psi, 32));
    const auto g1 = real_part(compose_germ(F, chi, 32));
    return {F, CornerSpec(psi, chi, AngleDescriptor::irrational(1.0), g0, g1, 1.0)};
}

double rel(complex a, complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(Init, Examples) {
    const auto half = init(wedge_corner({AngleDescriptor::rational_pi(1, 1), {}, {}}));
    EXPECT_TRUE(half.h.is_zero());
    EXPECT_EQ(half.k, 1);
    EXPECT_NEAR(half.phi.a().phi() - half.alpha, pi, 1e-15);

    const auto q = init(wedge_corner({AngleDescriptor::rational_pi(1, 2), {{Q(1), 1.0}}, {}}));
    EXPECT_TRUE(q.h.is_zero());
    EXPECT_EQ(q.alpha, 0.0);
    ASSERT_GE(q.h0.coeffs().size(), 2u);
    EXPECT_EQ(q.h0.coeffs()[1], complex(1.0));
    EXPECT_NEAR(q.phi.a().phi() - q.alpha, pi / 2, 1e-15);
    EXPECT_LE(q.s, q.r);
}

TEST(Init, RejectsUnnormalized) {
    const Germ psi(LPoint{1.0, 0.0}, 2, {}, 1.0);
    const CornerSpec c(psi, Germ(LPoint{1.0, 2.0}, 2, {}, 1.0), AngleDescriptor::irrational(2.0), PuiseuxSeries::zero(),
                       PuiseuxSeries::zero(), 1.0);
    EXPECT_THROW(init(c), not_normalized);
    const CornerSpec scaled(Germ::identity(), Germ(LPoint{2.0, 1.0}, 1, {}, 1.0), AngleDescriptor::irrational(1.0),
                            PuiseuxSeries::zero(), PuiseuxSeries::zero(), 1.0);
    EXPECT_THROW(init(scaled), not_normalized);
    EXPECT_NO_THROW(init(normalize(c).spec));
}

TEST(Step, ZeroDataAndRotationExact) {
    const auto states = iterate(init(wedge_corner({AngleDescriptor::rational_pi(1, 2), {}, {}})), 6);
    for (const auto& st : states) {
        EXPECT_TRUE(st.h.is_zero());
        EXPECT_NEAR(st.phi.a().phi(), std::ldexp(pi / 2, st.k - 1), 1e-12);
        for (const auto& c : st.phi.h().coeffs) EXPECT_EQ(c, complex(0.0));
    }
}

TEST(Iteration, InvariantsTwelveSteps) {
    const WedgeProblem p{AngleDescriptor::irrational(1.0), {{Q(1, 2), 1.0}}, {{Q(3, 2), -0.5}}};
    const auto states = iterate(init(wedge_corner(p)), 12);
    ASSERT_EQ(states.size(), 12u);
    const auto& first = states.front();
    const int d = first.h.denominator();
    EXPECT_EQ(d, 2);
    for (const auto& st : states) {
        const double scale = std::pow(100.0, 1 - st.k);
        EXPECT_LE(std::abs(st.s - first.s * scale) / (first.s * scale), 1e-12);
        EXPECT_LE(std::abs(st.r - first.r * scale) / (first.r * scale), 1e-12);
        EXPECT_LE(std::abs(st.phi.a().phi() - st.alpha - std::ldexp(1.0, st.k - 1)), 1e-10);
        EXPECT_LE(std::abs(st.phi.a().r() - 1.0), 1e-10);
        EXPECT_EQ(st.h.denominator(), d);
        EXPECT_LE(st.h.radius(), st.k == 1 ? first.h.radius() : states[st.k - 2].s / 4.0);
    }
}

TEST(Iteration, CurvedCornerInvariants) {
    const auto cc = curved_corner();
    const auto states = iterate(init(cc.spec), 5);
    for (const auto& st : states) {
        EXPECT_LE(std::abs(st.phi.a().phi() - st.alpha - std::ldexp(1.0, st.k - 1)), 1e-10);
        EXPECT_LE(std::abs(st.phi.a().r() - 1.0), 1e-10);
        EXPECT_EQ(st.h.denominator(), 2);
    }
}

TEST(ExtendEval, BaseInsideD) {
    const auto sol = wedge_solve(linear_wedge);
    const auto states = iterate(init(wedge_corner(linear_wedge)), 3);
    const LPoint z{0.2, 0.5};
    EXPECT_EQ(membership(states, z), 1);
    EXPECT_EQ(extend_eval(states, sol.evaluator.f, z), sol.evaluator.f(z));
}

TEST(ExtendEval, SchwarzReflection) {
    // Gamma' is the positive real axis and carries zero data.
    const CornerSpec c(Germ::rotation(-1.0), Germ::identity(), AngleDescriptor::irrational(1.0),
                       PuiseuxSeries::monomial(1.0, 1, 1), PuiseuxSeries::zero(), 1.0);
    const auto sol = wedge_solve(linear_wedge);
    const SurfaceFunction f = [&](const LPoint& z) { return sol.evaluator.f(mul(z, LPoint(1.0, 1.0))); };
    const auto states = iterate(init(c), 2);
    EXPECT_TRUE(states[0].h.is_zero());
    testsupport::Gen g(61);
    for (int i = 0; i < 100; ++i) {
        const LPoint z{g.uniform(1e-5, 0.99) * states[1].s, g.uniform(0.01, 0.99)};
        ASSERT_EQ(membership(states, z), 2);
        EXPECT_LE(std::abs(extend_eval(states, f, z) + std::conj(f(tau(z)))), 1e-10 * std::max(1.0, std::abs(f(z))));
    }
}

TEST(ExtendEval, LinearWedgeThreeSteps) {
    const auto sol = wedge_solve(linear_wedge);
    const auto states = iterate(init(wedge_corner(linear_wedge)), 3);
    const double reach = states[2].phi.a().phi();
    testsupport::Gen g(62);
    int beyond = 0;
    for (int i = 0; i < 100; ++i) {
        const LPoint z{g.uniform(1e-3, 0.5) * states[2].s, g.uniform(0.0, 1.0) * reach};
        const auto m = membership(states, z);
        ASSERT_TRUE(m.has_value());
        beyond += *m > 1;
        EXPECT_LE(rel(extend_eval(states, sol.evaluator.f, z), sol.evaluator.f(z)), 1e-8);
    }
    EXPECT_GT(beyond, 50);
}

TEST(ExtendEval, OracleEquivalenceRandomWedges) {
    testsupport::Gen g(63);
    for (int rep = 0; rep < 20; ++rep) {
        const bool rational = rep % 2 == 1;
        const auto theta = rational ? AngleDescriptor::rational_pi(1, g.integer(2, 4))
                                    : AngleDescriptor::irrational(g.uniform(0.3, 1.2));
        const int den = g.integer(1, 2);
        WedgeProblem p{theta, {}, {}};
        for (int i = 0; i < 2; ++i) {
            p.edge0.push_back({Q(g.integer(1, 6), den), g.uniform(-1, 1)});
            p.edge1.push_back({Q(g.integer(1, 6), den), g.uniform(-1, 1)});
        }
        const auto sol = wedge_solve(p);
        const auto states = iterate(init(wedge_corner(p)), 5);
        for (int i = 0; i < 40; ++i) {
            const int k = g.integer(1, 5);
            const auto& st = states[k - 1];
            const LPoint z{g.uniform(0.1, 0.9) * st.s, st.alpha + g.uniform(0.0, 1.0) * (st.phi.a().phi() - st.alpha)};
            if (!membership(states, z)) continue;
            EXPECT_LE(rel(extend_eval(states, sol.evaluator.f, z), sol.evaluator.f(z)), 1e-8)
                << "rep " << rep << " k " << k;
        }
    }
}

TEST(ExtendEval, CurvedCornerMatchesContinuation) {
    const auto cc = curved_corner();
    const auto states = iterate(init(cc.spec), 3);
    const SurfaceFunction base = [&](const LPoint& z) { return eval(cc.F, z); };
    testsupport::Gen g(64);
    for (int i = 0; i < 100; ++i) {
        const int k = g.integer(1, 3);
        const auto& st = states[k - 1];
        const LPoint z{g.uniform(0.05, 0.5) * st.s, g.uniform(0.0, 1.0) * st.phi.a().phi()};
        if (!membership(states, z)) continue;
        EXPECT_LE(rel(extend_eval(states, base, z), base(z)), 1e-8);
    }
}

TEST(ExtendEval, RealPartMatchesDataOnGammaPrime) {
    const auto cc = curved_corner();
    // One state beyond the last curve checked, so points on it are interior.
    const auto states = iterate(init(cc.spec), 5);
    const SurfaceFunction base = [&](const LPoint& z) { return eval(cc.F, z); };
    testsupport::Gen g(65);
    for (int k = 1; k <= 4; ++k) {
        const auto& st = states[k - 1];
        for (int i = 0; i < 20; ++i) {
            const LPoint z = apply(st.phi, LPoint(g.uniform(0.05, 0.5) * states[k].s, 0.0));
            EXPECT_NEAR(extend_eval(states, base, z).real(), eval(st.h, z).real(), 1e-8);
        }
    }
}

TEST(ExtendEval, OutsideAndNegativeDirection) {
    const auto sol = wedge_solve(linear_wedge);
    const auto c = wedge_corner(linear_wedge);
    const auto states = iterate(init(c), 3);
    EXPECT_THROW(extend_eval(states, sol.evaluator.f, LPoint(0.5 * states[2].s, -0.5)), outside_extension);
    EXPECT_THROW(extend_eval(states, sol.evaluator.f, LPoint(0.5 * states[2].s, 10.0)), outside_extension);

    const auto neg = iterate(init(negative_corner(c)), 3);
    const auto back = mirrored(sol.evaluator.f);
    testsupport::Gen g(66);
    for (int i = 0; i < 100; ++i) {
        const LPoint w{g.uniform(0.01, 0.5) * neg[2].s, -g.uniform(0.0, 3.0)};
        const complex v = std::conj(extend_eval(neg, back, tau(w)));
        EXPECT_LE(rel(v, sol.evaluator.f(w)), 1e-8);
    }
}

TEST(Membership, RotationSectors) {
    const auto states = iterate(init(wedge_corner(linear_wedge)), 4);
    const double s4 = states[3].s;
    EXPECT_EQ(membership(states, LPoint(0.5 * s4, 0.5)), 1);
    EXPECT_EQ(membership(states, LPoint(0.5 * s4, 1.0)), 1);
    EXPECT_EQ(membership(states, LPoint(0.5 * s4, 1.5)), 2);
    EXPECT_EQ(membership(states, LPoint(0.5 * s4, 3.0)), 3);
    EXPECT_EQ(membership(states, LPoint(0.5 * s4, 7.0)), 4);
    EXPECT_FALSE(membership(states, LPoint(0.5 * s4, 9.0)));
    EXPECT_FALSE(membership(states, LPoint(0.5 * s4, -0.1)));
    EXPECT_FALSE(membership(states, LPoint(0.5 * states[0].s, 1.5)));
    EXPECT_FALSE(membership(states, LPoint(2.0 * states[0].s, 0.5)));
    for (int k = 1; k <= 4; ++k) {
        const double lo = k == 1 ? 0.0 : std::ldexp(1.0, k - 2);
        const double hi = std::ldexp(1.0, k - 1);
        EXPECT_EQ(membership(states, LPoint(0.5 * s4, 0.5 * (lo + hi))), k);
    }
}

TEST(Membership, MonotoneInArgument) {
    testsupport::Gen g(67);
    const auto cc = curved_corner();
    const auto states = iterate(init(cc.spec), 5);
    for (int rep = 0; rep < 50; ++rep) {
        const double r = g.uniform(0.1, 0.9) * states[4].s;
        int prev = 0;
        for (double phi = 0.001; phi < 20.0; phi += 0.01) {
            const auto m = membership(states, LPoint(r, phi));
            if (!m) break;
            EXPECT_GE(*m, prev);
            prev = *m;
        }
        EXPECT_EQ(prev, 5);
    }
}

TEST(Envelope, QuarterPlane) {
    const auto states = iterate(init(wedge_corner({AngleDescriptor::rational_pi(1, 2), {}, {}})), 3);
    const Envelope env = envelope(states);
    EXPECT_GT(env.K, 1.0);
    const auto check = verify_envelope(states, env);
    EXPECT_EQ(check.samples, 10000u);
    EXPECT_TRUE(check.holds());
    EXPECT_THROW(envelope({states[0], states[1]}), insufficient_steps);
}

TEST(Envelope, PointsInsideAreMembers) {
    for (double theta : {1.0, pi / 2, 0.3}) {
        const WedgeProblem p{AngleDescriptor::irrational(theta), {}, {}};
        const auto states = iterate(init(wedge_corner(p)), 3);
        const Envelope env = envelope(states);
        EXPECT_TRUE(verify_envelope(states, env).holds());
        // Enough states to reach phi - alpha = 1e4 directly.
        const auto more = iterate(init(wedge_corner(p)), static_cast<int>(std::ceil(std::log2(1e4 / theta))) + 2);
        for (int i = 0; i <= 400; ++i) {
            const double x = std::pow(1e4, i / 400.0);
            const double r = 0.5 * std::pow(env.K, -std::max(1.0, std::log(x)));
            EXPECT_TRUE(membership(more, LPoint(r, x)).has_value()) << "theta " << theta << " x " << x;
            EXPECT_LE(env.Q.bound(x), std::pow(env.K, -std::max(1.0, std::log(x))) * (1 + 1e-12));
        }
    }
}

TEST(Certificate, ExponentChoice) {
    const LogPowerSeries g({{Q(1), {1.0}}});
    const auto [Rp, S] = certificate_exponents(g, 2.5, 1, std::nullopt);
    EXPECT_DOUBLE_EQ(Rp, 2.75);
    EXPECT_DOUBLE_EQ(S, 2.625);
    const auto [Rp2, S2] = certificate_exponents(g, 2.5, 2, std::nullopt);
    EXPECT_DOUBLE_EQ(Rp2, 2.75);
    const auto [Rp3, S3] = certificate_exponents(g, 2.5, 1, 2.6);
    EXPECT_DOUBLE_EQ(Rp3, 2.55);
    EXPECT_LT(2.5, S3);
    EXPECT_LT(S3, Rp3);
}

TEST(Certificate, ZeroData) {
    const WedgeProblem p{AngleDescriptor::irrational(1.0), {}, {}};
    const auto sol = wedge_solve(p);
    const auto states = iterate(init(wedge_corner(p)), 4);
    std::mt19937_64 gen(71);
    const auto cert = certify_expansion(states, sol.evaluator.f, LogPowerSeries(std::vector<LogPowerTerm>{}), 2.5, std::nullopt, gen);
    for (double c : cert.C) EXPECT_EQ(c, 0.0);
    EXPECT_TRUE(cert.holds());
}

TEST(Certificate, NonResonantWedge) {
    const WedgeProblem p{AngleDescriptor::irrational(1.0), {{Q(1), 1.0}, {Q(3), 0.1}}, {{Q(2), 0.5}}};
    const auto sol = wedge_solve(p);
    const auto states = iterate(init(wedge_corner(p)), 5);
    std::mt19937_64 gen(72);
    const auto gamma = truncate(sol.expansion, 2.5);
    EXPECT_TRUE(is_log_free(gamma));
    const auto cert = certify_expansion(states, sol.evaluator.f, gamma, 2.5, 3.0, gen);
    EXPECT_LT(cert.R, cert.S);
    EXPECT_LT(cert.S, cert.R_prime);
    EXPECT_LE(cert.R_prime - cert.S, 1.0);
    ASSERT_EQ(cert.C.size(), 5u);
    for (std::size_t k = 1; k <= 5; ++k) {
        EXPECT_TRUE(std::isfinite(cert.C[k - 1]));
        EXPECT_LE(cert.C[k - 1], std::pow(cert.A, static_cast<double>(k)));
        EXPECT_GT(cert.steps[k - 1].window_samples, 0u);
    }
    EXPECT_TRUE(cert.holds());
}

TEST(Certificate, ResonantNeedsLogTerm) {
    const WedgeProblem p{AngleDescriptor::rational_pi(1, 2), {{Q(2), 1.0}}, {}};
    const auto sol = wedge_solve(p);
    const auto states = iterate(init(wedge_corner(p)), 5);
    const auto gamma = truncate(sol.expansion, 2.5);
    EXPECT_FALSE(is_log_free(gamma));
    std::mt19937_64 gen(73);
    EXPECT_TRUE(certify_expansion(states, sol.evaluator.f, gamma, 2.5, std::nullopt, gen).holds());

    std::vector<LogPowerTerm> stripped;
    for (auto t : gamma.terms()) {
        t.poly.resize(1);
        stripped.push_back(t);
    }
    const LogPowerSeries no_log(stripped);
    EXPECT_TRUE(is_log_free(no_log));
    EXPECT_FALSE(certify_expansion(states, sol.evaluator.f, no_log, 2.5, std::nullopt, gen).holds());
}

TEST(Certificate, WindowEmpty) {
    const auto sol = wedge_solve(linear_wedge);
    const auto states = iterate(init(wedge_corner(linear_wedge)), 3);
    std::mt19937_64 gen(74);
    EXPECT_THROW(certify_expansion(states, sol.evaluator.f, truncate(sol.expansion, 2.5), 2.5, std::nullopt, gen,
                                   {20, 1e30}),
                 window_empty);
}
