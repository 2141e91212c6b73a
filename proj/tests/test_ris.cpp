#include <gtest/gtest.h>

#include <cmath>

#include "arisim/channel.hpp"
#include "arisim/ris.hpp"

using namespace arisim;
using namespace arisim::ris;

namespace {

RisState make_state(std::vector<double> phases, std::vector<double> amps,
                    std::vector<double> p, Mode mode, double s_max = 10.0) {
    RisState s;
    s.phases = std::move(phases);
    s.amplitudes = std::move(amps);
    s.amplification = std::move(p);
    s.mode = mode;
    s.s_max = s_max;
    return s;
}

}  // namespace

TEST(Reflection, IdentityIsAllOnes) {
    const cvec r = reflection_matrix(RisState::identity(4));
    for (const auto& e : r) {
        EXPECT_NEAR(e.real(), 1.0, 1e-15);
        EXPECT_NEAR(e.imag(), 0.0, 1e-15);
    }
}

TEST(Reflection, SingleElementProduct) {
    const RisState s = make_state({kPi / 2.0}, {0.5}, {4.0}, Mode::Active);
    const cvec r = reflection_matrix(s);
    EXPECT_NEAR(r[0].real(), 0.0, 1e-12);
    EXPECT_NEAR(r[0].imag(), 2.0, 1e-12);
}

TEST(Reflection, PassiveRejectsAmplification) {
    const RisState s = make_state({0.0}, {1.0}, {2.0}, Mode::Passive);
    EXPECT_THROW(reflection_matrix(s), std::invalid_argument);
}

TEST(Reflection, InvariantModulus) {
    Rng rng(21);
    RisState s = RisState::identity(8, Mode::Active);
    for (std::size_t k = 0; k < 8; ++k) {
        s.phases[k] = rng.uniform(-kPi, kPi);
        s.amplitudes[k] = rng.uniform(0.1, 1.0);
        s.amplification[k] = rng.uniform(1.0, 10.0);
    }
    const cvec r = reflection_matrix(s);
    for (std::size_t k = 0; k < 8; ++k)
        EXPECT_NEAR(std::abs(r[k]), s.amplification[k] * s.amplitudes[k], 1e-12);
}

TEST(StateValidation, Bounds) {
    EXPECT_THROW(make_state({kPi}, {1.0}, {1.0}, Mode::Passive).validate(),
                 std::invalid_argument);  // phase must stay below +pi
    EXPECT_THROW(make_state({0.0}, {0.0}, {1.0}, Mode::Passive).validate(),
                 std::invalid_argument);  // amplitude must be positive
    EXPECT_THROW(make_state({0.0}, {1.0}, {11.0}, Mode::Active).validate(),
                 std::invalid_argument);  // above s_max
    EXPECT_THROW(make_state({0.0}, {1.0}, {0.5}, Mode::Active).validate(),
                 std::invalid_argument);  // below 1
    EXPECT_NO_THROW(make_state({-kPi}, {1.0}, {10.0}, Mode::Active).validate());
}

TEST(Cascade, IdentitySingleElement) {
    const CascadeInput c{{cgain{1.0, 0.0}}, {cgain{1.0, 0.0}}};
    const cgain g = cascaded_gain(c, RisState::identity(1));
    EXPECT_NEAR(g.real(), 1.0, 1e-15);
    EXPECT_NEAR(g.imag(), 0.0, 1e-15);
}

TEST(Cascade, LinearInAmplification) {
    Rng rng(4);
    CascadeInput c;
    RisState s = RisState::identity(6, Mode::Active);
    for (int k = 0; k < 6; ++k) {
        c.h_in.push_back(rng.cnormal());
        c.h_out.push_back(rng.cnormal());
        s.phases[k] = rng.uniform(-kPi, kPi);
        s.amplification[k] = rng.uniform(1.0, 5.0);
    }
    const cgain g1 = cascaded_gain(c, s);
    for (int k = 0; k < 6; ++k) s.amplification[k] *= 2.0;
    const cgain g2 = cascaded_gain(c, s);
    EXPECT_NEAR(std::abs(g2 - 2.0 * g1), 0.0, 1e-12);
}

TEST(Cascade, TwoElementHandExpansion) {
    // h_out . diag(e^{j0}, e^{-j pi/2}) . h_in with h_in = [1, j], h_out = [1, 1]:
    // 1*1*1 + 1*(-j)*j = 2.
    const CascadeInput c{{cgain{1.0, 0.0}, cgain{0.0, 1.0}},
                         {cgain{1.0, 0.0}, cgain{1.0, 0.0}}};
    const RisState s = make_state({0.0, -kPi / 2.0}, {1.0, 1.0}, {1.0, 1.0}, Mode::Active);
    const cgain g = cascaded_gain(c, s);
    EXPECT_NEAR(g.real(), 2.0, 1e-12);
    EXPECT_NEAR(g.imag(), 0.0, 1e-12);
}

TEST(Cascade, LengthMismatchRejected) {
    const CascadeInput c{{cgain{1.0, 0.0}}, {cgain{1.0, 0.0}}};
    EXPECT_THROW(cascaded_gain(c, RisState::identity(2)), std::invalid_argument);
    const CascadeInput bad{{cgain{1.0, 0.0}}, {}};
    EXPECT_THROW(cascaded_gain(bad, RisState::identity(1)), std::invalid_argument);
}

TEST(EffectiveChannel, DirectPlusCascade) {
    const CascadeInput c{{cgain{1.0, 0.0}}, {cgain{1.0, 0.0}}};
    const RisState s = RisState::identity(1);
    const cgain g = effective_channel(cgain{0.0, 0.0}, c, s);
    EXPECT_NEAR(std::abs(g - cgain{1.0, 0.0}), 0.0, 1e-15);
    const cgain g2 = effective_channel(cgain{0.5, -0.5}, c, s);
    EXPECT_NEAR(std::abs(g2 - cgain{1.5, -0.5}), 0.0, 1e-15);
}

TEST(EffectiveChannel, ZeroLengthLeavesDirect) {
    const CascadeInput c{{}, {}};
    const cgain d{0.7, 0.3};
    EXPECT_EQ(effective_channel(d, c, RisState::identity(0)), d);
}

TEST(EffectiveChannel, SuperpositionOfTwoSurfaces) {
    Rng rng(13);
    CascadeInput c1, c2;
    for (int k = 0; k < 4; ++k) {
        c1.h_in.push_back(rng.cnormal());
        c1.h_out.push_back(rng.cnormal());
        c2.h_in.push_back(rng.cnormal());
        c2.h_out.push_back(rng.cnormal());
    }
    const RisState s = RisState::identity(4);
    const cgain d{1.0, 1.0};
    const cgain sum = d + cascaded_gain(c1, s) + cascaded_gain(c2, s);
    const cgain chained = effective_channel(effective_channel(d, c1, s), c2, s);
    EXPECT_NEAR(std::abs(sum - chained), 0.0, 1e-12);
}

TEST(DynamicNoise, PassiveIsZero) {
    const cvec h_out{cgain{3.0, 4.0}};
    EXPECT_EQ(dynamic_noise_power(h_out, RisState::identity(1), DynamicNoiseParams{0.1}),
              0.0);
}

TEST(DynamicNoise, SingleElementValue) {
    RisState s = RisState::identity(1, Mode::Active);
    s.amplification[0] = 2.0;
    const cvec h_out{cgain{1.0, 0.0}};
    EXPECT_NEAR(dynamic_noise_power(h_out, s, DynamicNoiseParams{0.1}), 0.4, 1e-15);
}

TEST(DynamicNoise, QuadraticInAmplification) {
    Rng rng(31);
    RisState s = RisState::identity(5, Mode::Active);
    cvec h_out;
    for (int k = 0; k < 5; ++k) {
        h_out.push_back(rng.cnormal());
        s.amplification[k] = rng.uniform(1.0, 5.0);
        s.phases[k] = rng.uniform(-kPi, kPi);
    }
    const DynamicNoiseParams np{0.3};
    const double n1 = dynamic_noise_power(h_out, s, np);
    RisState s2 = s;
    for (double& p : s2.amplification) p *= 2.0;
    EXPECT_NEAR(dynamic_noise_power(h_out, s2, np) / n1, 4.0, 1e-12);
}

TEST(DynamicNoise, PhaseInvariant) {
    Rng rng(32);
    RisState s = RisState::identity(5, Mode::Active);
    cvec h_out;
    for (int k = 0; k < 5; ++k) {
        h_out.push_back(rng.cnormal());
        s.amplification[k] = rng.uniform(1.0, 5.0);
    }
    const DynamicNoiseParams np{0.2};
    const double n1 = dynamic_noise_power(h_out, s, np);
    for (double& th : s.phases) th = rng.uniform(-kPi, kPi);
    EXPECT_EQ(dynamic_noise_power(h_out, s, np), n1);
}

TEST(PhaseAlign, TrivialCases) {
    const CascadeInput c{{cgain{1.0, 0.0}}, {cgain{1.0, 0.0}}};
    const auto th = phase_align(c, cgain{1.0, 0.0});
    EXPECT_NEAR(th[0], 0.0, 1e-12);

    const CascadeInput cj{{cgain{1.0, 0.0}}, {cgain{0.0, 1.0}}};
    const auto thj = phase_align(cj, cgain{1.0, 0.0});
    EXPECT_NEAR(thj[0], -kPi / 2.0, 1e-12);
    RisState s = RisState::identity(1, Mode::Active);
    s.amplitudes[0] = 0.5;
    s.amplification[0] = 3.0;
    s.phases = thj;
    const cgain eff = effective_channel(cgain{1.0, 0.0}, cj, s);
    EXPECT_NEAR(std::abs(eff), 1.0 + 3.0 * 0.5, 1e-12);
}

TEST(PhaseAlign, ZeroMagnitudeElementGetsZeroPhase) {
    const CascadeInput c{{cgain{0.0, 0.0}, cgain{1.0, 0.0}},
                         {cgain{1.0, 0.0}, cgain{0.0, 1.0}}};
    const auto th = phase_align(c, cgain{1.0, 0.0});
    EXPECT_EQ(th[0], 0.0);
    EXPECT_NEAR(th[1], -kPi / 2.0, 1e-12);
}

TEST(PhaseAlign, DominatesRandomPhases) {
    Rng rng(77);
    for (int inst = 0; inst < 5; ++inst) {
        CascadeInput c;
        for (int k = 0; k < 4; ++k) {
            c.h_in.push_back(rng.cnormal());
            c.h_out.push_back(rng.cnormal());
        }
        const cgain direct = rng.cnormal();
        RisState s = RisState::identity(4);
        s.phases = phase_align(c, direct);
        const double best = std::abs(effective_channel(direct, c, s));
        for (int t = 0; t < 1000; ++t) {
            RisState r = RisState::identity(4);
            for (double& th : r.phases) th = rng.uniform(-kPi, kPi);
            EXPECT_GE(best + 1e-12, std::abs(effective_channel(direct, c, r)));
        }
    }
}
