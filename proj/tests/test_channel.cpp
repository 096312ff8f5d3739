#include <gtest/gtest.h>

#include "sfdr/channel.hpp"

using namespace sfdr;

TEST(Geometry, LinkVarianceIsPathLoss) {
    const LinkGeometry g{2.0, 0.5, 1.5, 3.0};
    EXPECT_DOUBLE_EQ(link_variance(g, Link::SD), std::pow(2.0, -3.0));
    EXPECT_DOUBLE_EQ(link_variance(g, Link::SR), std::pow(0.5, -3.0));
    EXPECT_DOUBLE_EQ(link_variance(g, Link::RD), std::pow(1.5, -3.0));
}

TEST(Geometry, PresetOffsets) {
    const auto l1 = LinkGeometry::preset_l1();
    const auto l2 = LinkGeometry::preset_l2();
    EXPECT_TRUE(l1.is_collinear());
    EXPECT_TRUE(l2.is_collinear());
    EXPECT_NEAR(snr_offset_db(l1, Link::SR), 7.96, 0.005);
    EXPECT_NEAR(snr_offset_db(l1, Link::RD), 4.44, 0.005);
    EXPECT_NEAR(snr_offset_db(l2, Link::SR), 1.94, 0.005);
    EXPECT_NEAR(snr_offset_db(l2, Link::RD), 13.98, 0.005);
    EXPECT_DOUBLE_EQ(snr_offset_db(l1, Link::SD), 0.0);
}

TEST(Geometry, ZeroDistanceRejected) {
    const auto g = LinkGeometry::collinear(1.0, 1.0);
    EXPECT_THROW(link_variance(g, Link::RD), Error);
    EXPECT_THROW(g.validate(), Error);
}

TEST(Noise, Validation) {
    EXPECT_THROW((NoiseModel{0.0, 0.0}.validate()), Error);
    EXPECT_THROW((NoiseModel{1.0, -0.1}.validate()), Error);
    EXPECT_NO_THROW((NoiseModel{1.0, 0.0}.validate()));
}

TEST(Power, BudgetChecked) {
    EXPECT_THROW((PowerAllocation{6.0, 5.0, 10.0}.validate()), Error);
    EXPECT_NO_THROW((PowerAllocation{5.0, 5.0, 10.0}.validate()));
    EXPECT_THROW((PowerAllocation{-1.0, 1.0, std::nullopt}.validate()), Error);
}

TEST(DrawChannel, ShapesAndSilentSelfInterference) {
    RandomStream rng(1, 0);
    const auto ch = draw_channel(LinkGeometry::preset_l1(), NoiseModel{1.0, 0.0}, 21, rng);
    EXPECT_EQ(ch.slots(), 21U);
    EXPECT_EQ(ch.h_sr.size(), 21U);
    EXPECT_EQ(ch.h_rd.size(), 21U);
    for (auto h : ch.h_rr) EXPECT_EQ(h, Complex{});
}

TEST(DrawChannel, EmpiricalVariancesMatchPathLoss) {
    const auto geom = LinkGeometry::preset_l2();
    const NoiseModel noise{1.0, 0.3};
    RandomStream rng(2, 0);
    const int n = 40000;
    double sr = 0.0, sd = 0.0, rd = 0.0, rr = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto ch = draw_channel(geom, noise, 1, rng);
        sr += std::norm(ch.h_sr[0]);
        sd += std::norm(ch.h_sd[0]);
        rd += std::norm(ch.h_rd[0]);
        rr += std::norm(ch.h_rr[0]);
    }
    // |h|^2 is exponential, so its relative standard error is 1/sqrt(n).
    const double tol = 5.0 / std::sqrt(n);
    EXPECT_NEAR(sr / n / link_variance(geom, Link::SR), 1.0, tol);
    EXPECT_NEAR(sd / n / link_variance(geom, Link::SD), 1.0, tol);
    EXPECT_NEAR(rd / n / link_variance(geom, Link::RD), 1.0, tol);
    EXPECT_NEAR(rr / n / 0.3, 1.0, tol);
}

TEST(DrawChannel, SlotsAreIndependent) {
    RandomStream rng(4, 0);
    const int n = 20000;
    double corr = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto ch = draw_channel(LinkGeometry{}, NoiseModel{}, 2, rng);
        corr += (ch.h_sd[0] * std::conj(ch.h_sd[1])).real();
    }
    EXPECT_NEAR(corr / n, 0.0, 5.0 / std::sqrt(2.0 * n));
}

TEST(DrawChannel, NeedsOneSlot) {
    RandomStream rng(1, 0);
    EXPECT_THROW(draw_channel(LinkGeometry{}, NoiseModel{}, 0, rng), Error);
}

TEST(EffectiveNoise, SelfInterferenceAddsOnlyWhenActive) {
    const NoiseModel n{0.5, 0.2};
    EXPECT_DOUBLE_EQ(effective_noise_variance(n, 3.0, false, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(effective_noise_variance(n, 3.0, true, 1.0), 0.5 + 3.0 * 0.2);
}
