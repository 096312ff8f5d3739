#include <gtest/gtest.h>

#include <algorithm>

#include "sfdr/analysis.hpp"
#include "sfdr/relay.hpp"

using namespace sfdr;

namespace {

// Scalar complex LMMSE estimate of x from y = sqrt(P_S) h x + (SI + noise).
Complex scalar_mmse_weight(Complex h, double p_s, double p_r, double s_rr, double s0, double sx) {
    return std::sqrt(p_s) * std::conj(h) * sx / (p_s * std::norm(h) * sx + p_r * sx * s_rr + s0);
}

RelayContext make_ctx(const SerialCodec* codec, double p_s, double p_r, double s_rr) {
    RelayContext ctx;
    ctx.codec = codec;
    ctx.p_s = p_s;
    ctx.p_r = p_r;
    ctx.noise = NoiseModel{1.0, s_rr};
    ctx.epsilon = 0.5;
    return ctx;
}

// Asymptotic Kolmogorov tail probability for statistic d over n samples.
double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) sum += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

TEST(Mmse, EqualsScalarComplexWeight) {
    RandomStream rng(1, 0);
    for (int k = 0; k < 500; ++k) {
        const Complex h = rng.complex_gaussian(1.0);
        const double p_s = 0.1 + 10.0 * rng.uniform();
        const double p_r = 10.0 * rng.uniform();
        const double s_rr = rng.uniform();
        const double s0 = 0.2 + rng.uniform();
        const RealMatrix2 w = mmse_matrix(h, p_s, p_r, s_rr, s0, 1.0);
        const RealMatrix2 want = complex_to_real_matrix(scalar_mmse_weight(h, p_s, p_r, s_rr, s0, 1.0), 1.0);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(w.a[static_cast<std::size_t>(i)], want.a[static_cast<std::size_t>(i)], 1e-12);
    }
}

TEST(Mmse, ErrorVarianceMatchesAnalysis) {
    // Per-dimension error of the LMMSE estimate of a unit-power Gaussian symbol.
    const Complex h{0.6, -0.9};
    const double p_s = 3.0, p_r = 2.0, s_rr = 0.4;
    const Complex w = scalar_mmse_weight(h, p_s, p_r, s_rr, 1.0, 1.0);
    const double mse = 1.0 - (w * std::sqrt(p_s) * h).real();
    EXPECT_NEAR(mse / 2.0, sigma_ce_sq(p_s, std::norm(h), p_r, s_rr, 1.0, 1.0, true), 1e-12);
}

TEST(Selection, BoundaryIsInclusive) {
    EXPECT_TRUE(select_symbol(0.5, 0.5));
    EXPECT_FALSE(select_symbol(std::nextafter(0.5, 1.0), 0.5));
    EXPECT_FALSE(select_symbol(1e-30, 0.0));
}

TEST(Selection, SquareDeviationIsEuclidean) {
    const RealMatrix2 w = RealMatrix2::scaled_identity(2.0);
    EXPECT_DOUBLE_EQ(square_deviation(w, {1.0, 1.0}, {2.0, 0.0}), 4.0);
}

TEST(SelectFrame, UnselectedSymbolsAreSilenced) {
    const auto ctx = make_ctx(nullptr, 1.0, 1.0, 0.0);
    const std::vector<Complex> y{{10.0, 10.0}, {0.7, 0.7}};
    const std::vector<Complex> x_hat{ctx.constellation.point(0), ctx.constellation.point(0)};
    const auto out = select_frame(y, {1.0, 0.0}, x_hat, SelectionMask(2, false), ctx);
    EXPECT_FALSE(out.mask[0]);
    EXPECT_EQ(out.next_frame[0], Complex{});
    EXPECT_TRUE(out.mask[1]);
    EXPECT_EQ(out.next_frame[1], x_hat[1]);
}

TEST(SelectFrame, EpsilonZeroSelectsNothing) {
    auto ctx = make_ctx(nullptr, 10.0, 1.0, 0.0);
    ctx.epsilon = 0.0;
    RandomStream rng(2, 0);
    std::vector<Complex> x(100), y(100);
    for (std::size_t m = 0; m < x.size(); ++m) {
        x[m] = ctx.constellation.point(static_cast<unsigned>(rng.next() % 4));
        y[m] = std::sqrt(10.0) * x[m] + rng.complex_gaussian(1.0);
    }
    const auto out = select_frame(y, {1.0, 0.0}, x, SelectionMask(100, false), ctx);
    for (bool b : out.mask) EXPECT_FALSE(b);
}

TEST(SelectFrame, ChiSquareLawForGaussianSymbols) {
    // With Gaussian symbols the deviation of the correct symbol is exactly chi-square.
    const Complex h{0.8, 0.3};
    const double p_s = 2.0, p_r = 1.5, s_rr = 0.5;
    for (bool si : {false, true}) {
        auto ctx = make_ctx(nullptr, p_s, p_r, s_rr);
        const std::size_t n = 100000;
        RandomStream rng(3, si ? 1 : 0);
        std::vector<Complex> x(n), y(n);
        const double noise = effective_noise_variance(ctx.noise, p_r, si, 1.0);
        for (std::size_t m = 0; m < n; ++m) {
            x[m] = rng.complex_gaussian(1.0);
            y[m] = std::sqrt(p_s) * h * x[m] + rng.complex_gaussian(noise);
        }
        const auto out = select_frame(y, h, x, SelectionMask(n, si), ctx);
        double hits = 0;
        for (bool b : out.mask) hits += b ? 1 : 0;
        const double p = p_select(ctx.epsilon, sigma_ce_sq(p_s, std::norm(h), p_r, s_rr, 1.0, 1.0, si));
        EXPECT_NEAR(hits / n, p, 5.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST(SelectFrame, NormalizedDeviationIsChiSquareTwoDof) {
    const Complex h{0.5, -0.6};
    const double p_s = 3.0, p_r = 1.0, s_rr = 0.4;
    for (bool gaussian : {true, false}) {
        for (bool si : {false, true}) {
            auto ctx = make_ctx(nullptr, gaussian ? p_s : db_to_linear(10.0), p_r, s_rr);
            const std::size_t n = 10000;
            RandomStream rng(6, (gaussian ? 2 : 0) + (si ? 1 : 0));
            std::vector<Complex> x(n), y(n);
            const double noise = effective_noise_variance(ctx.noise, p_r, si, 1.0);
            for (std::size_t m = 0; m < n; ++m) {
                x[m] = gaussian ? rng.complex_gaussian(1.0) : ctx.constellation.point(static_cast<unsigned>(rng.next() % 4));
                y[m] = std::sqrt(ctx.p_s) * h * x[m] + rng.complex_gaussian(noise);
            }
            const auto out = select_frame(y, h, x, SelectionMask(n, si), ctx);
            const double var = sigma_ce_sq(ctx.p_s, std::norm(h), p_r, s_rr, 1.0, 1.0, si);
            std::vector<double> z(out.deviation);
            for (auto& v : z) v /= var;
            std::sort(z.begin(), z.end());
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double cdf = -std::expm1(-z[i] / 2.0);
                d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
            }
            EXPECT_GT(ks_p_value(d, n), 0.01) << "gaussian=" << gaussian << " si=" << si << " D=" << d;
        }
    }
}

TEST(RelaySlot, UncodedHighSnrForwardsEverything) {
    const auto ctx = make_ctx(nullptr, 1e4, 1.0, 0.0);
    RandomStream rng(4, 0);
    std::vector<Complex> x(64), y(64);
    for (std::size_t m = 0; m < x.size(); ++m) {
        x[m] = ctx.constellation.point(static_cast<unsigned>(rng.next() % 4));
        y[m] = 100.0 * Complex{0.0, 1.0} * x[m] + rng.complex_gaussian(1.0);
    }
    const auto out = relay_slot(y, {0.0, 1.0}, RelaySlotState::silent(64), ctx);
    EXPECT_EQ(out.next_frame, x);
    EXPECT_TRUE(out.info_hat.empty());
}

TEST(RelaySlot, CodedPipelineReconstructsAndSelects) {
    CodecConfig cc;
    cc.info_bits = 128;
    const SerialCodec codec(cc);
    const auto ctx = make_ctx(&codec, db_to_linear(12.0), 1.0, 0.01);
    RandomStream rng(5, 0);
    Bits info(128);
    for (auto& b : info) b = rng.bit();
    const auto x = modulate(codec.encode(info), ctx.constellation);
    const Complex h{0.9, -0.4};
    std::vector<Complex> y(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) y[m] = std::sqrt(ctx.p_s) * h * x[m] + rng.complex_gaussian(1.0);
    const auto out = relay_slot(y, h, RelaySlotState::silent(x.size()), ctx);
    EXPECT_EQ(out.info_hat, info);
    EXPECT_EQ(out.reconstructed, x);
    std::size_t selected = 0;
    for (std::size_t m = 0; m < x.size(); ++m) {
        EXPECT_EQ(out.mask[m], out.deviation[m] <= ctx.epsilon);
        EXPECT_EQ(out.next_frame[m], out.mask[m] ? x[m] : Complex{});
        selected += out.mask[m] ? 1U : 0U;
    }
    EXPECT_GT(selected, x.size() * 3 / 4);
}

TEST(RelaySlot, SelfInterferenceFollowsPreviousMask) {
    // A forwarded symbol in the previous slot widens the demodulator's noise for that position only.
    const auto ctx = make_ctx(nullptr, 4.0, 10.0, 1.0);
    const std::vector<Complex> y{{1.0, 0.3}, {1.0, 0.3}};
    const auto llr = relay_demodulate(y, {1.0, 0.0}, SelectionMask{true, false}, ctx);
    EXPECT_LT(std::abs(llr[0]), std::abs(llr[2]));
    EXPECT_LT(std::abs(llr[1]), std::abs(llr[3]));
}

TEST(RelaySlot, LengthMismatchRejected) {
    const auto ctx = make_ctx(nullptr, 1.0, 1.0, 0.0);
    const std::vector<Complex> y(4);
    EXPECT_THROW(relay_slot(y, {1.0, 0.0}, RelaySlotState::silent(3), ctx), Error);
}

TEST(Baselines, CrcForwardsWholeFrameOnlyWhenCheckPasses) {
    CodecConfig cc;
    cc.info_bits = 64;
    const SerialCodec codec(cc);
    RandomStream rng(6, 0);
    Bits payload(48);
    for (auto& b : payload) b = rng.bit();
    const Bits info = crc_attach(payload);
    auto ctx = make_ctx(&codec, 1.0, 1.0, 0.0);
    const auto x = modulate(codec.encode(info), ctx.constellation);
    for (double snr_db : {-10.0, 20.0}) {
        ctx.p_s = db_to_linear(snr_db);
        std::vector<Complex> y(x.size());
        for (std::size_t m = 0; m < x.size(); ++m) y[m] = std::sqrt(ctx.p_s) * x[m] + rng.complex_gaussian(1.0);
        const auto out = relay_slot(Protocol::crc_sdf, y, {1.0, 0.0}, RelaySlotState::silent(x.size()), ctx);
        const bool pass = crc_check(out.info_hat);
        EXPECT_EQ(pass, snr_db > 0.0);
        for (std::size_t m = 0; m < x.size(); ++m) {
            EXPECT_EQ(out.mask[m], pass);
            EXPECT_EQ(out.next_frame[m], pass ? out.reconstructed[m] : Complex{});
        }
    }
}

TEST(Baselines, ThresholdUsesInstantaneousSinr) {
    CodecConfig cc;
    cc.info_bits = 16;
    const SerialCodec codec(cc);
    auto ctx = make_ctx(&codec, 3.0, 2.0, 1.0);
    const std::vector<Complex> y(16, Complex{0.5, 0.5});
    BaselineSideInfo side;
    side.gamma_t = 3.0;
    side.h_rr = {0.5, 0.0};
    // No self-interference: SINR = 3 |h|^2 = 3 with |h| = 1, exactly at the threshold.
    auto out = relay_slot(Protocol::threshold_sdf, y, {1.0, 0.0}, RelaySlotState::silent(16), ctx, side);
    EXPECT_TRUE(out.mask[0]);
    // Previous frame fully forwarded: SINR = 3 / (2 * 0.25 + 1) = 2 < 3.
    RelaySlotState busy{std::vector<Complex>(16, Complex{1.0, 0.0}), SelectionMask(16, true)};
    out = relay_slot(Protocol::threshold_sdf, y, {1.0, 0.0}, busy, ctx, side);
    EXPECT_FALSE(out.mask[0]);
    for (auto v : out.next_frame) EXPECT_EQ(v, Complex{});
}

TEST(Baselines, PerfectRelayForwardsTrueFrame) {
    const auto ctx = make_ctx(nullptr, 1.0, 1.0, 0.0);
    const std::vector<Complex> x{ctx.constellation.point(1), ctx.constellation.point(2)};
    const Bits info{1, 0, 1};
    BaselineSideInfo side;
    side.source_frame = x;
    side.source_info = info;
    const std::vector<Complex> y(2, Complex{-100.0, 0.0});
    const auto out = relay_slot(Protocol::perfect_relay, y, {1.0, 0.0}, RelaySlotState::silent(2), ctx, side);
    EXPECT_EQ(out.next_frame, x);
    EXPECT_EQ(out.info_hat, info);
}

TEST(Protocol, NamesRoundTrip) {
    for (auto p : {Protocol::proposed, Protocol::crc_sdf, Protocol::threshold_sdf, Protocol::perfect_relay})
        EXPECT_EQ(parse_protocol(to_string(p)), p);
    EXPECT_THROW(parse_protocol("amplify"), Error);
}
