#include <gtest/gtest.h>

#include <functional>

#include "sfdr/fec.hpp"
#include "sfdr/modem.hpp"

using namespace sfdr;

namespace {

using Encoder = std::function<Bits(const Bits&)>;

// Rate-1/2 outer code written out by hand: (u_k xor u_{k-1}, u_k).
Bits outer_reference(const Bits& u) {
    Bits c;
    std::uint8_t prev = 0;
    for (auto b : u) {
        c.push_back(static_cast<std::uint8_t>(b ^ prev));
        c.push_back(b);
        prev = b;
    }
    return c;
}

// Accumulator emitting the systematic bit at every `rate`-th step.
Encoder accumulator_reference(int rate) {
    return [rate](const Bits& v) {
        Bits c;
        std::uint8_t acc = 0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            acc ^= v[k];
            c.push_back(k % static_cast<std::size_t>(rate) == 0 ? v[k] : acc);
        }
        return c;
    };
}

struct ExactPosteriors {
    std::vector<double> input;
    std::vector<double> output;
};

// MAP by listing every input word: weight exp(sum of +-L/2 over inputs and outputs).
ExactPosteriors enumerate_map(const Encoder& enc, std::size_t n, const std::vector<double>& chan,
                              const std::vector<double>& prior) {
    const std::size_t n_out = chan.size();
    std::vector<long double> in0(n, 0), in1(n, 0), out0(n_out, 0), out1(n_out, 0);
    for (std::uint32_t word = 0; word < (1U << n); ++word) {
        Bits u(n);
        for (std::size_t k = 0; k < n; ++k) u[k] = static_cast<std::uint8_t>((word >> k) & 1U);
        const Bits c = enc(u);
        long double metric = 0;
        for (std::size_t k = 0; k < n; ++k) metric += (u[k] ? -0.5L : 0.5L) * prior[k];
        for (std::size_t j = 0; j < n_out; ++j) metric += (c[j] ? -0.5L : 0.5L) * chan[j];
        const long double w = std::exp(metric);
        for (std::size_t k = 0; k < n; ++k) (u[k] ? in1 : in0)[k] += w;
        for (std::size_t j = 0; j < n_out; ++j) (c[j] ? out1 : out0)[j] += w;
    }
    ExactPosteriors r;
    for (std::size_t k = 0; k < n; ++k) r.input.push_back(static_cast<double>(std::log(in0[k] / in1[k])));
    for (std::size_t j = 0; j < n_out; ++j) r.output.push_back(static_cast<double>(std::log(out0[j] / out1[j])));
    return r;
}

void check_against_enumeration(const Trellis& trellis, const Encoder& enc, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    const auto n_out = static_cast<std::size_t>(trellis.outputs_per_step());
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> chan(n * n_out), prior(n);
            for (auto& v : chan) v = 3.0 * rng.normal();
            for (auto& v : prior) v = rep == 0 ? 0.0 : 2.0 * rng.normal();
            const auto exact = enumerate_map(enc, n, chan, prior);
            const auto got = bcjr_decode(chan, prior, trellis);
            for (std::size_t k = 0; k < n; ++k) {
                EXPECT_NEAR(got.input_posterior[k], exact.input[k], 1e-9) << "n=" << n << " k=" << k;
                EXPECT_NEAR(got.input_extrinsic[k], exact.input[k] - prior[k], 1e-9);
            }
            for (std::size_t j = 0; j < chan.size(); ++j) {
                EXPECT_NEAR(got.output_posterior[j], exact.output[j], 1e-9);
                EXPECT_NEAR(got.output_extrinsic[j], exact.output[j] - chan[j], 1e-9);
            }
        }
    }
}

}  // namespace

TEST(Octal, DigitsAreReadAsOctal) {
    EXPECT_EQ(octal_digits_to_value(3), 3U);
    EXPECT_EQ(octal_digits_to_value(13), 11U);
    EXPECT_EQ(octal_digits_to_value(171), 121U);
    EXPECT_THROW(octal_digits_to_value(8), Error);
}

TEST(OuterCode, MatchesHandEncoder) {
    const unsigned g[] = {3, 2};
    const Trellis t = feedforward_code(g);
    EXPECT_EQ(t.states(), 2);
    RandomStream rng(1, 0);
    Bits u(64);
    for (auto& b : u) b = rng.bit();
    EXPECT_EQ(t.encode(u), outer_reference(u));
}

TEST(OuterCode, TextbookSevenFive) {
    const unsigned g[] = {7, 5};
    const Trellis t = feedforward_code(g);
    EXPECT_EQ(t.encode(Bits{1, 0, 1, 1}), (Bits{1, 1, 1, 0, 0, 0, 0, 1}));
}

TEST(InnerCode, DopedAccumulatorMatchesHandEncoder) {
    for (int rate : {1, 2, 3}) {
        const Trellis t = doped_accumulator(rate);
        RandomStream rng(2, static_cast<std::uint64_t>(rate));
        Bits v(50);
        for (auto& b : v) b = rng.bit();
        EXPECT_EQ(t.encode(v), accumulator_reference(rate)(v));
    }
    EXPECT_EQ(doped_accumulator(2).encode(Bits{1, 1, 0, 1}), (Bits{1, 0, 0, 1}));
}

TEST(Bcjr, OuterCodeEqualsExhaustiveMap) {
    const unsigned g[] = {3, 2};
    check_against_enumeration(feedforward_code(g), outer_reference, 10);
}

TEST(Bcjr, DopedAccumulatorEqualsExhaustiveMap) {
    check_against_enumeration(doped_accumulator(2), accumulator_reference(2), 11);
}

TEST(Bcjr, EmptyPriorMeansUniform) {
    const unsigned g[] = {3, 2};
    const Trellis t = feedforward_code(g);
    std::vector<double> chan{1.0, -2.0, 0.5, 3.0, -1.0, 0.2};
    std::vector<double> zeros(3, 0.0);
    const auto a = bcjr_decode(chan, {}, t);
    const auto b = bcjr_decode(chan, zeros, t);
    EXPECT_EQ(a.input_posterior, b.input_posterior);
    EXPECT_EQ(a.output_posterior, b.output_posterior);
}

TEST(Bcjr, OutputsAreClamped) {
    const Trellis t = doped_accumulator(2);
    std::vector<double> chan(16, 50.0), prior(16, 50.0);
    const auto r = bcjr_decode(chan, prior, t);
    for (double v : r.input_posterior) EXPECT_LE(std::abs(v), kLlrClamp);
    for (double v : r.output_posterior) EXPECT_LE(std::abs(v), kLlrClamp);
}

TEST(Bcjr, LengthMismatchRejected) {
    const unsigned g[] = {3, 2};
    std::vector<double> chan(5, 0.0);
    EXPECT_THROW(bcjr_decode(chan, {}, feedforward_code(g)), Error);
    std::vector<double> chan2(6, 0.0), prior(2, 0.0);
    EXPECT_THROW(bcjr_decode(chan2, prior, feedforward_code(g)), Error);
}

TEST(Interleaver, RoundTripAndBijection) {
    const auto p = Interleaver::random(1024, 5);
    std::vector<int> x(1024);
    std::iota(x.begin(), x.end(), 0);
    const auto y = p.interleave<int>(x);
    EXPECT_NE(y, x);
    EXPECT_EQ(p.deinterleave<int>(y), x);
    auto sorted = y;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, x);
    EXPECT_EQ(Interleaver::random(1024, 5).permutation(), p.permutation());
    EXPECT_NE(Interleaver::random(1024, 6).permutation(), p.permutation());
}

TEST(Interleaver, InvalidPermutationRejected) {
    EXPECT_THROW(Interleaver(std::vector<std::size_t>{0, 0, 1}), Error);
    EXPECT_THROW(Interleaver(std::vector<std::size_t>{0, 3, 1}), Error);
}

TEST(Sccc, CodedLengthIsTwiceInfoLength) {
    const SerialCodec codec(CodecConfig{});
    Bits info(512, 1);
    EXPECT_EQ(codec.encode(info).size(), 1024U);
    EXPECT_EQ(sccc_encode(info, codec).size(), 1024U);
    EXPECT_THROW(codec.encode(Bits(10, 0)), Error);
}

TEST(Sccc, EncoderIsOuterInterleaveInner) {
    CodecConfig cfg;
    cfg.info_bits = 40;
    const SerialCodec codec(cfg);
    RandomStream rng(3, 0);
    Bits info(40);
    for (auto& b : info) b = rng.bit();
    const Bits outer = outer_reference(info);
    const Bits expect = accumulator_reference(2)(codec.interleaver().interleave<std::uint8_t>(outer));
    EXPECT_EQ(codec.encode(info), expect);
}

TEST(Sccc, NoiselessDecodeRecoversInfo) {
    const SerialCodec codec(CodecConfig{});
    RandomStream rng(4, 0);
    for (int f = 0; f < 5; ++f) {
        Bits info(512);
        for (auto& b : info) b = rng.bit();
        const Bits coded = codec.encode(info);
        std::vector<double> llr(coded.size());
        for (std::size_t k = 0; k < coded.size(); ++k) llr[k] = coded[k] ? -8.0 : 8.0;
        const auto r = codec.decode(llr);
        EXPECT_EQ(r.info_hat, info);
        EXPECT_EQ(codec.decode_info(llr), info);
        EXPECT_EQ(sccc_decode(llr, codec).info_hat, info);
        ASSERT_EQ(r.coded_llr.size(), coded.size());
        for (std::size_t k = 0; k < coded.size(); ++k) EXPECT_EQ(llr_to_bit(r.coded_llr[k]), coded[k]);
    }
}

TEST(Sccc, CodingGainOverUncodedOnAwgn) {
    const SerialCodec codec(CodecConfig{});
    RandomStream rng(5, 0);
    const double es_n0 = db_to_linear(1.0);
    const double sigma2 = 1.0 / es_n0;
    std::size_t coded_errors = 0, raw_errors = 0;
    for (int f = 0; f < 20; ++f) {
        Bits info(512);
        for (auto& b : info) b = rng.bit();
        const Bits coded = codec.encode(info);
        std::vector<double> llr(coded.size());
        for (std::size_t k = 0; k < coded.size(); ++k) {
            const double y = (coded[k] ? -1.0 : 1.0) + std::sqrt(sigma2 / 2.0) * rng.normal();
            llr[k] = 4.0 * y / sigma2;
            raw_errors += llr_to_bit(llr[k]) != coded[k];
        }
        const Bits hat = codec.decode_info(llr);
        for (std::size_t k = 0; k < hat.size(); ++k) coded_errors += hat[k] != info[k];
    }
    EXPECT_GT(raw_errors, 50U);
    EXPECT_LT(coded_errors * 10, raw_errors);
}

TEST(Sccc, ZeroLlrDecidesZero) {
    EXPECT_EQ(llr_to_bit(0.0), 0);
    EXPECT_EQ(llr_to_bit(-0.0), 0);
    EXPECT_EQ(llr_to_bit(-1e-300), 1);
}

TEST(Crc, CcittFalseCheckValue) {
    Bits bits;
    for (char ch : std::string("123456789"))
        for (int i = 7; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((static_cast<unsigned>(ch) >> i) & 1U));
    EXPECT_EQ(crc16(bits), 0x29B1);
}

TEST(Crc, AttachThenCheck) {
    RandomStream rng(6, 0);
    Bits payload(496);
    for (auto& b : payload) b = rng.bit();
    Bits word = crc_attach(payload);
    ASSERT_EQ(word.size(), 512U);
    EXPECT_TRUE(std::equal(payload.begin(), payload.end(), word.begin()));
    EXPECT_TRUE(crc_check(word));
    for (std::size_t k : {0UL, 100UL, 495UL, 500UL, 511UL}) {
        Bits bad = word;
        bad[k] ^= 1U;
        EXPECT_FALSE(crc_check(bad)) << k;
    }
    EXPECT_FALSE(crc_check(Bits(8, 0)));
}
