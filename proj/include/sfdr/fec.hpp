#pragma once

// Serially concatenated convolutional code: a memory-1 feed-forward outer code,
// a random interleaver and a doped accumulator, decoded by iterating two exact
// log-domain BCJR SISO modules. Also the CRC-16 used by the frame-level baseline.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <boost/crc.hpp>

#include "sfdr/modem.hpp"
#include "sfdr/signalcore.hpp"

namespace sfdr {

using Bits = std::vector<std::uint8_t>;
using Llrs = std::vector<double>;

/// Hard decision; an LLR of exactly zero decides 0.
inline std::uint8_t llr_to_bit(double llr) { return llr < 0.0 ? 1 : 0; }

inline Bits hard_decisions(std::span<const double> llrs) {
    Bits out(llrs.size());
    std::transform(llrs.begin(), llrs.end(), out.begin(), llr_to_bit);
    return out;
}

/// Reads the decimal digits of `digits` as an octal number: 13 -> 0o13 = 11.
inline unsigned octal_digits_to_value(unsigned digits) {
    unsigned value = 0;
    unsigned scale = 1;
    while (digits > 0) {
        const unsigned d = digits % 10;
        require(d < 8, "octal_digits_to_value: digit out of range");
        value += d * scale;
        scale *= 8;
        digits /= 10;
    }
    return value;
}

/// One trellis section: for state s and input u, index s*2+u.
struct TrellisSection {
    std::vector<int> next;
    std::vector<unsigned> out;  // bit j (LSB = j=0) is output j
};

/// Binary-input trellis with a periodic (possibly time-varying) section pattern.
/// Encoding always starts in state 0; the final state is left open.
class Trellis {
public:
    Trellis(int states, int outputs, std::vector<TrellisSection> period)
        : states_(states), outputs_(outputs), period_(std::move(period)) {
        require(states_ >= 1 && outputs_ >= 1 && !period_.empty(), "Trellis: empty description");
        for (const auto& sec : period_) {
            require(sec.next.size() == static_cast<std::size_t>(2 * states_) && sec.out.size() == sec.next.size(),
                    "Trellis: section size mismatch");
        }
    }

    int states() const { return states_; }
    int outputs_per_step() const { return outputs_; }
    const TrellisSection& section(std::size_t k) const { return period_[k % period_.size()]; }

    Bits encode(std::span<const std::uint8_t> input) const {
        Bits out;
        out.reserve(input.size() * static_cast<std::size_t>(outputs_));
        int s = 0;
        for (std::size_t k = 0; k < input.size(); ++k) {
            const auto& sec = section(k);
            const auto idx = static_cast<std::size_t>(s * 2 + (input[k] & 1));
            for (int j = 0; j < outputs_; ++j) out.push_back(static_cast<std::uint8_t>((sec.out[idx] >> j) & 1U));
            s = sec.next[idx];
        }
        return out;
    }

private:
    int states_;
    int outputs_;
    std::vector<TrellisSection> period_;
};

/// Non-recursive convolutional code from octal generators (MSB tap = current input).
inline Trellis feedforward_code(std::span<const unsigned> generators_octal) {
    require(!generators_octal.empty(), "feedforward_code: no generators");
    std::vector<unsigned> taps;
    unsigned constraint = 1;
    for (unsigned g : generators_octal) {
        const unsigned v = octal_digits_to_value(g);
        require(v != 0, "feedforward_code: zero generator");
        taps.push_back(v);
        unsigned len = 0;
        while ((v >> len) != 0) ++len;
        constraint = std::max(constraint, len);
    }
    const unsigned memory = constraint - 1;
    const int states = 1 << memory;
    TrellisSection sec;
    sec.next.resize(static_cast<std::size_t>(2 * states));
    sec.out.resize(sec.next.size());
    for (int s = 0; s < states; ++s) {
        for (unsigned u = 0; u < 2; ++u) {
            const unsigned reg = (u << memory) | static_cast<unsigned>(s);
            unsigned out = 0;
            for (std::size_t j = 0; j < taps.size(); ++j) out |= (std::popcount(reg & taps[j]) & 1U) << j;
            const auto idx = static_cast<std::size_t>(s * 2) + u;
            sec.next[idx] = static_cast<int>(reg >> 1);
            sec.out[idx] = out;
        }
    }
    return Trellis(states, static_cast<int>(taps.size()), {sec});
}

/// Rate-1 accumulator a_k = a_{k-1} xor v_k whose output at steps k = 0 mod doping_rate
/// is the systematic input v_k instead of a_k.
inline Trellis doped_accumulator(int doping_rate) {
    require(doping_rate >= 1, "doped_accumulator: doping rate must be >= 1");
    std::vector<TrellisSection> period(static_cast<std::size_t>(doping_rate));
    for (int k = 0; k < doping_rate; ++k) {
        auto& sec = period[static_cast<std::size_t>(k)];
        sec.next.resize(4);
        sec.out.resize(4);
        for (int s = 0; s < 2; ++s) {
            for (int u = 0; u < 2; ++u) {
                const auto idx = static_cast<std::size_t>(s * 2 + u);
                sec.next[idx] = s ^ u;
                sec.out[idx] = static_cast<unsigned>(k == 0 ? u : (s ^ u));
            }
        }
    }
    return Trellis(2, 1, std::move(period));
}

struct SisoResult {
    Llrs input_posterior;
    Llrs input_extrinsic;
    Llrs output_posterior;
    Llrs output_extrinsic;
};

/// Exact forward-backward APP decoding.
///
/// chan_llr holds steps*outputs observations of the trellis outputs; prior_llr holds
/// one a-priori LLR per input bit (empty means uniform). Extrinsic values are the
/// posteriors minus the corresponding input terms. Every returned value is clamped.
/// The recursions run on probabilities rescaled to a unit maximum at every step.
inline SisoResult bcjr_decode(std::span<const double> chan_llr, std::span<const double> prior_llr,
                              const Trellis& trellis) {
    const auto n_out = static_cast<std::size_t>(trellis.outputs_per_step());
    require(chan_llr.size() % n_out == 0, "bcjr_decode: channel LLR length not a multiple of outputs per step");
    const std::size_t steps = chan_llr.size() / n_out;
    require(prior_llr.empty() || prior_llr.size() == steps, "bcjr_decode: prior length mismatch");
    const auto n_states = static_cast<std::size_t>(trellis.states());
    const std::size_t n_branch = 2 * n_states;

    auto prior = [&](std::size_t k) { return prior_llr.empty() ? 0.0 : prior_llr[k]; };

    // Branch weight exp(+-L/2) per input and output bit, multiplied over the branch label.
    std::vector<double> gamma(steps * n_branch);
    std::array<double, 2> w_in{};
    std::vector<std::array<double, 2>> w_out(n_out);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& sec = trellis.section(k);
        const double e_in = std::exp(0.5 * prior(k));
        w_in = {e_in, 1.0 / e_in};
        for (std::size_t j = 0; j < n_out; ++j) {
            const double e = std::exp(0.5 * chan_llr[k * n_out + j]);
            w_out[j] = {e, 1.0 / e};
        }
        double* g = &gamma[k * n_branch];
        for (std::size_t b = 0; b < n_branch; ++b) {
            double v = w_in[b & 1U];
            for (std::size_t j = 0; j < n_out; ++j) v *= w_out[j][(sec.out[b] >> j) & 1U];
            g[b] = v;
        }
    }

    auto normalize = [n_states](double* v) {
        const double m = *std::max_element(v, v + n_states);
        for (std::size_t s = 0; s < n_states; ++s) v[s] /= m;
    };

    std::vector<double> alpha((steps + 1) * n_states, 0.0);
    std::vector<double> beta((steps + 1) * n_states, 1.0);
    alpha[0] = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& sec = trellis.section(k);
        const double* g = &gamma[k * n_branch];
        const double* cur = &alpha[k * n_states];
        double* next = &alpha[(k + 1) * n_states];
        for (std::size_t b = 0; b < n_branch; ++b) next[static_cast<std::size_t>(sec.next[b])] += cur[b >> 1] * g[b];
        normalize(next);
    }
    for (std::size_t k = steps; k-- > 0;) {
        const auto& sec = trellis.section(k);
        const double* g = &gamma[k * n_branch];
        const double* nxt = &beta[(k + 1) * n_states];
        double* cur = &beta[k * n_states];
        for (std::size_t s = 0; s < n_states; ++s)
            cur[s] = g[2 * s] * nxt[static_cast<std::size_t>(sec.next[2 * s])] +
                     g[2 * s + 1] * nxt[static_cast<std::size_t>(sec.next[2 * s + 1])];
        normalize(cur);
    }

    SisoResult r;
    r.input_posterior.resize(steps);
    r.input_extrinsic.resize(steps);
    r.output_posterior.resize(steps * n_out);
    r.output_extrinsic.resize(steps * n_out);
    std::vector<double> out0(n_out), out1(n_out);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& sec = trellis.section(k);
        const double* g = &gamma[k * n_branch];
        const double* a = &alpha[k * n_states];
        const double* bt = &beta[(k + 1) * n_states];
        double in0 = 0.0, in1 = 0.0;
        for (std::size_t j = 0; j < n_out; ++j) out0[j] = out1[j] = 0.0;
        for (std::size_t b = 0; b < n_branch; ++b) {
            const double m = a[b >> 1] * g[b] * bt[static_cast<std::size_t>(sec.next[b])];
            ((b & 1U) == 0 ? in0 : in1) += m;
            const unsigned out = sec.out[b];
            for (std::size_t j = 0; j < n_out; ++j) (((out >> j) & 1U) == 0 ? out0[j] : out1[j]) += m;
        }
        const double post = std::log(in0 / in1);
        r.input_posterior[k] = clamp_llr(post);
        r.input_extrinsic[k] = clamp_llr(post - prior(k));
        for (std::size_t j = 0; j < n_out; ++j) {
            const double p = std::log(out0[j] / out1[j]);
            r.output_posterior[k * n_out + j] = clamp_llr(p);
            r.output_extrinsic[k * n_out + j] = clamp_llr(p - chan_llr[k * n_out + j]);
        }
    }
    return r;
}

/// Fixed permutation; interleave(x)[k] = x[perm[k]].
class Interleaver {
public:
    explicit Interleaver(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
        std::vector<std::uint8_t> seen(perm_.size(), 0);
        for (auto p : perm_) {
            require(p < perm_.size() && !seen[p], "Interleaver: permutation is not a bijection");
            seen[p] = 1;
        }
    }

    static Interleaver identity(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        return Interleaver(std::move(p));
    }

    static Interleaver random(std::size_t n, std::uint64_t seed) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        RandomStream rng(seed, 0x1e7e41ea5eULL);
        std::shuffle(p.begin(), p.end(), rng.engine());
        return Interleaver(std::move(p));
    }

    std::size_t size() const { return perm_.size(); }
    const std::vector<std::size_t>& permutation() const { return perm_; }

    template <typename T>
    std::vector<T> interleave(std::span<const T> x) const {
        require(x.size() == perm_.size(), "Interleaver: length mismatch");
        std::vector<T> y(x.size());
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[perm_[k]];
        return y;
    }

    template <typename T>
    std::vector<T> deinterleave(std::span<const T> y) const {
        require(y.size() == perm_.size(), "Interleaver: length mismatch");
        std::vector<T> x(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) x[perm_[k]] = y[k];
        return x;
    }

private:
    std::vector<std::size_t> perm_;
};

struct CodecConfig {
    std::size_t info_bits = 512;
    std::array<unsigned, 2> generators{3, 2};  // octal digits
    int doping_rate = 2;
    int iterations = 8;
    std::uint64_t interleaver_seed = 1;

    std::size_t coded_bits() const { return 2 * info_bits; }
};

struct DecodeResult {
    Bits info_hat;
    Llrs coded_llr;  // posterior LLRs of the transmitted (inner) code bits
};

/// Rate-1/2 SCCC: outer feed-forward code -> interleaver -> doped accumulator.
class SerialCodec {
public:
    explicit SerialCodec(const CodecConfig& cfg)
        : SerialCodec(cfg, Interleaver::random(cfg.coded_bits(), cfg.interleaver_seed)) {}

    SerialCodec(const CodecConfig& cfg, Interleaver interleaver)
        : cfg_(cfg),
          outer_(feedforward_code(cfg.generators)),
          inner_(doped_accumulator(cfg.doping_rate)),
          interleaver_(std::move(interleaver)) {
        require(cfg_.info_bits >= 1, "SerialCodec: need at least one info bit");
        require(cfg_.iterations >= 1, "SerialCodec: need at least one iteration");
        require(interleaver_.size() == cfg_.coded_bits(), "SerialCodec: interleaver length must equal coded length");
    }

    const CodecConfig& config() const { return cfg_; }
    const Trellis& outer() const { return outer_; }
    const Trellis& inner() const { return inner_; }
    const Interleaver& interleaver() const { return interleaver_; }
    std::size_t info_bits() const { return cfg_.info_bits; }
    std::size_t coded_bits() const { return cfg_.coded_bits(); }

    Bits encode(std::span<const std::uint8_t> info) const {
        require(info.size() == cfg_.info_bits, "sccc_encode: info length mismatch");
        const Bits outer_bits = outer_.encode(info);
        const Bits permuted = interleaver_.interleave<std::uint8_t>(outer_bits);
        return inner_.encode(permuted);
    }

    DecodeResult decode(std::span<const double> chan_llr) const {
        Llrs chan;
        Llrs inner_prior;
        DecodeResult r;
        r.info_hat = iterate(chan_llr, chan, inner_prior);
        r.coded_llr = bcjr_decode(chan, inner_prior, inner_).output_posterior;
        return r;
    }

    /// Information-bit decisions only; skips the final coded-bit pass.
    Bits decode_info(std::span<const double> chan_llr) const {
        Llrs chan;
        Llrs inner_prior;
        return iterate(chan_llr, chan, inner_prior);
    }

private:
    Bits iterate(std::span<const double> chan_llr, Llrs& chan, Llrs& inner_prior) const {
        require(chan_llr.size() == cfg_.coded_bits(), "sccc_decode: channel LLR length mismatch");
        chan.assign(chan_llr.begin(), chan_llr.end());
        for (auto& v : chan) v = clamp_llr(v);
        inner_prior.assign(cfg_.coded_bits(), 0.0);
        SisoResult outer_res;
        for (int it = 0; it < cfg_.iterations; ++it) {
            const SisoResult inner_res = bcjr_decode(chan, inner_prior, inner_);
            const Llrs outer_obs = interleaver_.deinterleave<double>(inner_res.input_extrinsic);
            outer_res = bcjr_decode(outer_obs, {}, outer_);
            inner_prior = interleaver_.interleave<double>(outer_res.output_extrinsic);
        }
        return hard_decisions(outer_res.input_posterior);
    }

    CodecConfig cfg_;
    Trellis outer_;
    Trellis inner_;
    Interleaver interleaver_;
};

inline Bits sccc_encode(std::span<const std::uint8_t> info, const SerialCodec& codec) { return codec.encode(info); }
inline DecodeResult sccc_decode(std::span<const double> chan_llr, const SerialCodec& codec) {
    return codec.decode(chan_llr);
}

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
inline constexpr std::size_t kCrcBits = 16;

inline std::uint16_t crc16(std::span<const std::uint8_t> bits) {
    boost::crc_basic<16> crc(0x1021, 0xFFFF, 0, false, false);
    for (auto b : bits) crc.process_bit(b != 0);
    return static_cast<std::uint16_t>(crc.checksum());
}

/// Payload followed by its 16 CRC bits, MSB first.
inline Bits crc_attach(std::span<const std::uint8_t> payload) {
    Bits out(payload.begin(), payload.end());
    const std::uint16_t c = crc16(payload);
    for (int i = 15; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((c >> i) & 1U));
    return out;
}

inline bool crc_check(std::span<const std::uint8_t> frame) {
    if (frame.size() < kCrcBits) return false;
    const auto payload = frame.first(frame.size() - kCrcBits);
    const std::uint16_t c = crc16(payload);
    for (std::size_t i = 0; i < kCrcBits; ++i) {
        if (frame[payload.size() + i] != ((c >> (15 - i)) & 1U)) return false;
    }
    return true;
}

}  // namespace sfdr
