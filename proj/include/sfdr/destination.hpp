#pragma once

// Joint MAP detection of the superimposed source and relay symbols at the
// destination, with the relay's discard (zero-power) hypothesis, followed by
// LLR combining and decoding across adjacent slots.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sfdr/fec.hpp"
#include "sfdr/modem.hpp"
#include "sfdr/signalcore.hpp"

namespace sfdr {

/// Noise-normalized real-valued channel matrices for one slot.
struct DestinationChannel {
    RealMatrix2 source = RealMatrix2::zero();
    RealMatrix2 relay = RealMatrix2::zero();
};

/// Scales by 1/sqrt(sigma0_sq), so exp(-||y - Hs xs - Hr xr||^2) is the exact likelihood.
inline DestinationChannel normalized_channel(Complex h_sd, Complex h_rd, double p_s, double p_r, double sigma0_sq) {
    require(sigma0_sq > 0.0, "normalized_channel: sigma0_sq must be positive");
    require(p_s >= 0.0 && p_r >= 0.0, "normalized_channel: powers must be non-negative");
    const double k = 1.0 / std::sqrt(sigma0_sq);
    return {complex_to_real_matrix(h_sd, k * std::sqrt(p_s)), complex_to_real_matrix(h_rd, k * std::sqrt(p_r))};
}

inline RealPair normalized_observation(Complex y, double sigma0_sq) {
    require(sigma0_sq > 0.0, "normalized_observation: sigma0_sq must be positive");
    const RealPair p = complex_to_real_pair(y);
    const double k = 1.0 / std::sqrt(sigma0_sq);
    return {p[0] * k, p[1] * k};
}

/// Relay label used for the discard hypothesis.
inline constexpr int kDiscarded = -1;

struct Hypothesis {
    unsigned source_label = 0;
    int relay_label = kDiscarded;
};

/// Q * (Q + 1) hypotheses with the discard option, Q * Q without.
inline std::vector<Hypothesis> hypothesis_set(const Constellation& spec, bool include_discard) {
    std::vector<Hypothesis> out;
    const auto q = static_cast<unsigned>(spec.order());
    for (unsigned s = 0; s < q; ++s) {
        for (unsigned r = 0; r < q; ++r) out.push_back({s, static_cast<int>(r)});
        if (include_discard) out.push_back({s, kDiscarded});
    }
    return out;
}

namespace detail {

/// Log-likelihood table metric[s][r], r = Q meaning discarded.
class JointMetric {
public:
    JointMetric(const RealPair& y, const DestinationChannel& ch, const Constellation& spec)
        : q_(static_cast<std::size_t>(spec.order())), metric_(q_ * (q_ + 1)) {
        std::vector<RealPair> a(q_);
        std::vector<RealPair> b(q_ + 1, RealPair{0.0, 0.0});
        for (std::size_t s = 0; s < q_; ++s) a[s] = ch.source * complex_to_real_pair(spec.point(static_cast<unsigned>(s)));
        for (std::size_t r = 0; r < q_; ++r) b[r] = ch.relay * complex_to_real_pair(spec.point(static_cast<unsigned>(r)));
        for (std::size_t s = 0; s < q_; ++s)
            for (std::size_t r = 0; r <= q_; ++r) metric_[s * (q_ + 1) + r] = -squared_norm(y - a[s] - b[r]);
    }

    double operator()(std::size_t s, std::size_t r) const { return metric_[s * (q_ + 1) + r]; }
    std::size_t order() const { return q_; }

private:
    std::size_t q_;
    std::vector<double> metric_;
};

}  // namespace detail

/// Normalized posteriors over hypothesis_set(spec, include_discard), equal priors.
inline std::vector<double> hypothesis_posteriors(const RealPair& y, const DestinationChannel& ch,
                                                 const Constellation& spec, bool include_discard = true) {
    const detail::JointMetric metric(y, ch, spec);
    const auto hyps = hypothesis_set(spec, include_discard);
    std::vector<double> logp(hyps.size());
    const std::size_t q = metric.order();
    for (std::size_t k = 0; k < hyps.size(); ++k) {
        const std::size_t r = hyps[k].relay_label == kDiscarded ? q : static_cast<std::size_t>(hyps[k].relay_label);
        logp[k] = metric(hyps[k].source_label, r);
    }
    const double peak = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double& v : logp) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : logp) v /= total;
    return logp;
}

/// Source-bit LLRs, marginalizing over every relay hypothesis including discard.
inline void llr_source_bits(const RealPair& y, const DestinationChannel& ch, const Constellation& spec,
                            std::span<double> out) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const detail::JointMetric metric(y, ch, spec);
    const std::size_t q = metric.order();
    const int z = spec.bits_per_symbol();
    std::array<double, 8> num{};
    std::array<double, 8> den{};
    num.fill(kNegInf);
    den.fill(kNegInf);
    for (std::size_t s = 0; s < q; ++s) {
        double acc = kNegInf;
        for (std::size_t r = 0; r <= q; ++r) acc = log_sum_exp(acc, metric(s, r));
        for (int i = 0; i < z; ++i) {
            auto& dst = spec.bit(static_cast<unsigned>(s), i) == 0 ? num[static_cast<std::size_t>(i)]
                                                                   : den[static_cast<std::size_t>(i)];
            dst = log_sum_exp(dst, acc);
        }
    }
    for (int i = 0; i < z; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = clamp_llr(num[k] - den[k]);
    }
}

/// Relay-bit LLRs. Returns true (and writes all-zero LLRs) when the discard
/// hypothesis is strictly more probable than every per-bit relay event.
inline bool llr_relay_bits(const RealPair& y, const DestinationChannel& ch, const Constellation& spec,
                           std::span<double> out) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const detail::JointMetric metric(y, ch, spec);
    const std::size_t q = metric.order();
    const int z = spec.bits_per_symbol();
    std::array<double, 8> num{};
    std::array<double, 8> den{};
    num.fill(kNegInf);
    den.fill(kNegInf);
    double discard = kNegInf;
    for (std::size_t r = 0; r <= q; ++r) {
        double acc = kNegInf;
        for (std::size_t s = 0; s < q; ++s) acc = log_sum_exp(acc, metric(s, r));
        if (r == q) {
            discard = acc;
            continue;
        }
        for (int i = 0; i < z; ++i) {
            auto& dst = spec.bit(static_cast<unsigned>(r), i) == 0 ? num[static_cast<std::size_t>(i)]
                                                                   : den[static_cast<std::size_t>(i)];
            dst = log_sum_exp(dst, acc);
        }
    }
    double best = kNegInf;
    for (int i = 0; i < z; ++i) best = std::max({best, num[static_cast<std::size_t>(i)], den[static_cast<std::size_t>(i)]});
    const bool discarded = best < discard;
    for (int i = 0; i < z; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = discarded ? 0.0 : clamp_llr(num[k] - den[k]);
    }
    return discarded;
}

enum class SlotKind { first, middle, last };

/// Per-slot detector output. `source` holds LLRs of x_S(l), `relay` those of x_R(l-1).
struct SlotLlrs {
    std::optional<Llrs> source;
    std::optional<Llrs> relay;
    std::size_t discarded_symbols = 0;
};

struct DestinationContext {
    Constellation constellation = Constellation::qpsk();
    double p_s = 1.0;
    double p_r = 1.0;
    double sigma0_sq = 1.0;
};

/// Detect one received slot. Slot 1 carries only the source, slot L+1 only the relay.
inline SlotLlrs detect_slot(std::span<const Complex> y, Complex h_sd, Complex h_rd, SlotKind kind,
                            const DestinationContext& ctx) {
    const auto z = static_cast<std::size_t>(ctx.constellation.bits_per_symbol());
    SlotLlrs out;
    if (kind == SlotKind::first) {
        Llrs llr(y.size() * z);
        for (std::size_t m = 0; m < y.size(); ++m)
            soft_demodulate(y[m], h_sd, std::sqrt(ctx.p_s), ctx.sigma0_sq, ctx.constellation,
                            std::span<double>(llr).subspan(m * z, z));
        out.source = std::move(llr);
        return out;
    }
    const DestinationChannel ch = normalized_channel(kind == SlotKind::last ? Complex{} : h_sd, h_rd,
                                                     kind == SlotKind::last ? 0.0 : ctx.p_s, ctx.p_r, ctx.sigma0_sq);
    Llrs relay(y.size() * z);
    std::optional<Llrs> source;
    if (kind == SlotKind::middle) source.emplace(y.size() * z);
    for (std::size_t m = 0; m < y.size(); ++m) {
        const RealPair obs = normalized_observation(y[m], ctx.sigma0_sq);
        if (llr_relay_bits(obs, ch, ctx.constellation, std::span<double>(relay).subspan(m * z, z)))
            ++out.discarded_symbols;
        if (source) llr_source_bits(obs, ch, ctx.constellation, std::span<double>(*source).subspan(m * z, z));
    }
    out.relay = std::move(relay);
    out.source = std::move(source);
    return out;
}

/// Element-wise sum of direct and relayed LLRs, clamped.
inline Llrs combine_llrs(std::span<const double> direct, std::span<const double> relayed) {
    require(direct.size() == relayed.size(), "combine_llrs: length mismatch");
    Llrs out(direct.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = clamp_llr(direct[k] + relayed[k]);
    return out;
}

struct CombinedDecode {
    std::vector<Bits> info_hat;  ///< one entry per frame
    std::vector<Llrs> combined;
};

/// Decode frame l from the source LLRs of slot l plus the relayed LLRs of slot l+1.
/// `slots` must hold L+1 entries in transmission order.
inline CombinedDecode combine_and_decode(std::span<const SlotLlrs> slots, const SerialCodec& codec) {
    require(slots.size() >= 2, "combine_and_decode: need at least two slots");
    CombinedDecode out;
    const std::size_t frames = slots.size() - 1;
    for (std::size_t l = 0; l < frames; ++l) {
        require(slots[l].source.has_value(), "combine_and_decode: missing source LLRs for a frame");
        require(slots[l + 1].relay.has_value(), "combine_and_decode: missing relayed LLRs for a frame");
        Llrs llr = combine_llrs(*slots[l].source, *slots[l + 1].relay);
        out.info_hat.push_back(codec.decode_info(llr));
        out.combined.push_back(std::move(llr));
    }
    return out;
}

}  // namespace sfdr
