#pragma once

// Full-duplex relay pipeline for one slot: soft demodulation under residual
// self-interference, SCCC decoding, re-encoding, linear MMSE detection, square
// deviation and per-symbol forwarding decision.

#include <cmath>
#include <span>
#include <vector>

#include "sfdr/channel.hpp"
#include "sfdr/fec.hpp"
#include "sfdr/modem.hpp"
#include "sfdr/protocol.hpp"
#include "sfdr/signalcore.hpp"

namespace sfdr {

/// selected[m] is true when symbol m is forwarded.
using SelectionMask = std::vector<bool>;

/// Linear MMSE detector for the real-valued S-R observation.
///
/// W = (sx/2) H^T [ (sx/2) H H^T + (P_R sx s_RR / 2) I + (s0/2) I ]^{-1} with H the
/// real-valued form of sqrt(P_S) h_SR. Pass p_r = 0 when no self-interference is present.
inline RealMatrix2 mmse_matrix(Complex h_sr, double p_s, double p_r, double sigma_rr_sq, double sigma0_sq,
                               double sigma_x_sq) {
    require(sigma0_sq > 0.0, "mmse_matrix: sigma0_sq must be positive");
    require(p_s >= 0.0 && p_r >= 0.0 && sigma_rr_sq >= 0.0 && sigma_x_sq >= 0.0,
            "mmse_matrix: parameters must be non-negative");
    const RealMatrix2 h = complex_to_real_matrix(h_sr, std::sqrt(p_s));
    const RealMatrix2 ht = h.transpose();
    const double half_sx = sigma_x_sq / 2.0;
    const double diag = p_r * sigma_x_sq * sigma_rr_sq / 2.0 + sigma0_sq / 2.0;
    const RealMatrix2 cov = half_sx * (h * ht) + RealMatrix2::scaled_identity(diag);
    return half_sx * (ht * cov.inverse());
}

/// ||W y - x_hat||^2
inline double square_deviation(const RealMatrix2& w, const RealPair& y, const RealPair& x_hat) {
    return squared_norm(w * y - x_hat);
}

/// Forward iff the deviation does not exceed the threshold (boundary inclusive).
inline bool select_symbol(double delta, double epsilon) { return delta <= epsilon; }

struct RelaySlotState {
    std::vector<Complex> previous_frame;  ///< x_R(l-1); all zero before the first forwarded frame
    SelectionMask previous_mask;

    /// State before slot 1: the relay has not transmitted anything yet.
    static RelaySlotState silent(std::size_t symbols) {
        return {std::vector<Complex>(symbols, Complex{}), SelectionMask(symbols, false)};
    }
};

struct RelayContext {
    const SerialCodec* codec = nullptr;  ///< null selects uncoded symbol-by-symbol detection
    Constellation constellation = Constellation::qpsk();
    double p_s = 1.0;
    double p_r = 1.0;
    NoiseModel noise{};
    double epsilon = 0.5;
    double sigma_x_sq = 1.0;
};

struct RelaySlotOutput {
    std::vector<Complex> next_frame;     ///< x_R(l), transmitted in slot l+1
    SelectionMask mask;
    Bits info_hat;                       ///< decoded information bits (empty when uncoded)
    std::vector<Complex> reconstructed;  ///< x_hat before selection
    std::vector<double> deviation;       ///< Delta_m (empty for frame-level protocols)
};

/// Soft demodulation of a relay frame; symbol m sees self-interference iff si_mask[m].
inline Llrs relay_demodulate(std::span<const Complex> y, Complex h_sr, const SelectionMask& si_mask,
                             const RelayContext& ctx) {
    const auto z = static_cast<std::size_t>(ctx.constellation.bits_per_symbol());
    require(si_mask.size() == y.size(), "relay_demodulate: mask length mismatch");
    Llrs llr(y.size() * z);
    const double var_on = effective_noise_variance(ctx.noise, ctx.p_r, true, ctx.sigma_x_sq);
    const double var_off = effective_noise_variance(ctx.noise, ctx.p_r, false, ctx.sigma_x_sq);
    const double gain = std::sqrt(ctx.p_s);
    for (std::size_t m = 0; m < y.size(); ++m) {
        soft_demodulate(y[m], h_sr, gain, si_mask[m] ? var_on : var_off, ctx.constellation,
                        std::span<double>(llr).subspan(m * z, z));
    }
    return llr;
}

/// Steps after reconstruction: MMSE detection, square deviation, selection and the
/// zero-power discard of unselected symbols.
inline RelaySlotOutput select_frame(std::span<const Complex> y, Complex h_sr, std::span<const Complex> x_hat,
                                    const SelectionMask& si_mask, const RelayContext& ctx) {
    require(x_hat.size() == y.size() && si_mask.size() == y.size(), "select_frame: frame length mismatch");
    require(ctx.epsilon >= 0.0, "select_frame: epsilon must be non-negative");
    const RealMatrix2 w_on = mmse_matrix(h_sr, ctx.p_s, ctx.p_r, ctx.noise.sigma_rr_sq, ctx.noise.sigma0_sq,
                                         ctx.sigma_x_sq);
    const RealMatrix2 w_off = mmse_matrix(h_sr, ctx.p_s, 0.0, ctx.noise.sigma_rr_sq, ctx.noise.sigma0_sq,
                                          ctx.sigma_x_sq);
    RelaySlotOutput out;
    out.reconstructed.assign(x_hat.begin(), x_hat.end());
    out.next_frame.resize(y.size());
    out.mask.resize(y.size());
    out.deviation.resize(y.size());
    for (std::size_t m = 0; m < y.size(); ++m) {
        const RealMatrix2& w = si_mask[m] ? w_on : w_off;
        const double delta = square_deviation(w, complex_to_real_pair(y[m]), complex_to_real_pair(x_hat[m]));
        const bool keep = select_symbol(delta, ctx.epsilon);
        out.deviation[m] = delta;
        out.mask[m] = keep;
        out.next_frame[m] = keep ? x_hat[m] : Complex{};
    }
    return out;
}

/// One slot of the symbol-level selective relay.
inline RelaySlotOutput relay_slot(std::span<const Complex> y, Complex h_sr, const RelaySlotState& state,
                                  const RelayContext& ctx) {
    require(state.previous_mask.size() == y.size(), "relay_slot: state length mismatch");
    std::vector<Complex> x_hat;
    Bits info_hat;
    if (ctx.codec != nullptr) {
        const Llrs llr = relay_demodulate(y, h_sr, state.previous_mask, ctx);
        require(llr.size() == ctx.codec->coded_bits(), "relay_slot: frame length does not match the codec");
        info_hat = ctx.codec->decode_info(llr);
        x_hat = modulate(ctx.codec->encode(info_hat), ctx.constellation);
    } else {
        x_hat.resize(y.size());
        const Complex g = std::sqrt(ctx.p_s) * h_sr;
        for (std::size_t m = 0; m < y.size(); ++m) {
            x_hat[m] = std::abs(g) > 0.0 ? ctx.constellation.point(ctx.constellation.nearest(y[m] / g))
                                         : ctx.constellation.point(0);
        }
    }
    RelaySlotOutput out = select_frame(y, h_sr, x_hat, state.previous_mask, ctx);
    out.info_hat = std::move(info_hat);
    return out;
}

/// Side information the frame-level baselines need.
struct BaselineSideInfo {
    double gamma_t = 3.0;                     ///< SINR threshold (linear) for threshold_sdf
    Complex h_rr{};                           ///< instantaneous residual SI gain (threshold_sdf)
    std::span<const Complex> source_frame{};  ///< true x_S(l) (perfect_relay)
    std::span<const std::uint8_t> source_info{};
};

/// One relay slot under any forwarding protocol. Frame-level protocols forward all
/// symbols or none; the proposed protocol defers to relay_slot.
inline RelaySlotOutput relay_slot(Protocol protocol, std::span<const Complex> y, Complex h_sr,
                                  const RelaySlotState& state, const RelayContext& ctx,
                                  const BaselineSideInfo& side = {}) {
    if (protocol == Protocol::proposed) return relay_slot(y, h_sr, state, ctx);

    RelaySlotOutput out;
    bool forward = false;
    if (protocol == Protocol::perfect_relay) {
        require(side.source_frame.size() == y.size(), "relay_slot: perfect relay needs the source frame");
        out.reconstructed.assign(side.source_frame.begin(), side.source_frame.end());
        out.info_hat.assign(side.source_info.begin(), side.source_info.end());
        forward = true;
    } else {
        require(ctx.codec != nullptr, "relay_slot: frame-level protocols need a codec");
        const Llrs llr = relay_demodulate(y, h_sr, state.previous_mask, ctx);
        out.info_hat = ctx.codec->decode_info(llr);
        out.reconstructed = modulate(ctx.codec->encode(out.info_hat), ctx.constellation);
        if (protocol == Protocol::crc_sdf) {
            forward = crc_check(out.info_hat);
        } else {
            std::size_t active = 0;
            for (bool b : state.previous_mask) active += b ? 1U : 0U;
            const double active_fraction =
                state.previous_mask.empty() ? 0.0 : static_cast<double>(active) / static_cast<double>(y.size());
            const double sinr = ctx.p_s * std::norm(h_sr) /
                                (ctx.p_r * std::norm(side.h_rr) * ctx.sigma_x_sq * active_fraction + ctx.noise.sigma0_sq);
            forward = sinr >= side.gamma_t;
        }
    }
    out.mask.assign(y.size(), forward);
    out.next_frame = forward ? out.reconstructed : std::vector<Complex>(y.size(), Complex{});
    return out;
}

}  // namespace sfdr
