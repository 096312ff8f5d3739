#pragma once

// Block-fading channel model for the source/relay/destination triangle.

#include <cmath>
#include <optional>
#include <vector>

#include "sfdr/signalcore.hpp"

namespace sfdr {

enum class Link { SR, SD, RD };

struct LinkGeometry {
    double d_sd = 1.0;
    double d_sr = 0.5;
    double d_rd = 0.5;
    double path_loss_exponent = 2.0;

    /// Relay on the straight line between source and destination.
    static LinkGeometry collinear(double d_sd, double d_sr, double exponent = 2.0) {
        return {d_sd, d_sr, d_sd - d_sr, exponent};
    }

    /// Table presets: L1 puts the relay at 0.4 d, L2 at 0.8 d.
    static LinkGeometry preset_l1(double d = 1.0, double exponent = 2.0) { return collinear(d, 0.4 * d, exponent); }
    static LinkGeometry preset_l2(double d = 1.0, double exponent = 2.0) { return collinear(d, 0.8 * d, exponent); }

    double distance(Link link) const {
        switch (link) {
            case Link::SR: return d_sr;
            case Link::SD: return d_sd;
            case Link::RD: return d_rd;
        }
        return d_sd;
    }

    bool is_collinear(double tol = 1e-12) const { return std::abs(d_sr + d_rd - d_sd) <= tol * d_sd; }

    void validate() const {
        require(d_sd > 0.0 && d_sr > 0.0 && d_rd > 0.0, "LinkGeometry: distances must be positive");
        require(std::isfinite(path_loss_exponent) && path_loss_exponent >= 0.0,
                "LinkGeometry: path-loss exponent must be finite and non-negative");
    }
};

struct PowerAllocation {
    double p_s = 1.0;
    double p_r = 1.0;
    std::optional<double> p_tot;

    void validate() const {
        require(p_s >= 0.0 && p_r >= 0.0, "PowerAllocation: powers must be non-negative");
        if (p_tot) require(p_s + p_r <= *p_tot * (1.0 + 1e-12), "PowerAllocation: P_S + P_R exceeds P_tot");
    }
};

struct NoiseModel {
    double sigma0_sq = 1.0;    ///< AWGN power per complex sample
    double sigma_rr_sq = 0.0;  ///< residual self-interference channel variance

    void validate() const {
        require(sigma0_sq > 0.0, "NoiseModel: sigma0_sq must be positive");
        require(sigma_rr_sq >= 0.0, "NoiseModel: sigma_rr_sq must be non-negative");
    }
};

/// Per-slot gains; index 0 is slot 1, so a realization for L frames holds L+1 entries.
struct ChannelRealization {
    std::vector<Complex> h_sr;
    std::vector<Complex> h_sd;
    std::vector<Complex> h_rd;
    std::vector<Complex> h_rr;

    std::size_t slots() const { return h_sd.size(); }
};

/// Mean channel power d^{-v} of a link.
inline double link_variance(const LinkGeometry& geom, Link link) {
    const double d = geom.distance(link);
    require(d > 0.0, "link_variance: zero distance gives a singular path loss");
    return std::pow(d, -geom.path_loss_exponent);
}

/// Link SNR offset relative to the S-D link, in dB.
inline double snr_offset_db(const LinkGeometry& geom, Link link) {
    return linear_to_db(link_variance(geom, link) / link_variance(geom, Link::SD));
}

/// Independent Rayleigh gains per slot and link. h_RR is redrawn every slot.
inline ChannelRealization draw_channel(const LinkGeometry& geom, const NoiseModel& noise, int slots,
                                       RandomStream& rng) {
    require(slots >= 1, "draw_channel: need at least one slot");
    geom.validate();
    noise.validate();
    const double v_sr = link_variance(geom, Link::SR);
    const double v_sd = link_variance(geom, Link::SD);
    const double v_rd = link_variance(geom, Link::RD);

    ChannelRealization ch;
    const auto n = static_cast<std::size_t>(slots);
    ch.h_sr.reserve(n);
    ch.h_sd.reserve(n);
    ch.h_rd.reserve(n);
    ch.h_rr.reserve(n);
    for (std::size_t l = 0; l < n; ++l) {
        ch.h_sr.push_back(rng.complex_gaussian(v_sr));
        ch.h_sd.push_back(rng.complex_gaussian(v_sd));
        ch.h_rd.push_back(rng.complex_gaussian(v_rd));
        ch.h_rr.push_back(noise.sigma_rr_sq > 0.0 ? rng.complex_gaussian(noise.sigma_rr_sq) : Complex{});
    }
    return ch;
}

/// Interference-plus-noise variance per complex sample at the relay receiver.
inline double effective_noise_variance(const NoiseModel& noise, double p_r, bool si_active, double sigma_x_sq) {
    require(p_r >= 0.0 && sigma_x_sq >= 0.0, "effective_noise_variance: inputs must be non-negative");
    return si_active ? p_r * sigma_x_sq * noise.sigma_rr_sq + noise.sigma0_sq : noise.sigma0_sq;
}

}  // namespace sfdr
