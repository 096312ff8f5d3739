#pragma once

// Closed-form selection probabilities, the forwarding Markov chain, and the
// outage probability of full-duplex and half-duplex selective relaying.

#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "sfdr/channel.hpp"
#include "sfdr/protocol.hpp"
#include "sfdr/signalcore.hpp"

namespace sfdr {

/// Per-dimension MMSE error variance of the relay's estimate of x_S.
///
/// sx/2 - P_S sx^2 g / (2 P_S sx g + 2 N) with N = P_R sx s_RR [si] + s0, written as
/// (sx/2) N / (P_S sx g + N) so it stays non-negative.
inline double sigma_ce_sq(double p_s, double gain_sr_sq, double p_r, double sigma_rr_sq, double sigma0_sq,
                          double sigma_x_sq, bool si_active) {
    require(p_s >= 0.0 && gain_sr_sq >= 0.0 && p_r >= 0.0 && sigma_rr_sq >= 0.0 && sigma_x_sq >= 0.0,
            "sigma_ce_sq: parameters must be non-negative");
    require(sigma0_sq > 0.0, "sigma_ce_sq: sigma0_sq must be positive");
    const double n = (si_active ? p_r * sigma_x_sq * sigma_rr_sq : 0.0) + sigma0_sq;
    const double signal = p_s * sigma_x_sq * gain_sr_sq;
    if (std::isinf(signal)) return 0.0;
    return sigma_x_sq / 2.0 * n / (signal + n);
}

/// Pr[Delta <= epsilon] for Delta / sigma_ce_sq chi-square with two degrees of freedom.
inline double p_select(double epsilon, double sigma_ce) {
    require(epsilon >= 0.0 && sigma_ce >= 0.0, "p_select: arguments must be non-negative");
    if (epsilon == 0.0) return 0.0;
    if (sigma_ce == 0.0) return 1.0;
    return -std::expm1(-epsilon / (2.0 * sigma_ce));
}

using Matrix4 = std::array<std::array<double, 4>, 4>;
using Vector4 = std::array<double, 4>;

/// Forwarding-state chain. p1 is the selection probability with self-interference
/// present (previous symbol forwarded), p0 without.
struct SelectionChain {
    double p1 = 0.0;
    double p0 = 0.0;
};

/// States (1,1), (0,1), (1,0), (0,0) as (current, previous) forwarding indicators.
inline Matrix4 transition_matrix(const SelectionChain& c) {
    require(c.p1 >= 0.0 && c.p1 <= 1.0 && c.p0 >= 0.0 && c.p0 <= 1.0, "transition_matrix: probabilities out of range");
    return Matrix4{{{c.p1, 0.0, 1.0 - c.p1, 0.0},
                    {c.p1, 0.0, 1.0 - c.p1, 0.0},
                    {0.0, c.p0, 0.0, 1.0 - c.p0},
                    {0.0, c.p0, 0.0, 1.0 - c.p0}}};
}

inline Vector4 initial_distribution(double p0) { return {0.0, p0, 0.0, 1.0 - p0}; }

inline Vector4 step(const Vector4& u, const Matrix4& t) {
    Vector4 out{};
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 4; ++i) out[j] += u[i] * t[i][j];
    return out;
}

inline double forwarded_mass(const Vector4& u) { return u[0] + u[1]; }

/// Average forwarding probability over frames 1..L.
inline double p_forward_avg(const SelectionChain& c, int frames) {
    require(frames >= 1, "p_forward_avg: need at least one frame");
    const Matrix4 t = transition_matrix(c);
    Vector4 u = initial_distribution(c.p0);
    double sum = 0.0;
    for (int l = 1; l <= frames; ++l) {
        sum += forwarded_mass(u);
        if (l < frames) u = step(u, t);
    }
    return sum / frames;
}

/// Time-varying chain: per_slot[l] holds the (p1, p0) pair in force during frame l+1.
inline double p_forward_avg(std::span<const SelectionChain> per_slot) {
    require(!per_slot.empty(), "p_forward_avg: need at least one frame");
    Vector4 u = initial_distribution(per_slot[0].p0);
    double sum = forwarded_mass(u);
    for (std::size_t l = 1; l < per_slot.size(); ++l) {
        u = step(u, transition_matrix(per_slot[l]));
        sum += forwarded_mass(u);
    }
    return sum / static_cast<double>(per_slot.size());
}

/// Density of a + b for independent exponentials with means x and y.
inline double sum_exp_pdf(double z, double x, double y) {
    require(x > 0.0 && y > 0.0, "sum_exp_pdf: means must be positive");
    if (z < 0.0) return 0.0;
    if (std::abs(x - y) < 1e-9 * std::max(x, y)) return z / (x * x) * std::exp(-z / x);
    return (std::exp(-z / y) - std::exp(-z / x)) / (y - x);
}

/// Pr[a + b < t] for independent exponentials with means x and y (either may be 0).
inline double forwarding_outage(double x, double y, double t) {
    require(x >= 0.0 && y >= 0.0 && t >= 0.0, "forwarding_outage: arguments must be non-negative");
    if (t == 0.0) return 0.0;
    if (x == 0.0 && y == 0.0) return 1.0;
    if (x == 0.0) return -std::expm1(-t / y);
    if (y == 0.0) return -std::expm1(-t / x);
    if (std::abs(x - y) < 1e-9 * std::max(x, y)) return 1.0 - (t + x) / x * std::exp(-t / x);
    return 1.0 - (y * std::exp(-t / y) - x * std::exp(-t / x)) / (y - x);
}

/// Pr[a < t] for an exponential with mean x.
inline double direct_outage(double x, double t) {
    require(x >= 0.0 && t >= 0.0, "direct_outage: arguments must be non-negative");
    if (t == 0.0) return 0.0;
    if (x == 0.0) return 1.0;
    return -std::expm1(-t / x);
}

/// Average SNRs of the direct and relay links at the destination plus the target rate.
struct OutageParams {
    double x = 1.0;     ///< P_S s_SD / s0
    double y = 1.0;     ///< P_R s_RD / s0
    double rate = 1.0;  ///< nats per channel use
};

/// Full-duplex outage with forwarding probability p_c.
inline double outage_fd(const OutageParams& p, double p_c) {
    require(p_c >= 0.0 && p_c <= 1.0, "outage_fd: p_c out of range");
    require(p.rate >= 0.0, "outage_fd: rate must be non-negative");
    const double t = std::expm1(p.rate);
    return p_c * forwarding_outage(p.x, p.y, t) + (1.0 - p_c) * direct_outage(p.x, t);
}

/// Half-duplex outage: two slots per frame and no self-interference, so p_forward = p0.
inline double outage_hd(const OutageParams& p, double p0) {
    require(p0 >= 0.0 && p0 <= 1.0, "outage_hd: p0 out of range");
    require(p.rate >= 0.0, "outage_hd: rate must be non-negative");
    const double t = std::expm1(2.0 * p.rate);
    return p0 * forwarding_outage(p.x, p.y, t) + (1.0 - p0) * direct_outage(p.x, t);
}

/// Pr[P_S |h_SR|^2 / (P_R |h_RR|^2 + s0) >= threshold] under Rayleigh fading.
inline double p_sinr_above(double threshold, double p_s, double sigma_sr_sq, double p_r, double sigma_rr_sq,
                           double sigma0_sq = 1.0) {
    require(threshold >= 0.0 && p_s >= 0.0 && sigma_sr_sq >= 0.0 && p_r >= 0.0 && sigma_rr_sq >= 0.0,
            "p_sinr_above: arguments must be non-negative");
    require(sigma0_sq > 0.0, "p_sinr_above: sigma0_sq must be positive");
    if (threshold == 0.0) return 1.0;
    const double a = p_s * sigma_sr_sq;
    if (a == 0.0) return 0.0;
    if (std::isinf(a)) return 1.0;
    return std::exp(-threshold * sigma0_sq / a) / (1.0 + p_r * sigma_rr_sq * threshold / a);
}

/// Frame-level selection probability of a baseline protocol. Pass sigma_rr_sq = 0
/// for the probability without self-interference.
inline double p_select_baseline(Protocol protocol, double rate, double gamma_t, double p_s, double sigma_sr_sq,
                                double p_r, double sigma_rr_sq, double sigma0_sq = 1.0) {
    switch (protocol) {
        case Protocol::crc_sdf: return p_sinr_above(std::expm1(rate), p_s, sigma_sr_sq, p_r, sigma_rr_sq, sigma0_sq);
        case Protocol::threshold_sdf: return p_sinr_above(gamma_t, p_s, sigma_sr_sq, p_r, sigma_rr_sq, sigma0_sq);
        case Protocol::perfect_relay: return 1.0;
        case Protocol::proposed: break;
    }
    throw Error("p_select_baseline: the proposed protocol uses p_select");
}

/// How the S-R gain enters the selection probability.
enum class GainMode {
    expected,         ///< g = E|h_SR|^2
    per_realization,  ///< g drawn per slot, chain made time-varying, averaged over draws
};

/// Everything the closed-form analysis needs for one operating point.
struct Scenario {
    LinkGeometry geometry{};
    double p_s = 1.0;
    double p_r = 1.0;
    double sigma_rr_sq = 0.0;
    double sigma0_sq = 1.0;
    double sigma_x_sq = 1.0;
    double epsilon = 0.5;
    double rate = 1.0;
    int frames = 20;
    Protocol protocol = Protocol::proposed;
    double gamma_t = 3.0;
};

/// Smallest distance used when a node sits on top of another.
inline constexpr double kMinDistanceFraction = 1e-9;

/// Link variance with the distance clipped away from zero.
inline double clipped_link_variance(const LinkGeometry& g, Link link) {
    const double d = std::max(g.distance(link), kMinDistanceFraction * g.d_sd);
    return std::pow(d, -g.path_loss_exponent);
}

inline SelectionChain selection_chain(const Scenario& s, double gain_sr_sq) {
    if (s.protocol == Protocol::proposed) {
        return {p_select(s.epsilon, sigma_ce_sq(s.p_s, gain_sr_sq, s.p_r, s.sigma_rr_sq, s.sigma0_sq, s.sigma_x_sq, true)),
                p_select(s.epsilon, sigma_ce_sq(s.p_s, gain_sr_sq, s.p_r, s.sigma_rr_sq, s.sigma0_sq, s.sigma_x_sq, false))};
    }
    return {p_select_baseline(s.protocol, s.rate, s.gamma_t, s.p_s, gain_sr_sq, s.p_r, s.sigma_rr_sq, s.sigma0_sq),
            p_select_baseline(s.protocol, s.rate, s.gamma_t, s.p_s, gain_sr_sq, s.p_r, 0.0, s.sigma0_sq)};
}

/// Average forwarding probability with g = E|h_SR|^2.
inline double forwarding_probability(const Scenario& s) {
    return p_forward_avg(selection_chain(s, clipped_link_variance(s.geometry, Link::SR)), s.frames);
}

/// Average forwarding probability with an exponential g drawn for every slot.
/// Frame-level baselines already average over h_SR, so they match the expected-gain value.
inline double forwarding_probability(const Scenario& s, GainMode mode, int realizations, RandomStream& rng) {
    if (mode == GainMode::expected || s.protocol != Protocol::proposed) return forwarding_probability(s);
    require(realizations >= 1, "forwarding_probability: need at least one realization");
    const double mean_g = clipped_link_variance(s.geometry, Link::SR);
    std::vector<SelectionChain> chain(static_cast<std::size_t>(s.frames));
    double acc = 0.0;
    for (int k = 0; k < realizations; ++k) {
        for (auto& c : chain) c = selection_chain(s, std::norm(rng.complex_gaussian(mean_g)));
        acc += p_forward_avg(chain);
    }
    return acc / realizations;
}

inline OutageParams outage_params(const Scenario& s) {
    return {s.p_s * clipped_link_variance(s.geometry, Link::SD) / s.sigma0_sq,
            s.p_r * clipped_link_variance(s.geometry, Link::RD) / s.sigma0_sq, s.rate};
}

inline double scenario_outage_fd(const Scenario& s) { return outage_fd(outage_params(s), forwarding_probability(s)); }

/// Half-duplex counterpart: no self-interference, so every frame uses p0.
inline double scenario_outage_hd(const Scenario& s) {
    return outage_hd(outage_params(s), selection_chain(s, clipped_link_variance(s.geometry, Link::SR)).p0);
}

/// Source and relay powers for a total-average-links SNR (mean of the two link SNRs in dB)
/// and a source power fraction f in (0, 1).
inline std::pair<double, double> powers_for_snr(double snr_db, double sigma0_sq = 1.0, double fraction = 0.5) {
    require(fraction > 0.0 && fraction < 1.0, "powers_for_snr: fraction must lie in (0, 1)");
    const double base = db_to_linear(snr_db) * sigma0_sq;
    const double skew = std::sqrt(fraction / (1.0 - fraction));
    return {base * skew, base / skew};
}

}  // namespace sfdr
