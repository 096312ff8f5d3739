#pragma once

// Experiment drivers: outage versus SNR and versus self-interference, end-to-end
// BER per protocol, and the selection-accuracy measurement.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sfdr/analysis.hpp"
#include "sfdr/channel.hpp"
#include "sfdr/config.hpp"
#include "sfdr/destination.hpp"
#include "sfdr/fec.hpp"
#include "sfdr/modem.hpp"
#include "sfdr/relay.hpp"
#include "sfdr/results.hpp"

namespace sfdr {

/// Run fn(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Callers write into per-index slots, so the result does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    unsigned t = threads != 0 ? threads : std::max(1U, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Stream tags keep the experiments' random numbers apart for a shared seed.
namespace stream_tag {
inline constexpr std::uint64_t outage = 0x0a7a6e;
inline constexpr std::uint64_t forwarding = 0xf0a3d;
inline constexpr std::uint64_t ber = 0xbe5;
inline constexpr std::uint64_t accuracy = 0xacc;
}  // namespace stream_tag

// ---------------------------------------------------------------- outage

/// Outage events of one L-frame realization for a single symbol position.
struct OutageTrial {
    int fd_outages = 0;
    int hd_outages = 0;
};

/// Draw gains for L+1 slots and apply the outage event definitions frame by frame.
/// The proposed scheme's selection is a Bernoulli draw with the chain's probability;
/// the frame-level baselines test their instantaneous SINR directly.
inline OutageTrial mc_outage_trial(const Scenario& s, GainMode gain_mode, RandomStream& rng) {
    const NoiseModel noise{s.sigma0_sq, s.sigma_rr_sq};
    const ChannelRealization ch = draw_channel(s.geometry, noise, s.frames + 1, rng);
    const double mean_g = link_variance(s.geometry, Link::SR);
    const double t_fd = std::expm1(s.rate);
    const double threshold = s.protocol == Protocol::threshold_sdf ? s.gamma_t : t_fd;
    OutageTrial out;
    bool previous = false;
    for (std::size_t l = 0; l < static_cast<std::size_t>(s.frames); ++l) {
        bool sel = true;
        bool sel_hd = true;
        if (s.protocol == Protocol::proposed) {
            const double g = gain_mode == GainMode::expected ? mean_g : std::norm(ch.h_sr[l]);
            const SelectionChain c = selection_chain(s, g);
            sel = rng.bernoulli(previous ? c.p1 : c.p0);
            sel_hd = rng.bernoulli(c.p0);
        } else if (s.protocol != Protocol::perfect_relay) {
            const double signal = s.p_s * std::norm(ch.h_sr[l]);
            const double si = previous ? s.p_r * std::norm(ch.h_rr[l]) * s.sigma_x_sq : 0.0;
            sel = signal / (si + s.sigma0_sq) >= threshold;
            sel_hd = signal / s.sigma0_sq >= threshold;
        }
        const double a = s.p_s * std::norm(ch.h_sd[l]) / s.sigma0_sq;
        const double b = s.p_r * std::norm(ch.h_rd[l + 1]) / s.sigma0_sq;
        out.fd_outages += (sel ? std::log1p(a + b) : std::log1p(a)) < s.rate ? 1 : 0;
        out.hd_outages += (sel_hd ? std::log1p(a + b) : std::log1p(a)) < 2.0 * s.rate ? 1 : 0;
        previous = sel;
    }
    return out;
}

struct OutageEstimate {
    double fd = 0.0;
    double hd = 0.0;
    double fd_sigma = 0.0;  ///< standard error from the spread of per-trial outage fractions
    double hd_sigma = 0.0;
    double fd_ci = 0.0;     ///< 95% Wilson half-width over all frame events
    double hd_ci = 0.0;
    std::uint64_t events = 0;
    std::uint64_t trials = 0;
};

/// Monte Carlo outage over `trials` realizations, processed in fixed blocks so the
/// result is independent of the thread count.
inline OutageEstimate mc_outage(const Scenario& s, GainMode gain_mode, std::size_t trials, const RandomStream& stream,
                                unsigned threads = 0) {
    constexpr std::size_t kBlock = 512;
    const std::size_t blocks = (trials + kBlock - 1) / kBlock;
    struct Tally {
        double fd = 0, hd = 0, fd_sq = 0, hd_sq = 0;
    };
    std::vector<Tally> tallies(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        RandomStream rng = stream.derive(b);
        const std::size_t end = std::min(trials, (b + 1) * kBlock);
        Tally t;
        for (std::size_t k = b * kBlock; k < end; ++k) {
            const OutageTrial o = mc_outage_trial(s, gain_mode, rng);
            const double f = static_cast<double>(o.fd_outages) / s.frames;
            const double h = static_cast<double>(o.hd_outages) / s.frames;
            t.fd += f;
            t.hd += h;
            t.fd_sq += f * f;
            t.hd_sq += h * h;
        }
        tallies[b] = t;
    });
    Tally sum;
    for (const auto& t : tallies) {
        sum.fd += t.fd;
        sum.hd += t.hd;
        sum.fd_sq += t.fd_sq;
        sum.hd_sq += t.hd_sq;
    }
    const auto n = static_cast<double>(trials);
    OutageEstimate e;
    e.trials = trials;
    e.events = trials * static_cast<std::uint64_t>(s.frames);
    e.fd = sum.fd / n;
    e.hd = sum.hd / n;
    auto stderr_of = [n](double mean, double sq) {
        const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
        return std::sqrt(var / n);
    };
    e.fd_sigma = stderr_of(e.fd, sum.fd_sq);
    e.hd_sigma = stderr_of(e.hd, sum.hd_sq);
    const auto events = static_cast<double>(e.events);
    e.fd_ci = wilson_half_width(e.fd * events, events);
    e.hd_ci = wilson_half_width(e.hd * events, events);
    return e;
}

inline Scenario base_scenario(const SimConfig& cfg, double p_s, double p_r) {
    Scenario s;
    s.geometry = cfg.link_geometry();
    s.p_s = p_s;
    s.p_r = p_r;
    s.sigma_rr_sq = cfg.sigma_rr_sq;
    s.sigma0_sq = cfg.sigma0_sq;
    s.epsilon = cfg.selection_epsilon();
    s.rate = cfg.rate;
    s.frames = cfg.frames;
    s.gamma_t = cfg.gamma_t;
    return s;
}

namespace detail {

/// Rows for one sweep point of the outage experiments.
inline void outage_point_rows(const SimConfig& cfg, Scenario s, double sweep, std::uint64_t point,
                              std::vector<ResultRow>& rows) {
    const EvalMode mode = parse_eval_mode(cfg.mode);
    const GainMode gain_mode = parse_gain_mode(cfg.gain_mode);
    const bool analytic = mode != EvalMode::mc;
    const bool mc = mode != EvalMode::analytic;
    const auto realizations = static_cast<std::uint64_t>(cfg.realizations);

    s.protocol = Protocol::proposed;
    const double hd = scenario_outage_hd(s);
    if (analytic) {
        rows.push_back({sweep, "outage_hd", hd, 0.0, 0});
        rows.push_back({sweep, "throughput_hd", s.rate * (1.0 - hd), 0.0, 0});
    }
    for (std::size_t k = 0; k < cfg.protocols.size(); ++k) {
        s.protocol = parse_protocol(cfg.protocols[k]);
        const std::string name = to_string(s.protocol);
        RandomStream pc_rng = RandomStream(cfg.seed, stream_tag::forwarding).derive(point).derive(k);
        const double p_c = forwarding_probability(s, gain_mode, cfg.realizations, pc_rng);
        const double fd = outage_fd(outage_params(s), p_c);
        const std::uint64_t n_an = gain_mode == GainMode::per_realization ? realizations : 0;
        if (analytic) {
            rows.push_back({sweep, "outage_fd_" + name, fd, 0.0, n_an});
            rows.push_back({sweep, "p_c_" + name, p_c, 0.0, n_an});
            rows.push_back({sweep, "throughput_fd_" + name, s.rate * (1.0 - fd), 0.0, n_an});
        }
        if (mc) {
            const RandomStream stream = RandomStream(cfg.seed, stream_tag::outage).derive(point).derive(k);
            const OutageEstimate e = mc_outage(s, gain_mode, cfg.trials, stream, cfg.threads);
            rows.push_back({sweep, "outage_fd_" + name + "_mc", e.fd, e.fd_ci, e.trials});
            if (s.protocol == Protocol::proposed) rows.push_back({sweep, "outage_hd_mc", e.hd, e.hd_ci, e.trials});
            if (analytic && cfg.self_check) {
                auto check = [&](const char* what, double an, double sim, double sigma) {
                    if (std::abs(an - sim) > 3.0 * sigma + 1e-12)
                        throw Error(std::string("self-check failed for ") + what + " at sweep " + format_number(sweep) +
                                    ": analytic " + format_number(an) + " vs Monte Carlo " + format_number(sim));
                };
                check(("outage_fd_" + name).c_str(), fd, e.fd, e.fd_sigma);
                if (s.protocol == Protocol::proposed) check("outage_hd", hd, e.hd, e.hd_sigma);
            }
        }
    }
}

}  // namespace detail

/// Outage versus total average links SNR (mean of the source and relay SNR in dB).
inline std::vector<ResultRow> run_outage_experiment(const SimConfig& cfg) {
    cfg.validate();
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        const auto [p_s, p_r] = powers_for_snr(cfg.snr_db[i], cfg.sigma0_sq, cfg.power_fraction);
        detail::outage_point_rows(cfg, base_scenario(cfg, p_s, p_r), cfg.snr_db[i], i, rows);
    }
    return rows;
}

/// Outage versus normalized self-interference variance sigma_RR^2 / sigma_max^2 at a fixed SNR.
inline std::vector<ResultRow> run_si_sweep(const SimConfig& cfg) {
    cfg.validate();
    std::vector<ResultRow> rows;
    const auto [p_s, p_r] = powers_for_snr(cfg.si_snr_db, cfg.sigma0_sq, cfg.power_fraction);
    for (int k = 0; k < cfg.si_points; ++k) {
        const double frac = static_cast<double>(k) / (cfg.si_points - 1);
        Scenario s = base_scenario(cfg, p_s, p_r);
        s.sigma_rr_sq = frac * cfg.sigma_rr_max;
        detail::outage_point_rows(cfg, s, frac, static_cast<std::uint64_t>(k), rows);
    }
    return rows;
}

// ---------------------------------------------------------------- BER

/// Everything random in one L-frame transmission, drawn before any protocol runs so
/// that all protocols see identical data, fading and noise.
struct FrameDraw {
    std::vector<Bits> info;                 ///< CRC-terminated information words
    std::vector<std::vector<Complex>> x_s;  ///< source symbols per frame
    ChannelRealization channel;
    std::vector<std::vector<Complex>> relay_noise;        ///< L slots
    std::vector<std::vector<Complex>> destination_noise;  ///< L+1 slots
};

struct LinkSetup {
    SerialCodec codec;
    Constellation constellation;
    LinkGeometry geometry;
    NoiseModel noise;
    double p_s = 1.0;
    double p_r = 1.0;
    double epsilon = 0.5;
    double gamma_t = 3.0;
    int frames = 20;
};

inline FrameDraw draw_frames(const LinkSetup& link, RandomStream& rng) {
    FrameDraw d;
    const std::size_t payload = link.codec.info_bits() - kCrcBits;
    const auto frames = static_cast<std::size_t>(link.frames);
    for (std::size_t l = 0; l < frames; ++l) {
        Bits p(payload);
        for (auto& b : p) b = rng.bit();
        d.info.push_back(crc_attach(p));
        d.x_s.push_back(modulate(link.codec.encode(d.info.back()), link.constellation));
    }
    d.channel = draw_channel(link.geometry, link.noise, link.frames + 1, rng);
    const std::size_t symbols = d.x_s.front().size();
    auto noise_block = [&](std::size_t slots) {
        std::vector<std::vector<Complex>> n(slots, std::vector<Complex>(symbols));
        for (auto& slot : n)
            for (auto& v : slot) v = rng.complex_gaussian(link.noise.sigma0_sq);
        return n;
    };
    d.relay_noise = noise_block(frames);
    d.destination_noise = noise_block(frames + 1);
    return d;
}

/// Payload bit errors of one L-frame transmission under `protocol`.
inline std::uint64_t run_frame_chain(Protocol protocol, const LinkSetup& link, const FrameDraw& d) {
    const auto frames = static_cast<std::size_t>(link.frames);
    const std::size_t symbols = d.x_s.front().size();
    const ChannelRealization& ch = d.channel;
    const double gs = std::sqrt(link.p_s);
    const double gr = std::sqrt(link.p_r);

    RelayContext rctx;
    rctx.codec = &link.codec;
    rctx.constellation = link.constellation;
    rctx.p_s = link.p_s;
    rctx.p_r = link.p_r;
    rctx.noise = link.noise;
    rctx.epsilon = link.epsilon;

    std::vector<std::vector<Complex>> x_r(frames);
    RelaySlotState state = RelaySlotState::silent(symbols);
    std::vector<Complex> y(symbols);
    for (std::size_t l = 0; l < frames; ++l) {
        for (std::size_t m = 0; m < symbols; ++m)
            y[m] = gs * ch.h_sr[l] * d.x_s[l][m] + gr * ch.h_rr[l] * state.previous_frame[m] + d.relay_noise[l][m];
        BaselineSideInfo side;
        side.gamma_t = link.gamma_t;
        side.h_rr = ch.h_rr[l];
        side.source_frame = d.x_s[l];
        side.source_info = d.info[l];
        RelaySlotOutput out = relay_slot(protocol, y, ch.h_sr[l], state, rctx, side);
        x_r[l] = out.next_frame;
        state.previous_frame = std::move(out.next_frame);
        state.previous_mask = std::move(out.mask);
    }

    DestinationContext dctx{link.constellation, link.p_s, link.p_r, link.noise.sigma0_sq};
    std::vector<SlotLlrs> slots;
    for (std::size_t k = 0; k <= frames; ++k) {
        for (std::size_t m = 0; m < symbols; ++m) {
            Complex v = d.destination_noise[k][m];
            if (k < frames) v += gs * ch.h_sd[k] * d.x_s[k][m];
            if (k >= 1) v += gr * ch.h_rd[k] * x_r[k - 1][m];
            y[m] = v;
        }
        const SlotKind kind = k == 0 ? SlotKind::first : (k == frames ? SlotKind::last : SlotKind::middle);
        slots.push_back(detect_slot(y, ch.h_sd[k], ch.h_rd[k], kind, dctx));
    }
    const CombinedDecode dec = combine_and_decode(slots, link.codec);
    const std::size_t payload = link.codec.info_bits() - kCrcBits;
    std::uint64_t errors = 0;
    for (std::size_t l = 0; l < frames; ++l)
        for (std::size_t i = 0; i < payload; ++i) errors += dec.info_hat[l][i] != d.info[l][i] ? 1U : 0U;
    return errors;
}

inline LinkSetup link_setup(const SimConfig& cfg, double p_s, double p_r) {
    CodecConfig cc;
    cc.info_bits = cfg.info_bits;
    cc.doping_rate = cfg.doping_rate;
    cc.iterations = cfg.codec_iterations;
    cc.interleaver_seed = cfg.seed;
    return {SerialCodec(cc), Constellation::make(cfg.modulation), cfg.link_geometry(),
            NoiseModel{cfg.sigma0_sq, cfg.sigma_rr_sq}, p_s, p_r, cfg.selection_epsilon(), cfg.gamma_t, cfg.frames};
}

/// Payload BER per protocol versus total average links SNR. n_trials counts frames.
inline std::vector<ResultRow> run_ber_experiment(const SimConfig& cfg) {
    cfg.validate();
    std::vector<Protocol> protocols;
    for (const auto& p : cfg.protocols) protocols.push_back(parse_protocol(p));
    const std::size_t payload = cfg.info_bits - kCrcBits;
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        const auto [p_s, p_r] = powers_for_snr(cfg.snr_db[i], cfg.sigma0_sq, cfg.power_fraction);
        const LinkSetup link = link_setup(cfg, p_s, p_r);
        std::vector<std::vector<std::uint64_t>> errors(cfg.trials, std::vector<std::uint64_t>(protocols.size()));
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
            RandomStream rng = RandomStream(cfg.seed, stream_tag::ber).derive(i).derive(t);
            const FrameDraw d = draw_frames(link, rng);
            for (std::size_t k = 0; k < protocols.size(); ++k) errors[t][k] = run_frame_chain(protocols[k], link, d);
        });
        const auto bits = static_cast<double>(cfg.trials * payload * static_cast<std::size_t>(cfg.frames));
        for (std::size_t k = 0; k < protocols.size(); ++k) {
            std::uint64_t e = 0;
            for (const auto& per_trial : errors) e += per_trial[k];
            const double ber = static_cast<double>(e) / bits;
            rows.push_back({cfg.snr_db[i], "ber_" + to_string(protocols[k]), ber,
                            wilson_half_width(static_cast<double>(e), bits),
                            cfg.trials * static_cast<std::uint64_t>(cfg.frames)});
        }
    }
    return rows;
}

// ---------------------------------------------------------------- selection accuracy

/// Symbol error rate of nearest-point detection on AWGN at linear SNR (unit symbol energy).
inline double symbol_error_rate(int order, double snr) {
    auto q = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
    switch (order) {
        case 2: return q(std::sqrt(2.0 * snr));
        case 4: {
            const double p = q(std::sqrt(snr));
            return 1.0 - (1.0 - p) * (1.0 - p);
        }
        case 16: {
            const double p = 1.5 * q(std::sqrt(snr / 5.0));
            return 1.0 - (1.0 - p) * (1.0 - p);
        }
        default: throw Error("symbol_error_rate: supported orders are 2, 4 and 16");
    }
}

/// SNR in dB at which symbol_error_rate(order, .) equals target.
inline double snr_for_ser(int order, double target) {
    double lo = -30.0;
    double hi = 60.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (symbol_error_rate(order, db_to_linear(mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct SelectionCounts {
    std::uint64_t wrong = 0;    ///< selected and x_hat != x
    std::uint64_t correct = 0;  ///< selected and x_hat == x
    std::uint64_t symbols = 0;
};

/// One relay frame with no self-interference: returns selection outcomes per symbol.
inline SelectionCounts selection_trial(const RelayContext& ctx, Complex h_sr, std::size_t symbols, RandomStream& rng) {
    std::vector<Complex> x;
    if (ctx.codec != nullptr) {
        Bits info(ctx.codec->info_bits());
        for (auto& b : info) b = rng.bit();
        x = modulate(ctx.codec->encode(info), ctx.constellation);
    } else {
        x.resize(symbols);
        for (auto& v : x) v = ctx.constellation.point(static_cast<unsigned>(rng.next() % static_cast<unsigned>(ctx.constellation.order())));
    }
    std::vector<Complex> y(x.size());
    const double gs = std::sqrt(ctx.p_s);
    for (std::size_t m = 0; m < x.size(); ++m) y[m] = gs * h_sr * x[m] + rng.complex_gaussian(ctx.noise.sigma0_sq);
    const RelaySlotOutput out = relay_slot(y, h_sr, RelaySlotState::silent(x.size()), ctx);
    SelectionCounts c;
    c.symbols = x.size();
    for (std::size_t m = 0; m < x.size(); ++m) {
        if (!out.mask[m]) continue;
        if (std::abs(out.reconstructed[m] - x[m]) < 1e-12)
            ++c.correct;
        else
            ++c.wrong;
    }
    return c;
}

namespace detail {
inline SelectionCounts accumulate_selection(std::size_t trials, unsigned threads, const RandomStream& stream,
                                            const std::function<SelectionCounts(RandomStream&)>& trial) {
    std::vector<SelectionCounts> per(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        RandomStream rng = stream.derive(t);
        per[t] = trial(rng);
    });
    SelectionCounts sum;
    for (const auto& c : per) {
        sum.wrong += c.wrong;
        sum.correct += c.correct;
        sum.symbols += c.symbols;
    }
    return sum;
}

inline void push_selection_rows(double sweep, const std::string& suffix, const SelectionCounts& c,
                                std::vector<ResultRow>& rows) {
    const auto n = static_cast<double>(c.symbols);
    rows.push_back({sweep, "selected_wrong" + suffix, static_cast<double>(c.wrong) / n,
                    wilson_half_width(static_cast<double>(c.wrong), n), c.symbols});
    rows.push_back({sweep, "selected_correct" + suffix, static_cast<double>(c.correct) / n,
                    wilson_half_width(static_cast<double>(c.correct), n), c.symbols});
}
}  // namespace detail

/// Pr[selected and wrong] and Pr[selected and correct] per symbol, (a) versus S-R SNR
/// under Rayleigh fading with the configured relay decoder, and (b) versus constellation
/// order on AWGN with uncoded detection and the SNR set to hold the symbol error rate.
inline std::vector<ResultRow> run_selection_accuracy(const SimConfig& cfg) {
    cfg.validate();
    std::vector<ResultRow> rows;
    const bool coded = cfg.relay_decoder == "coded";
    CodecConfig cc;
    cc.info_bits = cfg.info_bits;
    cc.doping_rate = cfg.doping_rate;
    cc.iterations = cfg.codec_iterations;
    cc.interleaver_seed = cfg.seed;
    const SerialCodec codec(cc);
    const Constellation spec = Constellation::make(cfg.modulation);
    const std::size_t symbols = coded ? codec.coded_bits() / static_cast<std::size_t>(spec.bits_per_symbol())
                                      : cfg.info_bits;

    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        RelayContext ctx;
        ctx.codec = coded ? &codec : nullptr;
        ctx.constellation = spec;
        ctx.p_s = db_to_linear(cfg.snr_db[i]) * cfg.sigma0_sq;
        ctx.p_r = 0.0;
        ctx.noise = NoiseModel{cfg.sigma0_sq, 0.0};
        ctx.epsilon = cfg.selection_epsilon();
        const auto c = detail::accumulate_selection(
            cfg.trials, cfg.threads, RandomStream(cfg.seed, stream_tag::accuracy).derive(i), [&](RandomStream& rng) {
                const Complex h = rng.complex_gaussian(1.0);
                return selection_trial(ctx, h, symbols, rng);
            });
        detail::push_selection_rows(cfg.snr_db[i], "", c, rows);
    }

    for (std::size_t k = 0; k < cfg.orders.size(); ++k) {
        const int q = cfg.orders[k];
        const double snr_db = snr_for_ser(q, cfg.target_ser);
        RelayContext ctx;
        ctx.constellation = Constellation::make(q);
        ctx.p_s = db_to_linear(snr_db) * cfg.sigma0_sq;
        ctx.p_r = 0.0;
        ctx.noise = NoiseModel{cfg.sigma0_sq, 0.0};
        ctx.epsilon = selection_threshold(ctx.constellation);
        const auto c = detail::accumulate_selection(
            cfg.trials, cfg.threads, RandomStream(cfg.seed, stream_tag::accuracy).derive(1000 + k),
            [&](RandomStream& rng) { return selection_trial(ctx, Complex{1.0, 0.0}, cfg.info_bits, rng); });
        detail::push_selection_rows(q, "_q", c, rows);
        rows.push_back({static_cast<double>(q), "snr_db_q", snr_db, 0.0, 0});
    }
    return rows;
}

// ---------------------------------------------------------------- optimizer output

inline std::vector<ResultRow> optimum_rows(const OptimumReport& r) {
    std::vector<ResultRow> rows{{0.0, "p_s", r.p_s, 0.0, 0},
                                {0.0, "p_r", r.p_r, 0.0, 0},
                                {0.0, "d_sr", r.d_sr, 0.0, 0},
                                {0.0, "d_rd", r.d_rd, 0.0, 0},
                                {0.0, "outage", r.outage, 0.0, 0},
                                {0.0, "reference_outage", r.reference_outage, 0.0, 0},
                                {0.0, "iterations", static_cast<double>(r.iterations), 0.0, 0},
                                {0.0, "brackets", static_cast<double>(r.brackets), 0.0, 0},
                                {0.0, "stationary", r.stationary ? 1.0 : 0.0, 0.0, 0},
                                {0.0, "derivative_consistent", r.derivative_consistent ? 1.0 : 0.0, 0.0, 0}};
    if (r.convex) rows.push_back({0.0, "convex", *r.convex ? 1.0 : 0.0, 0.0, 0});
    if (r.unconstrained_p_r) rows.push_back({0.0, "unconstrained_p_r", *r.unconstrained_p_r, 0.0, 0});
    return rows;
}

inline constexpr const char* kContourHeader = "sweep,metric,value,ci_half_width,n_trials,p_s_frac,d_sr_frac,outage";

/// Result CSV with the grid coordinates appended; sweep is the grid index.
inline std::string format_contour(const std::vector<ContourPoint>& grid) {
    std::string out = std::string(kContourHeader) + "\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& p = grid[k];
        out += format_number(static_cast<double>(k)) + ",outage," + format_number(p.outage) + "," + format_number(0.0) +
               ",0," + format_number(p.p_s_frac) + "," + format_number(p.d_sr_frac) + "," + format_number(p.outage) +
               "\n";
    }
    return out;
}

}  // namespace sfdr
