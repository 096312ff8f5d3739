#pragma once

// Simulation and optimizer configuration, loaded from JSON with strict key checking.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfdr/analysis.hpp"
#include "sfdr/channel.hpp"
#include "sfdr/modem.hpp"
#include "sfdr/optimize.hpp"
#include "sfdr/protocol.hpp"
#include "sfdr/results.hpp"

namespace sfdr {

enum class EvalMode { analytic, mc, both };

inline EvalMode parse_eval_mode(const std::string& s) {
    if (s == "analytic") return EvalMode::analytic;
    if (s == "mc") return EvalMode::mc;
    if (s == "both") return EvalMode::both;
    throw Error("unknown mode '" + s + "' (expected analytic, mc or both)");
}

inline GainMode parse_gain_mode(const std::string& s) {
    if (s == "expected") return GainMode::expected;
    if (s == "per_realization") return GainMode::per_realization;
    throw Error("unknown gain_mode '" + s + "'");
}

struct SimConfig {
    int frames = 20;
    std::size_t info_bits = 512;
    int modulation = 4;
    std::optional<double> epsilon;  ///< defaults to selection_threshold(modulation)
    std::string geometry = "L1";    ///< L1, L2 or custom
    double d_sd = 1.0;
    double d_sr = 0.5;              ///< used by the custom geometry
    double path_loss_exponent = 2.0;
    double sigma_rr_sq = 1.0;
    double sigma0_sq = 1.0;
    double rate = 1.0;
    double gamma_t = 3.0;
    std::vector<std::string> protocols{"proposed"};
    std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30, 35, 40};
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    double power_fraction = 0.5;
    std::string gain_mode = "expected";
    int realizations = 1000;
    std::string mode = "analytic";
    bool self_check = false;
    double sigma_rr_max = 5.0;
    double si_snr_db = 3.0;
    int si_points = 21;
    int codec_iterations = 8;
    int doping_rate = 2;
    std::string relay_decoder = "coded";  ///< coded or uncoded (selection accuracy)
    std::vector<int> orders{2, 4, 16};
    double target_ser = 0.02;
    unsigned threads = 0;  ///< 0 = hardware concurrency

    double selection_epsilon() const { return epsilon.value_or(selection_threshold(Constellation::make(modulation))); }

    LinkGeometry link_geometry() const {
        if (geometry == "L1") return LinkGeometry::preset_l1(d_sd, path_loss_exponent);
        if (geometry == "L2") return LinkGeometry::preset_l2(d_sd, path_loss_exponent);
        if (geometry == "custom") return LinkGeometry::collinear(d_sd, d_sr, path_loss_exponent);
        throw Error("unknown geometry '" + geometry + "' (expected L1, L2 or custom)");
    }

    void validate() const {
        require(frames >= 2 && frames % 2 == 0, "SimConfig: frames must be a positive even number");
        require(info_bits > kCrcBits, "SimConfig: info_bits must exceed the CRC length");
        Constellation::make(modulation);
        require(!epsilon || *epsilon >= 0.0, "SimConfig: epsilon must be non-negative");
        link_geometry().validate();
        require(sigma_rr_sq >= 0.0 && sigma0_sq > 0.0, "SimConfig: invalid noise parameters");
        require(rate >= 0.0 && gamma_t >= 0.0, "SimConfig: rate and gamma_t must be non-negative");
        require(!protocols.empty(), "SimConfig: protocols must not be empty");
        for (const auto& p : protocols) parse_protocol(p);
        require(!snr_db.empty(), "SimConfig: snr_db must not be empty");
        require(trials >= 1 && realizations >= 1, "SimConfig: counts must be positive");
        require(power_fraction > 0.0 && power_fraction < 1.0, "SimConfig: power_fraction must lie in (0, 1)");
        parse_gain_mode(gain_mode);
        parse_eval_mode(mode);
        require(sigma_rr_max >= 0.0 && si_points >= 2, "SimConfig: invalid SI sweep");
        require(codec_iterations >= 1 && doping_rate >= 1, "SimConfig: invalid codec settings");
        require(relay_decoder == "coded" || relay_decoder == "uncoded", "SimConfig: relay_decoder must be coded or uncoded");
        for (int q : orders) Constellation::make(q);
        require(target_ser > 0.0 && target_ser < 0.5, "SimConfig: target_ser must lie in (0, 0.5)");
    }
};

namespace detail {
inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
    require(j.is_object(), std::string(what) + ": config must be a JSON object");
    for (const auto& item : j.items())
        if (!known.contains(item.key())) throw Error(std::string(what) + ": unknown key '" + item.key() + "'");
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config key '") + key + "': " + e.what());
    }
}
}  // namespace detail

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{
        "frames", "info_bits", "modulation", "epsilon", "geometry", "d_sd", "d_sr", "path_loss_exponent",
        "sigma_rr_sq", "sigma0_sq", "rate", "gamma_t", "protocols", "snr_db", "trials", "seed", "power_fraction",
        "gain_mode", "realizations", "mode", "self_check", "sigma_rr_max", "si_snr_db", "si_points",
        "codec_iterations", "doping_rate", "relay_decoder", "orders", "target_ser", "threads"};
    detail::reject_unknown_keys(j, known, "SimConfig");
    SimConfig c;
    using detail::read_key;
    read_key(j, "frames", c.frames);
    read_key(j, "info_bits", c.info_bits);
    read_key(j, "modulation", c.modulation);
    if (j.contains("epsilon")) {
        double e = 0.0;
        read_key(j, "epsilon", e);
        c.epsilon = e;
    }
    read_key(j, "geometry", c.geometry);
    read_key(j, "d_sd", c.d_sd);
    read_key(j, "d_sr", c.d_sr);
    read_key(j, "path_loss_exponent", c.path_loss_exponent);
    read_key(j, "sigma_rr_sq", c.sigma_rr_sq);
    read_key(j, "sigma0_sq", c.sigma0_sq);
    read_key(j, "rate", c.rate);
    read_key(j, "gamma_t", c.gamma_t);
    read_key(j, "protocols", c.protocols);
    read_key(j, "snr_db", c.snr_db);
    read_key(j, "trials", c.trials);
    read_key(j, "seed", c.seed);
    read_key(j, "power_fraction", c.power_fraction);
    read_key(j, "gain_mode", c.gain_mode);
    read_key(j, "realizations", c.realizations);
    read_key(j, "mode", c.mode);
    read_key(j, "self_check", c.self_check);
    read_key(j, "sigma_rr_max", c.sigma_rr_max);
    read_key(j, "si_snr_db", c.si_snr_db);
    read_key(j, "si_points", c.si_points);
    read_key(j, "codec_iterations", c.codec_iterations);
    read_key(j, "doping_rate", c.doping_rate);
    read_key(j, "relay_decoder", c.relay_decoder);
    read_key(j, "orders", c.orders);
    read_key(j, "target_ser", c.target_ser);
    read_key(j, "threads", c.threads);
    c.validate();
    return c;
}

inline OptimizeConfig optimize_config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"mode", "p_tot", "d_sd", "path_loss_exponent", "rate", "epsilon",
                                             "sigma_rr_sq", "sigma0_sq", "sigma_x_sq", "frames", "d_sr", "p_s",
                                             "p_s_max", "p_r_max", "tolerance", "max_iterations", "scan_points",
                                             "resolution"};
    detail::reject_unknown_keys(j, known, "OptimizeConfig");
    OptimizeConfig c;
    using detail::read_key;
    if (j.contains("mode")) {
        std::string m;
        read_key(j, "mode", m);
        c.mode = parse_optimize_mode(m);
    }
    read_key(j, "p_tot", c.p_tot);
    read_key(j, "d_sd", c.d_sd);
    read_key(j, "path_loss_exponent", c.path_loss_exponent);
    read_key(j, "rate", c.rate);
    read_key(j, "epsilon", c.epsilon);
    read_key(j, "sigma_rr_sq", c.sigma_rr_sq);
    read_key(j, "sigma0_sq", c.sigma0_sq);
    read_key(j, "sigma_x_sq", c.sigma_x_sq);
    read_key(j, "frames", c.frames);
    read_key(j, "d_sr", c.d_sr);
    read_key(j, "p_s", c.p_s);
    read_key(j, "p_s_max", c.p_s_max);
    read_key(j, "p_r_max", c.p_r_max);
    read_key(j, "tolerance", c.tolerance);
    read_key(j, "max_iterations", c.max_iterations);
    read_key(j, "scan_points", c.scan_points);
    c.validate();
    return c;
}

/// Grid resolution for contour output (optional "resolution" key, default 41).
inline int contour_resolution(const nlohmann::json& j) {
    int r = 41;
    detail::read_key(j, "resolution", r);
    require(r >= 2, "resolution must be at least 2");
    return r;
}

inline nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("cannot parse '" + path + "': " + e.what());
    }
}

}  // namespace sfdr
