#pragma once

// One-dimensional outage minimization over power split or relay position under
// a total power budget, and the outage surface used for contour plots.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sfdr/analysis.hpp"
#include "sfdr/signalcore.hpp"

namespace sfdr {

enum class OptimizeMode {
    power_given_location,  ///< best P_S with P_R = P_tot - P_S at a fixed relay position
    location_given_power,  ///< best relay position at fixed P_S, P_R = P_tot - P_S
    equal_gain_location,   ///< best relay position with powers tied so both links have equal mean SNR
    separate_constraints,  ///< P_S at its cap, best P_R not exceeding its own cap
};

inline std::string to_string(OptimizeMode m) {
    switch (m) {
        case OptimizeMode::power_given_location: return "power_given_location";
        case OptimizeMode::location_given_power: return "location_given_power";
        case OptimizeMode::equal_gain_location: return "equal_gain_location";
        case OptimizeMode::separate_constraints: return "separate_constraints";
    }
    return "unknown";
}

inline OptimizeMode parse_optimize_mode(const std::string& name) {
    if (name == "power_given_location") return OptimizeMode::power_given_location;
    if (name == "location_given_power") return OptimizeMode::location_given_power;
    if (name == "equal_gain_location") return OptimizeMode::equal_gain_location;
    if (name == "separate_constraints") return OptimizeMode::separate_constraints;
    throw Error("unknown optimize mode '" + name + "'");
}

struct OptimizeConfig {
    OptimizeMode mode = OptimizeMode::power_given_location;
    double p_tot = 10.0;
    double d_sd = 1.0;
    double path_loss_exponent = 2.0;
    double rate = 2.0;
    double epsilon = 1.0;
    double sigma_rr_sq = 0.1;
    double sigma0_sq = 1.0;
    double sigma_x_sq = 1.0;
    int frames = 20;
    double d_sr = 0.5;     ///< fixed relay distance for power_given_location
    double p_s = 5.0;      ///< fixed source power for location_given_power
    double p_s_max = 5.0;  ///< caps for separate_constraints
    double p_r_max = 5.0;
    double tolerance = 1e-4;  ///< bisection stop width, relative to the search range
    int max_iterations = 60;
    int scan_points = 64;

    void validate() const {
        require(p_tot > 0.0 && d_sd > 0.0, "OptimizeConfig: p_tot and d_sd must be positive");
        require(path_loss_exponent >= 0.0 && rate >= 0.0 && epsilon >= 0.0 && sigma_rr_sq >= 0.0,
                "OptimizeConfig: parameters must be non-negative");
        require(sigma0_sq > 0.0 && sigma_x_sq > 0.0, "OptimizeConfig: noise and symbol power must be positive");
        require(frames >= 1, "OptimizeConfig: frames must be at least 1");
        require(d_sr >= 0.0 && d_sr <= d_sd, "OptimizeConfig: d_sr must lie in [0, d_sd]");
        require(p_s >= 0.0 && p_s <= p_tot, "OptimizeConfig: p_s must lie in [0, p_tot]");
        require(p_s_max >= 0.0 && p_r_max > 0.0, "OptimizeConfig: power caps must be positive");
        require(tolerance > 0.0 && max_iterations >= 1 && scan_points >= 3, "OptimizeConfig: invalid search settings");
    }
};

struct OptimumReport {
    double p_s = 0.0;
    double p_r = 0.0;
    double d_sr = 0.0;
    double d_rd = 0.0;
    double outage = 1.0;
    double reference_outage = 1.0;  ///< equal power, relay halfway
    int iterations = 0;             ///< largest bisection count over all brackets
    int brackets = 0;               ///< derivative sign changes (minima) found by the scan
    bool stationary = false;        ///< optimum is an interior stationary point
    bool derivative_consistent = true;
    std::optional<bool> convex;     ///< set by equal_gain_location
    std::optional<double> unconstrained_p_r;
    std::string diagnostic;
};

/// Outage of the proposed scheme at one operating point, relay collinear at d_sr.
inline double outage_at(const OptimizeConfig& cfg, double p_s, double p_r, double d_sr) {
    Scenario s;
    s.geometry = LinkGeometry::collinear(cfg.d_sd, d_sr, cfg.path_loss_exponent);
    s.p_s = std::max(p_s, 0.0);
    s.p_r = std::max(p_r, 0.0);
    s.sigma_rr_sq = cfg.sigma_rr_sq;
    s.sigma0_sq = cfg.sigma0_sq;
    s.sigma_x_sq = cfg.sigma_x_sq;
    s.epsilon = cfg.epsilon;
    s.rate = cfg.rate;
    s.frames = cfg.frames;
    return scenario_outage_fd(s);
}

/// Source power that equalizes the mean SNR of the S-D and R-D links for a relay at d_sr.
inline double equal_gain_source_power(const OptimizeConfig& cfg, double d_sr) {
    const double d_rd = std::max(cfg.d_sd - d_sr, 0.0);
    const double a = std::pow(cfg.d_sd, cfg.path_loss_exponent);
    const double b = std::pow(d_rd, cfg.path_loss_exponent);
    return cfg.p_tot * a / (a + b);
}

struct LineSearchResult {
    double arg = 0.0;
    double value = 0.0;
    int iterations = 0;
    int brackets = 0;
    bool stationary = false;
    bool consistent = true;
    std::vector<double> grid;
    std::vector<double> grid_values;
};

/// Minimize f on [lo, hi]: scan the central-difference derivative on a grid, bisect
/// every negative-to-positive sign change, and compare against both endpoints.
inline LineSearchResult minimize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                                             double tolerance, int max_iterations, int scan_points) {
    require(hi > lo, "minimize_on_interval: empty interval");
    const double range = hi - lo;
    const double h = 1e-5 * range;
    auto derivative = [&](double x, double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };

    LineSearchResult out;
    const auto n = static_cast<std::size_t>(scan_points);
    std::vector<double> xs(n);
    std::vector<double> ds(n);
    out.grid.resize(n);
    out.grid_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = lo + h + (range - 2.0 * h) * static_cast<double>(i) / static_cast<double>(n - 1);
        ds[i] = derivative(xs[i], h);
        const double half = derivative(xs[i], h / 2.0);
        if (std::abs(ds[i] - half) > 1e-3 * std::max(std::abs(ds[i]), std::abs(half)) + 1e-6) out.consistent = false;
        out.grid[i] = xs[i];
        out.grid_values[i] = f(xs[i]);
    }

    std::vector<double> candidates{lo, hi};
    std::vector<bool> interior{false, false};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(ds[i] < 0.0 && ds[i + 1] >= 0.0)) continue;
        ++out.brackets;
        double a = xs[i];
        double b = xs[i + 1];
        int iters = 0;
        while (b - a > tolerance * range && iters < max_iterations) {
            const double mid = 0.5 * (a + b);
            if (derivative(mid, h) < 0.0)
                a = mid;
            else
                b = mid;
            ++iters;
        }
        out.iterations = std::max(out.iterations, iters);
        candidates.push_back(0.5 * (a + b));
        interior.push_back(true);
    }

    out.value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double v = f(candidates[k]);
        if (v < out.value) {
            out.value = v;
            out.arg = candidates[k];
            out.stationary = interior[k];
        }
    }
    return out;
}

/// Non-negative second differences of the scanned values (tolerance scaled to the values).
inline bool scanned_convex(const LineSearchResult& r) {
    for (std::size_t i = 1; i + 1 < r.grid_values.size(); ++i) {
        const double second = r.grid_values[i - 1] - 2.0 * r.grid_values[i] + r.grid_values[i + 1];
        if (second < -1e-12 * std::max(1.0, std::abs(r.grid_values[i]))) return false;
    }
    return true;
}

inline OptimumReport optimize(const OptimizeConfig& cfg) {
    cfg.validate();
    OptimumReport rep;
    rep.reference_outage = outage_at(cfg, cfg.p_tot / 2.0, cfg.p_tot / 2.0, cfg.d_sd / 2.0);

    auto finish = [&](double p_s, double p_r, double d_sr, const LineSearchResult& r) {
        rep.p_s = p_s;
        rep.p_r = p_r;
        rep.d_sr = d_sr;
        rep.d_rd = cfg.d_sd - d_sr;
        rep.outage = outage_at(cfg, p_s, p_r, d_sr);
        rep.iterations = r.iterations;
        rep.brackets = r.brackets;
        rep.stationary = r.stationary;
        rep.derivative_consistent = r.consistent;
        if (r.brackets == 0) rep.diagnostic = "no derivative sign change; optimum at a boundary";
    };

    switch (cfg.mode) {
        case OptimizeMode::power_given_location: {
            auto f = [&](double p_s) { return outage_at(cfg, p_s, cfg.p_tot - p_s, cfg.d_sr); };
            const auto r = minimize_on_interval(f, 0.0, cfg.p_tot, cfg.tolerance, cfg.max_iterations, cfg.scan_points);
            finish(r.arg, cfg.p_tot - r.arg, cfg.d_sr, r);
            break;
        }
        case OptimizeMode::location_given_power: {
            auto f = [&](double d) { return outage_at(cfg, cfg.p_s, cfg.p_tot - cfg.p_s, d); };
            const auto r = minimize_on_interval(f, 0.0, cfg.d_sd, cfg.tolerance, cfg.max_iterations, cfg.scan_points);
            finish(cfg.p_s, cfg.p_tot - cfg.p_s, r.arg, r);
            break;
        }
        case OptimizeMode::equal_gain_location: {
            auto f = [&](double d) {
                const double p_s = equal_gain_source_power(cfg, d);
                return outage_at(cfg, p_s, cfg.p_tot - p_s, d);
            };
            const auto r = minimize_on_interval(f, 0.0, cfg.d_sd, cfg.tolerance, cfg.max_iterations, cfg.scan_points);
            const double p_s = equal_gain_source_power(cfg, r.arg);
            finish(p_s, cfg.p_tot - p_s, r.arg, r);
            rep.convex = scanned_convex(r);
            break;
        }
        case OptimizeMode::separate_constraints: {
            const double d = cfg.d_sr;
            auto f = [&](double p_r) { return outage_at(cfg, cfg.p_s_max, p_r, d); };
            const auto r =
                minimize_on_interval(f, 0.0, 10.0 * cfg.p_r_max, cfg.tolerance, cfg.max_iterations, cfg.scan_points);
            rep.unconstrained_p_r = r.arg;
            double best = std::min(r.arg, cfg.p_r_max);
            for (double cand : {cfg.p_r_max, 0.0})
                if (f(cand) < f(best)) best = cand;
            finish(cfg.p_s_max, best, d, r);
            rep.stationary = r.stationary && r.arg <= cfg.p_r_max && best == r.arg;
            break;
        }
    }
    return rep;
}

struct ContourPoint {
    double p_s_frac = 0.0;
    double d_sr_frac = 0.0;
    double outage = 1.0;
};

/// Outage over P_S / P_tot and d_SR / d_SD, both on [0, 1] with `resolution` points per axis.
inline std::vector<ContourPoint> contour_grid(const OptimizeConfig& cfg, int resolution) {
    cfg.validate();
    require(resolution >= 2, "contour_grid: resolution must be at least 2");
    std::vector<ContourPoint> out;
    out.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double pf = static_cast<double>(i) / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double df = static_cast<double>(j) / (resolution - 1);
            const double p_s = pf * cfg.p_tot;
            out.push_back({pf, df, outage_at(cfg, p_s, cfg.p_tot - p_s, df * cfg.d_sd)});
        }
    }
    return out;
}

}  // namespace sfdr
