#pragma once

// Gray-labelled BPSK/QPSK/16-QAM mapping, exact soft demapping, and the
// square-deviation selection threshold tied to the constellation geometry.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sfdr/signalcore.hpp"

namespace sfdr {

/// Saturation bound applied to every LLR the library emits.
inline constexpr double kLlrClamp = 50.0;

inline double clamp_llr(double llr) {
    if (std::isnan(llr)) return 0.0;
    return std::clamp(llr, -kLlrClamp, kLlrClamp);
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Q-ary constellation. points[label] is the symbol for `label`; bit 0 of a
/// symbol is the most significant bit of its label (first coded bit in the frame).
class Constellation {
public:
    static Constellation bpsk() { return Constellation(2, {Complex{1.0, 0.0}, Complex{-1.0, 0.0}}); }

    /// (b1, b0) -> ((1 - 2 b1) / sqrt2, (1 - 2 b0) / sqrt2)
    static Constellation qpsk() {
        const double a = 1.0 / std::sqrt(2.0);
        std::vector<Complex> pts(4);
        for (unsigned label = 0; label < 4; ++label) {
            const double b1 = (label >> 1) & 1U;
            const double b0 = label & 1U;
            pts[label] = {(1.0 - 2.0 * b1) * a, (1.0 - 2.0 * b0) * a};
        }
        return Constellation(4, std::move(pts));
    }

    /// Square 16-QAM, two Gray bits per axis: (sign, inner) with +3,+1,-1,-3 <-> 00,01,11,10.
    static Constellation qam16() {
        const double a = 1.0 / std::sqrt(10.0);
        auto level = [](unsigned sign, unsigned inner) { return (1.0 - 2.0 * sign) * (inner ? 1.0 : 3.0); };
        std::vector<Complex> pts(16);
        for (unsigned label = 0; label < 16; ++label) {
            const double re = level((label >> 3) & 1U, (label >> 2) & 1U);
            const double im = level((label >> 1) & 1U, label & 1U);
            pts[label] = {re * a, im * a};
        }
        return Constellation(16, std::move(pts));
    }

    static Constellation make(int order) {
        switch (order) {
            case 2: return bpsk();
            case 4: return qpsk();
            case 16: return qam16();
            default: throw Error("Constellation: supported orders are 2, 4 and 16");
        }
    }

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_; }
    const std::vector<Complex>& points() const { return points_; }
    Complex point(unsigned label) const { return points_[label]; }

    /// Bit i (0 = first/MSB) of a label.
    unsigned bit(unsigned label, int i) const { return (label >> (bits_ - 1 - i)) & 1U; }

    double average_energy() const {
        double e = 0.0;
        for (const auto& p : points_) e += std::norm(p);
        return e / static_cast<double>(points_.size());
    }

    double min_distance() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i)
            for (std::size_t j = i + 1; j < points_.size(); ++j) best = std::min(best, std::abs(points_[i] - points_[j]));
        return best;
    }

    unsigned label_of(std::span<const std::uint8_t> bits) const {
        unsigned label = 0;
        for (int i = 0; i < bits_; ++i) label = (label << 1) | (bits[static_cast<std::size_t>(i)] & 1U);
        return label;
    }

    /// Label of the constellation point nearest to z.
    unsigned nearest(Complex z) const {
        unsigned best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (unsigned label = 0; label < points_.size(); ++label) {
            const double d = std::norm(z - points_[label]);
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        return best;
    }

private:
    Constellation(int order, std::vector<Complex> pts) : order_(order), points_(std::move(pts)) {
        bits_ = 0;
        while ((1 << bits_) < order_) ++bits_;
    }

    int order_;
    int bits_ = 0;
    std::vector<Complex> points_;
};

/// Map coded bits to symbols, Z bits per symbol.
inline std::vector<Complex> modulate(std::span<const std::uint8_t> coded, const Constellation& spec) {
    const auto z = static_cast<std::size_t>(spec.bits_per_symbol());
    require(coded.size() % z == 0, "modulate: bit count is not a multiple of bits per symbol");
    std::vector<Complex> out(coded.size() / z);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = spec.point(spec.label_of(coded.subspan(m * z, z)));
    return out;
}

/// Inverse of modulate for noiseless symbols (nearest-point labels back to bits).
inline std::vector<std::uint8_t> hard_demodulate(std::span<const Complex> symbols, const Constellation& spec) {
    const int z = spec.bits_per_symbol();
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(z));
    for (const auto& s : symbols) {
        const unsigned label = spec.nearest(s);
        for (int i = 0; i < z; ++i) bits.push_back(static_cast<std::uint8_t>(spec.bit(label, i)));
    }
    return bits;
}

/// Exact (sum-form) bit LLRs for y = gain * h * x + n, E|n|^2 = var_total.
///
/// Writes Z values to `out`; LLR = log Pr[b=0|y] - log Pr[b=1|y], clamped to +-kLlrClamp.
inline void soft_demodulate(Complex y, Complex h, double gain, double var_total, const Constellation& spec,
                            std::span<double> out) {
    require(var_total > 0.0, "soft_demodulate: var_total must be positive");
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const int z = spec.bits_per_symbol();
    std::array<double, 8> num{};
    std::array<double, 8> den{};
    num.fill(kNegInf);
    den.fill(kNegInf);
    const Complex gh = gain * h;
    for (unsigned label = 0; label < static_cast<unsigned>(spec.order()); ++label) {
        const double metric = -std::norm(y - gh * spec.point(label)) / var_total;
        for (int i = 0; i < z; ++i) {
            auto& acc = spec.bit(label, i) == 0 ? num[static_cast<std::size_t>(i)] : den[static_cast<std::size_t>(i)];
            acc = log_sum_exp(acc, metric);
        }
    }
    for (int i = 0; i < z; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = clamp_llr(num[k] - den[k]);
    }
}

inline std::vector<double> soft_demodulate(Complex y, Complex h, double gain, double var_total,
                                           const Constellation& spec) {
    std::vector<double> out(static_cast<std::size_t>(spec.bits_per_symbol()));
    soft_demodulate(y, h, gain, var_total, spec, out);
    return out;
}

/// Square of half the minimum distance between constellation points.
inline double selection_threshold(const Constellation& spec) {
    require(spec.order() >= 2, "selection_threshold: need at least two points");
    const double half = spec.min_distance() / 2.0;
    return half * half;
}

}  // namespace sfdr
