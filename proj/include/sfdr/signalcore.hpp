#pragma once

// Complex/real-valued equivalences and reproducible random streams.
//
// Every real-valued form in the library uses the (real, imaginary) ordering.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sfdr {

using Complex = std::complex<double>;

/// Real-valued equivalent of a complex scalar: {Re, Im}.
using RealPair = std::array<double, 2>;

/// Error type for contract violations (bad configuration, inconsistent sizes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(message);
}

inline bool is_finite(Complex x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

/// 2x2 real matrix, row-major.
struct RealMatrix2 {
    std::array<double, 4> a{};  // [a00, a01, a10, a11]

    static constexpr RealMatrix2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
    static constexpr RealMatrix2 zero() { return {{0.0, 0.0, 0.0, 0.0}}; }
    static constexpr RealMatrix2 scaled_identity(double s) { return {{s, 0.0, 0.0, s}}; }

    constexpr double operator()(int r, int c) const { return a[static_cast<std::size_t>(2 * r + c)]; }

    constexpr RealMatrix2 transpose() const { return {{a[0], a[2], a[1], a[3]}}; }
    constexpr double determinant() const { return a[0] * a[3] - a[1] * a[2]; }

    RealMatrix2 inverse() const {
        const double det = determinant();
        require(det != 0.0, "RealMatrix2::inverse: singular matrix");
        return {{a[3] / det, -a[1] / det, -a[2] / det, a[0] / det}};
    }

    friend constexpr RealMatrix2 operator*(const RealMatrix2& l, const RealMatrix2& r) {
        return {{l.a[0] * r.a[0] + l.a[1] * r.a[2], l.a[0] * r.a[1] + l.a[1] * r.a[3],
                 l.a[2] * r.a[0] + l.a[3] * r.a[2], l.a[2] * r.a[1] + l.a[3] * r.a[3]}};
    }
    friend constexpr RealPair operator*(const RealMatrix2& m, const RealPair& v) {
        return {m.a[0] * v[0] + m.a[1] * v[1], m.a[2] * v[0] + m.a[3] * v[1]};
    }
    friend constexpr RealMatrix2 operator+(const RealMatrix2& l, const RealMatrix2& r) {
        return {{l.a[0] + r.a[0], l.a[1] + r.a[1], l.a[2] + r.a[2], l.a[3] + r.a[3]}};
    }
    friend constexpr RealMatrix2 operator*(double s, const RealMatrix2& m) {
        return {{s * m.a[0], s * m.a[1], s * m.a[2], s * m.a[3]}};
    }
};

constexpr RealPair operator+(const RealPair& l, const RealPair& r) { return {l[0] + r[0], l[1] + r[1]}; }
constexpr RealPair operator-(const RealPair& l, const RealPair& r) { return {l[0] - r[0], l[1] - r[1]}; }
constexpr double squared_norm(const RealPair& v) { return v[0] * v[0] + v[1] * v[1]; }

inline RealPair complex_to_real_pair(Complex x) { return {x.real(), x.imag()}; }

inline Complex real_pair_to_complex(const RealPair& p) { return {p[0], p[1]}; }

/// scale * [[Re h, -Im h], [Im h, Re h]]; multiplying by it equals complex multiplication by scale*h.
inline RealMatrix2 complex_to_real_matrix(Complex h, double scale) {
    require(scale >= 0.0, "complex_to_real_matrix: scale must be non-negative");
    return {{scale * h.real(), -scale * h.imag(), scale * h.imag(), scale * h.real()}};
}

namespace detail {
// SplitMix64 finalizer, used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Reproducible random stream keyed by (seed, stream id).
///
/// Streams with distinct ids are seeded through independent SplitMix64 chains
/// and are suitable for one-stream-per-trial Monte Carlo. A stream is single-owner;
/// derive() hands out child streams for sub-tasks without sharing state.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        const std::uint64_t k0 = detail::mix64(seed);
        const std::uint64_t k1 = detail::mix64(k0 ^ detail::mix64(stream_id + 0x632be59bd9b4e019ULL));
        std::seed_seq seq{static_cast<std::uint32_t>(k0), static_cast<std::uint32_t>(k0 >> 32),
                          static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream; deterministic in (seed, stream id, child index) and independent of draws made so far.
    RandomStream derive(std::uint64_t child) const {
        return RandomStream(seed_, detail::mix64(stream_id_ * 0x100000001b3ULL ^ detail::mix64(child)));
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return normal_(engine_); }
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
    std::uint64_t next() { return engine_(); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Zero-mean circularly-symmetric complex Gaussian with total variance `variance`.
    Complex complex_gaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * normal();
        const double im = s * normal();
        return {re, im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace sfdr
