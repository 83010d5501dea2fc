#ifndef FIRECAST_COMMON_HPP
#define FIRECAST_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace firecast {

// Thrown on malformed inputs, broken file containers, shape mismatches.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Deterministic RNG. Wraps mt19937_64 but derives floating-point draws
/// from raw bits so results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t bits() {
        // splitmix64-seeded xorshift would also do; mt19937_64 is fine and
        // bit-stable across platforms.
        return state_();
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; deterministic, no cached spare.
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Uniform integer in [0, n) by modulo; bias is negligible for n << 2^64.
    uint64_t below(uint64_t n) { return bits() % n; }

    /// Fisher-Yates.
    template <class Vec>
    void shuffle(Vec& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream (e.g. per-epoch shuffling).
    Rng fork(uint64_t salt) {
        return Rng(bits() ^ (salt * 0x9E3779B97F4A7C15ULL));
    }

private:
    std::mt19937_64 state_;
};

}  // namespace firecast

#endif  // FIRECAST_COMMON_HPP
