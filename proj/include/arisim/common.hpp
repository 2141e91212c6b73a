#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace arisim {

using cgain = std::complex<double>;
using cvec = std::vector<cgain>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Validation helpers. Domain errors for bad numeric inputs, invalid_argument
// for structural violations.
// ---------------------------------------------------------------------------

inline void check_positive(double x, const char* name) {
    if (!(x > 0.0))
        throw std::domain_error(std::string(name) + " must be > 0, got " + std::to_string(x));
}

inline void check_nonnegative(double x, const char* name) {
    if (!(x >= 0.0))
        throw std::domain_error(std::string(name) + " must be >= 0, got " + std::to_string(x));
}

inline void check_arg(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// Unit conversions. dBm <-> watt conversions are centralized here so every
// module agrees bit-for-bit.
// ---------------------------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Wrap an angle to [-pi, pi).
inline double wrap_angle(double theta) {
    double w = theta - 2.0 * kPi * std::floor((theta + kPi) / (2.0 * kPi));
    if (w >= kPi) w -= 2.0 * kPi;  // guard against floor rounding at the seam
    return w;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. A thin wrapper over mt19937_64 with hand-rolled
// uniform/normal transforms so sampled sequences depend only on the seed and
// call order, not on library internals.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent child seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x51ed270b8a1c6d3bULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller (cos branch).
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Circularly-symmetric complex Gaussian CN(0, 1): re, im ~ N(0, 1/2).
    cgain cnormal() {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
        return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
    }

    /// Independent child generator for a named stream.
    Rng spawn(std::uint64_t stream) { return Rng(derive_seed(engine_(), stream)); }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Geometry.
// ---------------------------------------------------------------------------

struct Pos3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double dist3(const Pos3& a, const Pos3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double dist_horizontal(const Pos3& a, const Pos3& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Elevation angle from `from` towards `to`, in [-pi/2, pi/2].
inline double elevation_angle(const Pos3& from, const Pos3& to) {
    double dh = dist_horizontal(from, to);
    double dz = to.z - from.z;
    if (dh == 0.0 && dz == 0.0) return 0.0;
    return std::atan2(dz, dh);
}

}  // namespace arisim
