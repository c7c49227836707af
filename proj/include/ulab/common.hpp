#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ulab {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(theta) = exp(2*pi*i*theta).
inline cplx e2pi(double theta) {
    return {std::cos(kTwoPi * theta), std::sin(kTwoPi * theta)};
}

// Fractional part in [0,1).
inline double frac01(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guard against floor rounding at the boundary
    return f;
}

// Distance to the nearest integer, ||x||_{R/Z}.
inline double dist_to_int(double x) {
    double f = frac01(x);
    return std::min(f, 1.0 - f);
}

// Compensated (Kahan) accumulator; fixed iteration order gives results
// independent of thread count when partials are combined in a fixed order.
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum() const { return s; }
};

struct KahanCplx {
    Kahan re, im;
    void add(const cplx& z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx sum() const { return {re.sum(), im.sum()}; }
};

// splitmix64: counter-friendly deterministic generator.  Seeding a stream
// from (seed, index) gives parallel determinism without shared RNG state.
struct Rng64 {
    uint64_t state;

    explicit Rng64(uint64_t seed) : state(seed) {}
    Rng64(uint64_t seed, uint64_t stream) : state(mix(seed ^ 0x9e3779b97f4a7c15ull, stream)) {}

    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) via 128-bit multiply-shift (deterministic, unbiased enough here).
    uint64_t below(uint64_t n) {
        return (uint64_t)(((__uint128_t)next() * n) >> 64);
    }

    // Uniform double in [0, 1).
    double unit() { return (next() >> 11) * 0x1.0p-53; }
};

}  // namespace ulab
