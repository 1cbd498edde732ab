#pragma once

// Seeded RNG wrapper. Gaussian draws use Box-Muller on top of the raw
// 64-bit stream: std::normal_distribution's sequence is
// implementation-defined, which would break byte-identical artifacts
// across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace clemo {

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform on (0, 1].
    double uniform01() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Inclusive integer range.
    int uniform_int(int lo, int hi) {
        const double u = uniform01();
        int v = lo + static_cast<int>(u * (static_cast<double>(hi) - lo + 1.0));
        return v > hi ? hi : v;
    }

    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace clemo
