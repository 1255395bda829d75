#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "oda/linalg.hpp"

namespace oda {

// Deterministic splittable RNG. All randomness in a run flows from one config
// seed through named child streams, so that every output file is reproducible
// bit-for-bit regardless of platform or standard-library version (the
// std::*_distribution classes are implementation-defined, so sampling is done
// by hand here).
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
        // Warm up so that small seeds decorrelate.
        next_u64();
        next_u64();
    }

    // Child stream derived from this stream's seed and a label; advancing the
    // child never affects the parent.
    SplitRng split(std::string_view label) const {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (const char c : label) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 1099511628211ULL;
        }
        return SplitRng(splitmix(state_ ^ h));
    }

    SplitRng split(std::uint64_t index) const {
        return SplitRng(splitmix(state_ + 0x632be59bd9b4e019ULL * (index + 1)));
    }

    std::uint64_t next_u64() {
        state_ = splitmix(state_);
        return state_;
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling removes modulo bias.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller on two fresh uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform direction on the unit sphere in `dim` dimensions.
    Vec unit_vector(std::size_t dim) {
        Vec v(dim);
        double n = 0.0;
        do {
            for (auto& c : v) c = normal();
            n = norm2(v);
        } while (n < 1e-12);
        for (auto& c : v) c /= n;
        return v;
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

}  // namespace oda
