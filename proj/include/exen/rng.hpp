#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "exen/error.hpp"

namespace exen::rng {

/// SplitMix64 finalizer. Used only to mix seeds, never as the main stream.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derives the seed of an independent substream from a master seed and a
/// substream index. Trial b of a resampling run uses derive(seed, b);
/// observation o of a generated sample uses derive(stream_seed, o). This
/// keeps parallel and serial execution byte-identical.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * (index + 1));
}

/// Deterministic random stream.
///
/// The generator family is fixed: std::mt19937_64 (fully specified by the
/// C++ standard, so sequences are identical across platforms and standard
/// library implementations). Bounded integers use unbiased rejection
/// sampling and normal deviates use Box-Muller, both implemented here so
/// that draws do not depend on unspecified std::*_distribution details.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    /// Independent stream for substream `index`, derived from this stream's
    /// construction seed via the recorded seed. Streams constructed from the
    /// same (seed, index) pair are identical.
    static Stream substream(std::uint64_t seed, std::uint64_t index) {
        return Stream(derive(seed, index));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on {0, 1, ..., bound-1}, unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw InvalidInputError("uniform_below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform on (0, 1]; 53-bit resolution.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
    }

    /// Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1p-53;
    }

    /// Standard normal deviate, Box-Muller. Deviates are produced in pairs;
    /// the second of each pair is cached, so draw order is well defined.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace exen::rng
