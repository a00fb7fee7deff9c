#pragma once

#include <cmath>
#include <cstdint>

namespace tcond {

// Counter-based generator: every output is a pure function of
// (seed, stream, index), so parallel consumers reproduce the same values
// no matter how work is scheduled.  The word function is the SplitMix64
// sequence evaluated at an arbitrary index under a per-stream derived key.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(derive_key(seed, stream)) {}

    std::uint64_t word(std::uint64_t index) const noexcept {
        return mix(key_ + (index + 1) * kGamma);
    }

    // Uniform on [0, 1), 53-bit mantissa.
    double uniform(std::uint64_t index) const noexcept {
        return static_cast<double>(word(index) >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos(std::uint64_t index) const noexcept {
        return static_cast<double>((word(index) >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via the trigonometric Box-Muller map.  Each call
    // consumes the uniform pair at (2*index, 2*index + 1) and keeps only the
    // cosine branch, so draws stay addressable by index.
    double gaussian(std::uint64_t index) const noexcept {
        const double u1 = uniform_pos(2 * index);
        const double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
        const std::uint64_t a = mix(seed + kGamma);
        return mix(a ^ (stream * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL));
    }

    std::uint64_t key_;
};

}  // namespace tcond
