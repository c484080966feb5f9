#pragma once
#include <cstdint>
#include <cstddef>
#include <vector>

// Counter-based deterministic RNG. std:: distributions are implementation
// defined, which would break golden vectors across platforms, so sampling is
// done by fixed transforms of a splitmix64-style stream:
//
//   base(seed)   = mix64(value ^ mix64((stream_id + 1) * GAMMA))
//   draw i       = mix64(base + i * GAMMA)
//   uniform(0,1) = ((draw >> 11) + 0.5) * 2^-53   (never exactly 0 or 1)
//
// Gaussian draws apply the AS241 inverse normal CDF to the uniform; Cauchy
// draws apply gamma * tan(pi * (u - 1/2)). Both conventions are frozen and
// covered by golden tests.

namespace fplab {

inline constexpr std::uint64_t RNG_GAMMA = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream_id = 0;
};

// Child seed for element `index` of experiment family `tag`. Distinct tags
// give unrelated streams from one master seed.
Seed derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

std::uint64_t stream_base(const Seed& s);

// i-th uniform draw of the stream, strictly inside (0,1).
double uniform01(const Seed& s, std::uint64_t i);

// AS241 (PPND16): inverse of the standard normal CDF, |error| ~ 1e-16.
double inverse_normal_cdf(double p);

std::vector<double> sample_gauss(const Seed& s, std::size_t n, double sigma);
std::vector<double> sample_cauchy(const Seed& s, std::size_t n, double gamma);

}  // namespace fplab
