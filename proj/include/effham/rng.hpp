#ifndef EFFHAM_RNG_HPP
#define EFFHAM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace effham {

// Counter-based pseudorandom streams. Every draw is a pure function of
// (seed, counter), so sample i of a Monte-Carlo run has the same value no
// matter how the loop is split across workers.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed) ^ splitmix64(counter));
}

// uniform in (0, 1]; never returns 0 so it is safe under log()
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(hash(seed, counter) >> 11) + 1.0) * 0x1.0p-53;
}

// standard complex gaussian: re, im ~ N(0, 1/2) each, E|z|^2 = 1
inline std::complex<double> gaussian(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = uniform(seed, 2 * counter);
    const double u2 = uniform(seed, 2 * counter + 1);
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

// real standard normal
inline double normal(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = uniform(seed, 2 * counter);
    const double u2 = uniform(seed, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng
}  // namespace effham

#endif
