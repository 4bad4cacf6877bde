#include "noperr/rng.hpp"

#include <cmath>
#include <numbers>

namespace noperr {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ (counter * 0xd1b54a32d192ed03ULL));
}

double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    // 53 random bits, shifted off zero
    return (double(hash_key(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller on two sub-counters; only the cosine branch is used so each
// counter maps to exactly one normal
double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    double u1 = uniform_at(seed, stream, 2 * counter);
    double u2 = uniform_at(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace noperr
