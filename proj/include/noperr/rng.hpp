#pragma once

#include <cstdint>

namespace noperr {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results never depend on evaluation order.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);  // (0,1)
double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// derive an independent seed for a named sub-purpose
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}
    double uniform() { return uniform_at(seed_, stream_, counter_++); }
    double normal() { return normal_at(seed_, stream_, counter_++); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t seed_, stream_, counter_ = 0;
};

}  // namespace noperr
