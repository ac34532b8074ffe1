#pragma once

#include <cstdint>
#include <random>

namespace xcube {

/// splitmix64 finisher; used to spread seeds.
inline uint64_t mix64(uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for run `run_index` of a sweep with the given master seed.
/// Runs are independent streams, so sweeps give identical output under
/// any parallelism degree or execution order.
inline uint64_t substream_seed(uint64_t master_seed, uint64_t run_index) {
    return mix64(master_seed + 0x9E3779B97F4A7C15ULL * (run_index + 1));
}

/// Seedable deterministic random source for measurement outcomes.
/// mt19937_64 output is pinned by the standard, so identical seeds give
/// identical runs on any platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Fair coin; +1 or -1. This is the only draw the simulators make.
    int fair_sign() { return (gen_() >> 63) ? -1 : +1; }

  private:
    std::mt19937_64 gen_;
};

} // namespace xcube
