#ifndef GRF_RNG_HPP
#define GRF_RNG_HPP

#include <cmath>
#include <cstdint>

namespace grf::rng {

// Counter-based generator (SplitMix64 output function applied to a keyed
// counter).  Every draw is a pure function of (seed, stream, counter), so
// sample batches can be generated in any order or on any number of threads
// and still reproduce bit-identically.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ull);
    }

    // Uniform on (0,1); never returns exactly 0 or 1.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // Standard normal via Box-Muller; draw i consumes counters 2i and 2i+1.
    double normal(std::uint64_t i) const {
        const double u1 = uniform(2 * i);
        const double u2 = uniform(2 * i + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
};

}  // namespace grf::rng

#endif  // GRF_RNG_HPP
