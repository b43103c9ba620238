#ifndef PULSEWAVE_RNG_HPP
#define PULSEWAVE_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pulsewave {

// Deterministic per-application random streams. Every stream is derived
// from (global seed, name tags), so changing one application's tag never
// perturbs the draws of any other stream. Distribution sampling is
// hand-rolled on top of mt19937_64 output because the std distribution
// objects are implementation-defined.
class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t mix(std::uint64_t x);
    static std::uint64_t hash_tag(std::string_view tag);

    // Substream derivation: seed + any number of tags.
    static Rng derive(std::uint64_t seed, std::string_view a,
                      std::string_view b = {}, std::string_view c = {});

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [lo, hi] inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    // Exponential with the given mean.
    double exponential(double mean);

    // Geometric on {1, 2, ...} with the given mean (mean >= 1).
    std::uint64_t geometric1(double mean);

    // Index into a cumulative-weight table (weights need not be normalized).
    std::size_t weighted_index(const std::vector<double>& cumulative);

private:
    std::mt19937_64 engine_;
};

}  // namespace pulsewave

#endif
