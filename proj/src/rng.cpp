#include "pulsewave/rng.hpp"

#include <cmath>

namespace pulsewave {

std::uint64_t Rng::mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t Rng::hash_tag(std::string_view tag) {
    // FNV-1a 64
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng Rng::derive(std::uint64_t seed, std::string_view a, std::string_view b,
                std::string_view c) {
    std::uint64_t s = mix(seed);
    s = mix(s ^ hash_tag(a));
    if (!b.empty()) s = mix(s ^ hash_tag(b));
    if (!c.empty()) s = mix(s ^ hash_tag(c));
    return Rng(s);
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return lo + x % span;
}

double Rng::exponential(double mean) {
    double u;
    do {
        u = uniform01();
    } while (u <= 0.0);
    return -mean * std::log(u);
}

std::uint64_t Rng::geometric1(double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    double u;
    do {
        u = uniform01();
    } while (u <= 0.0);
    // Inverse CDF of the shifted geometric on {1,2,...}.
    const double k = std::ceil(std::log(u) / std::log1p(-p));
    return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

std::size_t Rng::weighted_index(const std::vector<double>& cumulative) {
    if (cumulative.empty()) return 0;
    const double total = cumulative.back();
    const double x = uniform01() * total;
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] <= x) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace pulsewave
