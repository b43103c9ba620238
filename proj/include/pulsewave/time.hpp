#ifndef PULSEWAVE_TIME_HPP
#define PULSEWAVE_TIME_HPP

#include <cstdint>
#include <cmath>

namespace pulsewave {

// Simulation time is kept in integer nanoseconds so that schedules and
// event ordering never depend on floating-point accumulation.
using SimTime = std::int64_t;

constexpr SimTime kNsPerSec = 1'000'000'000;

inline SimTime to_ns(double seconds) {
    return static_cast<SimTime>(std::llround(seconds * 1e9));
}

inline double to_seconds(SimTime t) {
    return static_cast<double>(t) / 1e9;
}

inline std::int64_t to_us_floor(SimTime t) {
    return t / 1000;
}

}  // namespace pulsewave

#endif
