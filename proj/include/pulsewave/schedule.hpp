#ifndef PULSEWAVE_SCHEDULE_HPP
#define PULSEWAVE_SCHEDULE_HPP

#include <optional>
#include <string>
#include <vector>

#include "pulsewave/config.hpp"
#include "pulsewave/time.hpp"

namespace pulsewave {

// The single periodic timetable all attacker applications follow:
// per-vector offsets, per-target ON windows, retarget instants, and the
// cycle length C = sum_v(|T| * b_v + (|T|-1) * s_v).

struct Window {
    int vector_idx = 0;
    int target_idx = 0;      // index into the global target order
    SimTime start = 0;       // within the first cycle
    SimTime end = 0;         // half-open [start, end)
};

struct RetargetEvent {
    SimTime time = 0;  // absolute sim time
    int vector_idx = 0;
    int target_idx = 0;
};

struct Timetable {
    SimTime cycle_length = 0;
    std::vector<SimTime> offsets;   // o_v per vector
    std::vector<Window> windows;    // first cycle, sorted by start
    // All retarget instants in [0, duration), repeating with period C.
    std::vector<RetargetEvent> retargets;
    SimTime duration = 0;
    int target_count = 0;

    // Target index active for vector v at absolute time t, or nullopt
    // during gaps and other vectors' phases. Windows are half-open.
    std::optional<int> active_target(int vector_idx, SimTime t) const;

    // Total ON time of a vector within [0, duration), truncation included.
    SimTime on_time(int vector_idx) const;

    // ON intervals of (vector, target) within [0, duration), truncated.
    std::vector<std::pair<SimTime, SimTime>> on_intervals(int vector_idx,
                                                          int target_idx) const;

    // Plain-text table: one row per first-cycle window, plus C.
    std::string format(const std::vector<AttackVector>& vectors,
                       const std::vector<std::string>& targets) const;
};

SimTime compute_cycle_length(const std::vector<AttackVector>& vectors,
                             int n_targets);

Timetable build_timetable(const std::vector<AttackVector>& vectors,
                          int n_targets, SimTime duration);

}  // namespace pulsewave

#endif
