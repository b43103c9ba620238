#include "pulsewave/schedule.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pulsewave {

SimTime compute_cycle_length(const std::vector<AttackVector>& vectors,
                             int n_targets) {
    SimTime c = 0;
    for (const AttackVector& v : vectors) {
        c += static_cast<SimTime>(n_targets) * v.burst +
             static_cast<SimTime>(n_targets - 1) * v.switch_gap;
    }
    return c;
}

Timetable build_timetable(const std::vector<AttackVector>& vectors,
                          int n_targets, SimTime duration) {
    Timetable tt;
    tt.duration = duration;
    tt.target_count = n_targets;
    tt.cycle_length = compute_cycle_length(vectors, n_targets);
    if (vectors.empty() || n_targets < 1) return tt;

    // Vectors serialize back-to-back unless an explicit offset overrides.
    SimTime next_auto = 0;
    for (const AttackVector& v : vectors) {
        const SimTime o = v.offset.value_or(next_auto);
        tt.offsets.push_back(o);
        next_auto = next_auto + static_cast<SimTime>(n_targets) * v.burst +
                    static_cast<SimTime>(n_targets - 1) * v.switch_gap;
    }

    for (std::size_t vi = 0; vi < vectors.size(); ++vi) {
        const AttackVector& v = vectors[vi];
        for (int k = 0; k < n_targets; ++k) {
            Window w;
            w.vector_idx = static_cast<int>(vi);
            w.target_idx = k;
            w.start = tt.offsets[vi] +
                      static_cast<SimTime>(k) * (v.burst + v.switch_gap);
            w.end = w.start + v.burst;
            tt.windows.push_back(w);
        }
    }
    std::sort(tt.windows.begin(), tt.windows.end(),
              [](const Window& a, const Window& b) {
                  if (a.start != b.start) return a.start < b.start;
                  if (a.vector_idx != b.vector_idx) {
                      return a.vector_idx < b.vector_idx;
                  }
                  return a.target_idx < b.target_idx;
              });

    // Retarget instant at every window start, repeated each cycle until the
    // simulation ends; windows starting at or past `duration` are dropped.
    for (SimTime base = 0; base < duration; base += tt.cycle_length) {
        for (const Window& w : tt.windows) {
            const SimTime t = base + w.start;
            if (t >= duration) continue;
            tt.retargets.push_back({t, w.vector_idx, w.target_idx});
        }
        if (tt.cycle_length <= 0) break;
    }
    std::sort(tt.retargets.begin(), tt.retargets.end(),
              [](const RetargetEvent& a, const RetargetEvent& b) {
                  if (a.time != b.time) return a.time < b.time;
                  return a.vector_idx < b.vector_idx;
              });
    return tt;
}

std::optional<int> Timetable::active_target(int vector_idx, SimTime t) const {
    if (cycle_length <= 0 || t < 0) return std::nullopt;
    const SimTime phase = t % cycle_length;
    for (const Window& w : windows) {
        if (w.vector_idx != vector_idx) continue;
        if (phase >= w.start && phase < w.end) return w.target_idx;
    }
    return std::nullopt;
}

SimTime Timetable::on_time(int vector_idx) const {
    SimTime total = 0;
    for (const Window& w : windows) {
        if (w.vector_idx != vector_idx) continue;
        for (SimTime base = 0; base < duration; base += cycle_length) {
            const SimTime start = base + w.start;
            const SimTime end = std::min(base + w.end, duration);
            if (start >= duration) break;
            total += end - start;
            if (cycle_length <= 0) break;
        }
    }
    return total;
}

std::vector<std::pair<SimTime, SimTime>> Timetable::on_intervals(
    int vector_idx, int target_idx) const {
    std::vector<std::pair<SimTime, SimTime>> out;
    for (const Window& w : windows) {
        if (w.vector_idx != vector_idx || w.target_idx != target_idx) continue;
        for (SimTime base = 0; base < duration; base += cycle_length) {
            const SimTime start = base + w.start;
            const SimTime end = std::min(base + w.end, duration);
            if (start >= duration) break;
            out.emplace_back(start, end);
            if (cycle_length <= 0) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string Timetable::format(const std::vector<AttackVector>& vectors,
                              const std::vector<std::string>& targets) const {
    std::ostringstream out;
    out << "vector\ttarget\ton_start\ton_end\tretarget\n";
    char buf[160];
    for (const Window& w : windows) {
        std::snprintf(buf, sizeof buf, "%s\t%s\t%.6f\t%.6f\t%.6f\n",
                      vectors[static_cast<std::size_t>(w.vector_idx)].id.c_str(),
                      targets[static_cast<std::size_t>(w.target_idx)].c_str(),
                      to_seconds(w.start), to_seconds(w.end),
                      to_seconds(w.start));
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "C = %.6f s\n", to_seconds(cycle_length));
    out << buf;
    return out.str();
}

}  // namespace pulsewave
