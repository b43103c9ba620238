#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "pulsewave/schedule.hpp"

using namespace pulsewave;

namespace {

AttackVector vec(const std::string& id, double burst_s, double switch_s) {
    AttackVector v;
    v.id = id;
    v.protocol = Protocol::Udp;
    v.sizes = SizeDistribution::single(96);
    v.rate_bps = 1e6;
    v.burst = to_ns(burst_s);
    v.switch_gap = to_ns(switch_s);
    return v;
}

}  // namespace

TEST_CASE("cycle length formula") {
    SUBCASE("one vector, one target: no switch terms") {
        CHECK(compute_cycle_length({vec("a", 5, 2)}, 1) == to_ns(5.0));
    }
    SUBCASE("three vectors, three targets") {
        const std::vector<AttackVector> vs = {vec("a", 5, 2), vec("b", 5, 2),
                                              vec("c", 5, 2)};
        CHECK(compute_cycle_length(vs, 3) == to_ns(57.0));  // 3 * (15 + 4)
    }
    SUBCASE("mixed parameters, two targets") {
        const std::vector<AttackVector> vs = {vec("a", 2, 1), vec("b", 4, 0),
                                              vec("c", 3, 2)};
        // (4+1) + (8+0) + (6+2) = 21
        CHECK(compute_cycle_length(vs, 2) == to_ns(21.0));
    }
}

TEST_CASE("timetable shape: three vectors, three targets") {
    const std::vector<AttackVector> vs = {vec("a", 5, 2), vec("b", 3, 1),
                                          vec("c", 4, 2)};
    const SimTime C = compute_cycle_length(vs, 3);
    const Timetable tt = build_timetable(vs, 3, 10 * C);

    CHECK(tt.cycle_length == C);
    CHECK(tt.windows.size() == 9);

    // Vector v+1 starts exactly where vector v's span (including trailing
    // switch slot) ends.
    CHECK(tt.offsets[0] == 0);
    CHECK(tt.offsets[1] == to_ns(3 * 5 + 2 * 2.0));
    CHECK(tt.offsets[2] == tt.offsets[1] + to_ns(3 * 3 + 2 * 1.0));

    // Window (v, k) = o_v + (k-1)(b+s), length b.
    for (const Window& w : tt.windows) {
        const AttackVector& v = vs[static_cast<std::size_t>(w.vector_idx)];
        const SimTime expected_start =
            tt.offsets[static_cast<std::size_t>(w.vector_idx)] +
            static_cast<SimTime>(w.target_idx) * (v.burst + v.switch_gap);
        CHECK(w.start == expected_start);
        CHECK(w.end - w.start == v.burst);
    }

    // Sum of windows and gaps over one cycle is exactly C.
    SimTime sum = 0;
    for (const AttackVector& v : vs) sum += 3 * v.burst + 2 * v.switch_gap;
    CHECK(sum == C);

    // Auto-computed offsets keep ON windows pairwise disjoint.
    for (std::size_t i = 0; i < tt.windows.size(); ++i) {
        for (std::size_t j = i + 1; j < tt.windows.size(); ++j) {
            const Window& a = tt.windows[i];
            const Window& b = tt.windows[j];
            CHECK((a.end <= b.start || b.end <= a.start));
        }
    }
}

TEST_CASE("zero switch gap abuts windows") {
    const std::vector<AttackVector> vs = {vec("a", 2, 0)};
    const Timetable tt = build_timetable(vs, 3, to_ns(60.0));
    REQUIRE(tt.windows.size() == 3);
    CHECK(tt.windows[0].end == tt.windows[1].start);
    CHECK(tt.windows[1].end == tt.windows[2].start);
}

TEST_CASE("truncation against an interval-arithmetic oracle") {
    const std::vector<AttackVector> vs = {vec("a", 3, 1), vec("b", 2, 2)};
    const int n_targets = 2;
    const SimTime C = compute_cycle_length(vs, n_targets);  // (6+1)+(4+2)=13
    REQUIRE(C == to_ns(13.0));
    const SimTime duration = to_ns(20.0);  // mid-second-cycle cut
    const Timetable tt = build_timetable(vs, n_targets, duration);

    // Oracle: enumerate (cycle, window) pairs and clip to [0, duration).
    for (std::size_t vi = 0; vi < vs.size(); ++vi) {
        SimTime expected_on = 0;
        int expected_retargets = 0;
        for (SimTime base = 0; base < duration; base += C) {
            for (int k = 0; k < n_targets; ++k) {
                const SimTime start =
                    base + tt.offsets[vi] +
                    static_cast<SimTime>(k) * (vs[vi].burst + vs[vi].switch_gap);
                if (start >= duration) continue;
                expected_on += std::min(start + vs[vi].burst, duration) - start;
                ++expected_retargets;
            }
        }
        CHECK(tt.on_time(static_cast<int>(vi)) == expected_on);
        int actual_retargets = 0;
        for (const RetargetEvent& r : tt.retargets) {
            if (r.vector_idx == static_cast<int>(vi)) ++actual_retargets;
        }
        CHECK(actual_retargets == expected_retargets);
    }
}

TEST_CASE("active_target boundaries and periodicity") {
    const std::vector<AttackVector> vs = {vec("a", 5, 2), vec("b", 5, 2)};
    const Timetable tt = build_timetable(vs, 2, to_ns(1000.0));
    const SimTime C = tt.cycle_length;  // 2 * 12 = 24 s
    REQUIRE(C == to_ns(24.0));

    SUBCASE("window start is inclusive") {
        CHECK(tt.active_target(0, 0) == 0);
        CHECK(tt.active_target(0, to_ns(7.0)) == 1);  // second window start
    }
    SUBCASE("window end is exclusive when a gap follows") {
        CHECK_FALSE(tt.active_target(0, to_ns(5.0)).has_value());
        CHECK_FALSE(tt.active_target(0, to_ns(6.9)).has_value());
    }
    SUBCASE("other vector's phase returns nothing") {
        CHECK_FALSE(tt.active_target(1, 0).has_value());
        CHECK(tt.active_target(1, to_ns(12.0)) == 0);
    }
    SUBCASE("periodicity: t = C + o_v + (b+s) lands on the second target") {
        CHECK(tt.active_target(0, C + to_ns(7.0)) == 1);
        // Property: active_target(t) == active_target(t + C).
        for (SimTime t = 0; t < C; t += to_ns(0.25)) {
            for (int v = 0; v < 2; ++v) {
                CHECK(tt.active_target(v, t) == tt.active_target(v, t + C));
            }
        }
    }
}

TEST_CASE("retarget count per full cycle is vectors times targets") {
    const std::vector<AttackVector> vs = {vec("a", 1, 1), vec("b", 2, 0),
                                          vec("c", 1, 2)};
    const int n_targets = 3;
    const SimTime C = compute_cycle_length(vs, n_targets);
    const Timetable tt = build_timetable(vs, n_targets, 2 * C);  // 2 full cycles
    CHECK(tt.retargets.size() == 2 * vs.size() * n_targets);
}

TEST_CASE("explicit offsets override the serialized layout") {
    std::vector<AttackVector> vs = {vec("a", 2, 1), vec("b", 2, 1)};
    vs[1].offset = to_ns(1.0);  // deliberately overlapping
    const Timetable tt = build_timetable(vs, 2, to_ns(100.0));
    CHECK(tt.offsets[0] == 0);
    CHECK(tt.offsets[1] == to_ns(1.0));
    // Overlap now exists: both vectors ON at t = 1.5 s.
    CHECK(tt.active_target(0, to_ns(1.5)).has_value());
    CHECK(tt.active_target(1, to_ns(1.5)).has_value());
}

TEST_CASE("format prints one row per first-cycle window plus C") {
    const std::vector<AttackVector> vs = {vec("V1", 5, 2)};
    const Timetable tt = build_timetable(vs, 2, to_ns(60.0));
    const std::string table = tt.format(vs, {"T1", "T2"});
    CHECK(table.find("V1\tT1\t0.000000\t5.000000") != std::string::npos);
    CHECK(table.find("V1\tT2\t7.000000\t12.000000") != std::string::npos);
    CHECK(table.find("C = 12.000000 s") != std::string::npos);
}
