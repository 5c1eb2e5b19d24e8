#pragma once

#include <vector>

#include "ndkit/schedule.hpp"

namespace fixtures {

inline ndkit::ProtocolSpec spec(std::vector<ndkit::Tick> durations, std::vector<ndkit::Tick> gaps, ndkit::Tick period,
                                std::vector<ndkit::Window> windows, ndkit::RadioOverheads overheads = {}) {
    ndkit::ProtocolSpec s;
    s.name = "fixture";
    s.beacons.durations = std::move(durations);
    s.beacons.gaps = std::move(gaps);
    s.reception = ndkit::ReceptionSchedule::make_periodic(period, std::move(windows));
    s.overheads = overheads;
    return s;
}

/// Point beacons every 2 ticks against a (0,2) window in T_C = 10.
inline ndkit::ProtocolSpec tiling() { return spec({0}, {2}, 10, {{0, 2}}); }

/// Equal-gap single-window schedule with gamma = 1/k: window of d ticks in
/// T_C = k d, one beacon of omega ticks every d ticks.
inline ndkit::ProtocolSpec optimal(ndkit::Tick k, ndkit::Tick d = 20, ndkit::Tick omega = 1) {
    return spec({omega}, {d}, k * d, {{0, d}});
}

}  // namespace fixtures
