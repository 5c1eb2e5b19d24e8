#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ndkit/schedule.hpp"

namespace ndkit {

/// When a beacon occupying [t, t + w) counts as received by a window [s, e).
///   point        s <= t < e
///   containment  [t, t + w) inside [s, e)
///   overlap      [t, t + w) intersects [s, e)
/// Zero-length beacons are treated as points in every mode, which keeps
/// containment <= point <= overlap.
enum class ReceptionPredicate { point, containment, overlap };

std::string_view to_string(ReceptionPredicate p);
ReceptionPredicate parse_predicate(std::string_view text);

bool beacon_hits(Tick start, Tick omega, Tick window_start, Tick window_end, ReceptionPredicate p) noexcept;

/// Absolute-time view of a reception schedule. Periodic schedules are
/// evaluated arithmetically; aperiodic ones are materialised up to `horizon`.
class Listener {
public:
    explicit Listener(const ReceptionSchedule& reception, Tick horizon = 0);

    [[nodiscard]] bool receives(Tick start, Tick omega, ReceptionPredicate p) const;
    /// Earliest tau >= t such that a beacon starting at tau is received, or
    /// kInfiniteTick if none exists within `limit` ticks after t.
    [[nodiscard]] Tick next_reception_start(Tick t, Tick omega, ReceptionPredicate p, Tick limit) const;
    [[nodiscard]] bool periodic() const noexcept { return periodic_; }
    [[nodiscard]] Tick period() const noexcept { return period_; }
    [[nodiscard]] const std::vector<Window>& windows() const noexcept { return windows_; }

private:
    bool periodic_;
    Tick period_{0};
    Tick horizon_{0};
    std::vector<Window> windows_;
};

struct TickRange {
    Tick begin{0};
    Tick end{0};
    friend bool operator==(const TickRange&, const TickRange&) = default;
};

/// Multiplicity with which each initial offset Phi (start of the first beacon
/// of B' relative to the listener origin) is covered by an M-beacon sequence.
struct CoverageMap {
    bool periodic{true};
    Tick domain{0};
    std::vector<std::uint32_t> multiplicity;
    /// Number of offsets with multiplicity >= 1.
    Tick total_covered{0};
    /// Offsets covered by beacon k, ascending.
    std::vector<std::vector<Tick>> per_beacon_sets;
};

CoverageMap coverage_map(const BeaconSchedule& beacons, const ReceptionSchedule& reception, std::size_t count,
                         ReceptionPredicate predicate = ReceptionPredicate::point, Tick horizon = 0);

struct DeterminismVerdict {
    bool deterministic{false};
    std::vector<TickRange> uncovered;
};

DeterminismVerdict check_deterministic(const CoverageMap& map);
bool check_disjoint(const CoverageMap& map);

/// ceil(1 / gamma) in exact arithmetic.
std::int64_t min_beacons(const Rational& gamma);

/// Outcome of the exhaustive contact-phase sweep.
///
/// Contact happens at tick 0 with the sender at position `sender_phase` of its
/// period and the listener at position `listener_phase` of its own. Only
/// beacons starting strictly after the contact tick count, which makes the
/// integer sweep hit the continuous supremum. Latency runs to the end of the
/// first received beacon.
struct WorstCaseLatency {
    bool deterministic{false};
    Tick worst{kInfiniteTick};
    /// Phase pair of the worst case, or of the first undiscovered phase.
    Tick sender_phase{0};
    Tick listener_phase{0};
    Tick search_bound{0};
    std::uint64_t phases_checked{0};
};

/// Sweeps every (sender phase, listener phase) pair at 1-tick resolution.
/// Periodic listeners search lcm(sender period, T_C) + T_C ticks per phase.
/// Aperiodic listeners need `horizon`; contact ticks then cover
/// [0, horizon / 2) and each searches horizon / 2 ticks.
/// A `resolution` above 1 samples every resolution-th phase of each device
/// and gives no guarantee.
WorstCaseLatency worst_case_latency(const ProtocolSpec& sender, const ProtocolSpec& listener,
                                    ReceptionPredicate predicate = ReceptionPredicate::point, Tick horizon = 0,
                                    unsigned workers = 1, Tick resolution = 1);

struct AperiodicCoverageReport {
    bool covered{false};
    std::int64_t beacons{0};
    Tick horizon{0};
    Tick slack{0};
    Tick contacts_checked{0};
    std::size_t windows_in_horizon{0};
    Rational declared_gamma;
    /// Listening time inside [0, horizon) over horizon.
    Rational running_gamma;
    std::vector<TickRange> uncovered;
};

/// Checks that every offset in [0, horizon - slack) is covered by the first
/// `count` beacons, slack being the span of those beacons. Periodic schedules
/// are wrapped as generators. The horizon must contain at least 100 windows.
AperiodicCoverageReport aperiodic_coverage_check(const BeaconSchedule& beacons, const ReceptionSchedule& reception,
                                                 Tick horizon, std::size_t count,
                                                 ReceptionPredicate predicate = ReceptionPredicate::point);

/// "tick,multiplicity" rows preceded by '#' lines carrying gamma, M and Lambda.
void write_coverage_csv(std::ostream& os, const CoverageMap& map, const Rational& gamma);

}  // namespace ndkit
