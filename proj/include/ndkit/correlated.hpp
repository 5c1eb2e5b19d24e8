#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ndkit/coverage.hpp"
#include "ndkit/schedule.hpp"

namespace ndkit {

/// Two devices E and F sharing one periodic reception template, each sending
/// its beacons at fixed offsets from its own windows. The correlated beacon
/// sits zeta ticks after the start of the first window of every period.
///
/// Offsets are measured on the period circle [0, T_C). Coverage is evaluated
/// per offset cell [n, n + 1) at its midpoint: with integer instants the mirror
/// map has fixed points that would be counted by both devices.
struct CorrelatedQuadruple {
    ReceptionSchedule reception;
    Tick zeta{0};
    Tick omega{0};
    /// Beacon start offsets inside the device period, ascending.
    std::vector<Tick> beacon_offsets;
    ReceptionPredicate predicate{ReceptionPredicate::point};

    [[nodiscard]] Tick period() const noexcept { return reception.period; }
    /// Start of the first window of a period; zeta is measured from here.
    [[nodiscard]] Tick anchor() const;
    /// The plan as a beacon schedule (one beacon per offset, period T_C).
    [[nodiscard]] BeaconSchedule beacons() const;
    /// Airtime fraction of the plan: beacons * omega / T_C.
    [[nodiscard]] Rational beta() const;
};

/// (2 zeta - phi) mod T_C: the offset of E's correlated beacon on F's clock
/// when F's correlated beacon sits at phi on E's clock.
Tick mirror_offset(Tick zeta, Tick phi, Tick period);

/// Greedy half-coverage plan: candidates are the tiling translations
/// zeta + k * d_min of the correlated beacon, the correlated beacon itself is
/// always kept, candidates whose own and mirrored coverage are both fresh go
/// first, then any candidate still adding coverage. Throws ConstructionError
/// when the result does not cover the period with ceil(M / 2) beacons.
CorrelatedQuadruple build_correlated_quadruple(const ReceptionSchedule& reception, Tick zeta,
                                               ReceptionPredicate predicate = ReceptionPredicate::point,
                                               Tick omega = 0);

/// Every tiling translation kept: the uncorrelated plan with M beacons.
CorrelatedQuadruple direct_quadruple(const ReceptionSchedule& reception, Tick zeta,
                                     ReceptionPredicate predicate = ReceptionPredicate::point, Tick omega = 0);

/// All zeta in [0, T_C) for which build_correlated_quadruple succeeds.
std::vector<Tick> feasible_zetas(const ReceptionSchedule& reception,
                                 ReceptionPredicate predicate = ReceptionPredicate::point, Tick omega = 0);

enum CellCover : std::uint8_t { kNone = 0, kByF = 1, kByE = 2, kByBoth = 3 };

struct MutualExclusiveVerdict {
    bool covered{false};
    std::vector<TickRange> uncovered;
    std::size_t beacons_per_device{0};
    bool disjoint{false};
    /// |Omega_F|, |Omega_E| and their intersection, in ticks.
    Tick covered_by_f{0};
    Tick covered_by_e{0};
    Tick covered_by_both{0};
    std::vector<std::uint8_t> cells;
};

MutualExclusiveVerdict verify_mutual_exclusive(const CorrelatedQuadruple& quad);

/// Worst case over all offsets and contact ticks of the earlier of the two
/// one-way discoveries, rounded up to whole ticks.
Tick one_way_latency_correlated(const CorrelatedQuadruple& quad);

enum class Direction { f_to_e, e_to_f, simultaneous };

struct AssistOutcome {
    Direction first{Direction::simultaneous};
    /// Ticks after contact; may fall on half ticks.
    Rational one_way;
    Rational two_way;
    [[nodiscard]] Rational penalty() const { return two_way - one_way; }
};

/// Contact at `contact` on E's clock with F's correlated beacon in offset cell
/// `phi`. After the first one-way discovery the discoverer sends one extra
/// beacon at the peer's announced next listening instant; the reverse
/// direction completes at whichever comes first, that beacon or a regular one.
AssistOutcome simulate_mutual_assistance(const CorrelatedQuadruple& quad, Tick phi, Tick contact = 0);

/// "tick,covered_by" rows with F, E, both or none.
void write_coverage_union_csv(std::ostream& os, const MutualExclusiveVerdict& verdict);

}  // namespace ndkit
