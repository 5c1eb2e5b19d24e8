#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ndkit/coverage.hpp"
#include "ndkit/rng.hpp"
#include "ndkit/schedule.hpp"

namespace ndkit {

struct SimConfig {
    /// One spec per device, or a single spec replicated to every device.
    std::vector<ProtocolSpec> specs;
    std::int64_t devices{2};
    std::uint64_t trials{1};
    Tick horizon{0};
    std::uint64_t seed{0};
    /// The focus pair: `listener` (E) tries to hear beacons of `sender` (F).
    std::size_t listener{0};
    std::size_t sender{1};
    ReceptionPredicate predicate{ReceptionPredicate::point};
    /// Discovery later than this counts as a failure; 0 means the horizon.
    Tick latency_target{0};
    std::vector<double> quantiles{0.5, 0.9, 0.99};
    unsigned workers{1};
};

struct TrialRecord {
    std::uint64_t trial{0};
    std::vector<Tick> phases;
    bool discovered{false};
    Tick latency{kInfiniteTick};
    std::uint32_t focus_beacons{0};
    std::uint32_t collided_beacons{0};
    /// Sender beacons that would have been received in time but collided.
    std::uint32_t destroyed_hits{0};
};

struct SimResult {
    double empirical_collision_rate{0.0};
    double empirical_failure_rate{0.0};
    std::vector<std::pair<double, Tick>> latency_quantiles;
    double discovered_within_horizon{0.0};
    /// 1 - exp(-2 (S - 2) beta) with beta the sender's airtime fraction.
    double analytic_P_c{0.0};
    std::uint64_t focus_beacons{0};
    std::uint64_t collided_beacons{0};
    Tick latency_target{0};
    std::vector<TrialRecord> trials;
    /// Per-trial latencies ascending, kInfiniteTick for undiscovered trials.
    std::vector<Tick> sorted_latencies;

    /// Fraction of trials in which at least `q` in-time hits collided.
    [[nodiscard]] double fraction_with_destroyed_hits(std::uint32_t q) const;
};

struct DiscoveryEvent {
    /// End tick of the first received beacon.
    Tick time{0};
    /// Index of that beacon within B' (0 is the first beacon after contact).
    std::size_t beacon{0};
    Tick phase{0};

    friend bool operator==(const DiscoveryEvent&, const DiscoveryEvent&) = default;
};

/// The sender's first beacon of B' starts `phase` ticks after the listener's
/// origin; returns the first beacon the listener receives before `horizon`.
std::optional<DiscoveryEvent> simulate_pairwise(const ProtocolSpec& listener, const ProtocolSpec& sender, Tick phase,
                                                Tick horizon,
                                                ReceptionPredicate predicate = ReceptionPredicate::point);

/// Same with phase drawn uniformly from [0, T_C) of the listener.
std::optional<DiscoveryEvent> simulate_pairwise(const ProtocolSpec& listener, const ProtocolSpec& sender,
                                                SplitMix64& rng, Tick horizon,
                                                ReceptionPredicate predicate = ReceptionPredicate::point);

/// Monte Carlo over independent uniform device phases. Every device starts
/// at a phase drawn uniformly from its own hyperperiod lcm(beacon period, T_C);
/// contact is at tick 0 and only sender beacons starting after it count.
/// A focus-pair beacon is destroyed when it overlaps any transmission of a
/// third device. Results depend only on the config, not on `workers`.
SimResult simulate_network(const SimConfig& config);

/// Nearest-rank quantile over all trials, failed trials counting as
/// kInfiniteTick. Accepts q in (0, 1].
Tick latency_quantile(const SimResult& result, double q);

}  // namespace ndkit
