#include "ndkit/coverage.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>

#include "ndkit/errors.hpp"
#include "ndkit/parallel.hpp"

namespace ndkit {

std::string_view to_string(ReceptionPredicate p) {
    switch (p) {
        case ReceptionPredicate::point: return "point";
        case ReceptionPredicate::containment: return "containment";
        case ReceptionPredicate::overlap: return "overlap";
    }
    return "point";
}

ReceptionPredicate parse_predicate(std::string_view text) {
    if (text == "point") return ReceptionPredicate::point;
    if (text == "containment") return ReceptionPredicate::containment;
    if (text == "overlap") return ReceptionPredicate::overlap;
    throw DomainError("unknown reception predicate '" + std::string(text) + "'");
}

bool beacon_hits(Tick start, Tick omega, Tick window_start, Tick window_end, ReceptionPredicate p) noexcept {
    const bool point = window_start <= start && start < window_end;
    if (omega <= 0) return point;
    switch (p) {
        case ReceptionPredicate::point: return point;
        case ReceptionPredicate::containment: return point && start + omega <= window_end;
        case ReceptionPredicate::overlap: return start < window_end && start + omega > window_start;
    }
    return point;
}

Listener::Listener(const ReceptionSchedule& reception, Tick horizon)
    : periodic_(reception.is_periodic()), horizon_(horizon) {
    if (periodic_) {
        if (reception.period <= 0) throw DomainError("reception period must be positive");
        period_ = reception.period;
        windows_ = reception.sorted_windows();
        return;
    }
    if (horizon <= 0) {
        throw DomainError("an aperiodic reception schedule needs a horizon");
    }
    if (!reception.generator.at) throw DomainError("aperiodic reception has no generator");
    constexpr std::int64_t kMaxWindows = 50'000'000;
    for (std::int64_t k = 0; k < kMaxWindows; ++k) {
        Window w = reception.generator.at(k);
        if (w.offset >= horizon) return;
        windows_.push_back(w);
    }
    throw DomainError("horizon holds more than 5e7 windows");
}

bool Listener::receives(Tick start, Tick omega, ReceptionPredicate p) const {
    const Tick reach = start + std::max<Tick>(omega, 1) - 1;
    if (periodic_) {
        const Tick first = floor_div(start, period_);
        const Tick last = floor_div(reach, period_);
        for (Tick n = first; n <= last; ++n) {
            const Tick base = n * period_;
            for (const auto& w : windows_) {
                if (beacon_hits(start, omega, base + w.offset, base + w.end(), p)) return true;
            }
        }
        return false;
    }
    // Windows are sorted and disjoint, so their ends are sorted too.
    auto it = std::upper_bound(windows_.begin(), windows_.end(), reach,
                               [](Tick v, const Window& w) { return v < w.offset; });
    while (it != windows_.begin()) {
        --it;
        if (it->end() <= start) break;
        if (beacon_hits(start, omega, it->offset, it->end(), p)) return true;
    }
    return false;
}

Tick Listener::next_reception_start(Tick t, Tick omega, ReceptionPredicate p, Tick limit) const {
    // Candidate start for each window occurrence, in time order.
    const auto candidate = [&](Tick s, Tick e) -> Tick {
        Tick tau = std::max(t, s);
        if (p == ReceptionPredicate::overlap && omega > 0) tau = std::max(t, s - omega + 1);
        return tau < e ? tau : kInfiniteTick;
    };
    const Tick stop = t + limit;
    if (periodic_) {
        for (Tick n = floor_div(t, period_); n * period_ <= stop; ++n) {
            for (const auto& w : windows_) {
                const Tick s = n * period_ + w.offset;
                const Tick tau = candidate(s, s + w.duration);
                if (tau != kInfiniteTick && tau <= stop && receives(tau, omega, p)) return tau;
            }
        }
        return kInfiniteTick;
    }
    for (const auto& w : windows_) {
        if (w.offset > stop) break;
        if (w.end() <= t) continue;
        const Tick tau = candidate(w.offset, w.end());
        if (tau != kInfiniteTick && tau <= stop && receives(tau, omega, p)) return tau;
    }
    return kInfiniteTick;
}

CoverageMap coverage_map(const BeaconSchedule& beacons, const ReceptionSchedule& reception, std::size_t count,
                         ReceptionPredicate predicate, Tick horizon) {
    if (count == 0) throw DomainError("coverage map needs at least one beacon");
    if (beacons.durations.empty() || beacons.gaps.size() != beacons.durations.size()) {
        throw DomainError("beacon schedule needs equally many durations and gaps");
    }
    if (!beacons.periodic && count > beacons.size()) {
        throw DomainError("finite beacon sequence has fewer than " + std::to_string(count) + " beacons");
    }
    CoverageMap map;
    map.periodic = reception.is_periodic();
    if (map.periodic) {
        map.domain = reception.period;
    } else {
        if (horizon <= 0) throw DomainError("an aperiodic coverage map needs a horizon");
        map.domain = horizon;
    }
    const Tick span = beacons.start_of(count - 1) + beacons.duration_of(count - 1) + 1;
    const Listener listener(reception, map.periodic ? 0 : horizon + span);

    map.multiplicity.assign(static_cast<std::size_t>(map.domain), 0);
    map.per_beacon_sets.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const Tick shift = beacons.start_of(k);
        const Tick omega = beacons.duration_of(k);
        auto& set = map.per_beacon_sets[k];
        for (Tick phi = 0; phi < map.domain; ++phi) {
            if (listener.receives(phi + shift, omega, predicate)) {
                set.push_back(phi);
                ++map.multiplicity[static_cast<std::size_t>(phi)];
            }
        }
    }
    map.total_covered = std::count_if(map.multiplicity.begin(), map.multiplicity.end(),
                                      [](std::uint32_t m) { return m > 0; });
    return map;
}

DeterminismVerdict check_deterministic(const CoverageMap& map) {
    DeterminismVerdict v;
    const auto n = static_cast<Tick>(map.multiplicity.size());
    for (Tick t = 0; t < n; ++t) {
        if (map.multiplicity[static_cast<std::size_t>(t)] != 0) continue;
        if (!v.uncovered.empty() && v.uncovered.back().end == t) {
            ++v.uncovered.back().end;
        } else {
            v.uncovered.push_back({t, t + 1});
        }
    }
    v.deterministic = v.uncovered.empty() && n > 0;
    if (n == 0) v.uncovered.push_back({0, map.domain});
    return v;
}

bool check_disjoint(const CoverageMap& map) {
    return std::all_of(map.multiplicity.begin(), map.multiplicity.end(), [](std::uint32_t m) { return m <= 1; });
}

std::int64_t min_beacons(const Rational& gamma) {
    if (gamma <= Rational{0} || gamma > Rational{1}) {
        throw DomainError("gamma must lie in (0, 1], got " + gamma.str());
    }
    return gamma.reciprocal().ceil();
}

namespace {

struct PhaseOutcome {
    bool deterministic{true};
    Tick worst{0};
    Tick listener_phase{0};
};

}  // namespace

WorstCaseLatency worst_case_latency(const ProtocolSpec& sender, const ProtocolSpec& listener_spec,
                                    ReceptionPredicate predicate, Tick horizon, unsigned workers, Tick resolution) {
    if (resolution < 1) throw DomainError("resolution must be at least one tick");
    const auto& beacons = sender.beacons;
    if (!beacons.periodic) throw DomainError("the sender must be periodic");
    const Tick sender_period = beacons.period();
    if (sender_period <= 0 || beacons.durations.empty()) throw DomainError("sender period must be positive");

    const auto& reception = listener_spec.reception;
    WorstCaseLatency out;
    Tick listener_phases = 0;
    std::optional<Listener> listener;
    if (reception.is_periodic()) {
        listener.emplace(reception);
        listener_phases = reception.period;
        out.search_bound = std::lcm(sender_period, reception.period) + reception.period;
    } else {
        if (horizon <= 0) throw DomainError("an aperiodic listener needs a horizon");
        listener_phases = horizon / 2;
        out.search_bound = horizon / 2;
        listener.emplace(reception, horizon + beacons.max_duration() + 1);
    }
    if (listener_phases <= 0) throw DomainError("horizon too short");

    const Tick sender_steps = (sender_period + resolution - 1) / resolution;
    const Tick listener_steps = (listener_phases + resolution - 1) / resolution;
    std::vector<PhaseOutcome> per_sender(static_cast<std::size_t>(sender_steps));
    parallel_for(per_sender.size(), workers, [&](std::size_t ai) {
        const Tick a = static_cast<Tick>(ai) * resolution;
        // Beacon starts relative to the contact tick, strictly after it.
        std::vector<std::pair<Tick, Tick>> train;
        Tick s = 0;
        for (std::size_t j = 0;; ++j) {
            if (s > a) {
                const Tick t = s - a;
                if (t > out.search_bound) break;
                train.emplace_back(t, beacons.duration_of(j));
            }
            s += beacons.gaps[j % beacons.size()];
        }
        PhaseOutcome result;
        for (Tick b = 0; b < listener_phases; b += resolution) {
            Tick latency = kInfiniteTick;
            for (const auto& [t, omega] : train) {
                if (listener->receives(t + b, omega, predicate)) {
                    latency = t + omega;
                    break;
                }
            }
            if (latency == kInfiniteTick) {
                result = {false, kInfiniteTick, b};
                break;
            }
            if (latency > result.worst) {
                result.worst = latency;
                result.listener_phase = b;
            }
        }
        per_sender[ai] = result;
    });

    out.phases_checked = static_cast<std::uint64_t>(sender_steps) * static_cast<std::uint64_t>(listener_steps);
    out.deterministic = true;
    out.worst = 0;
    for (Tick ai = 0; ai < sender_steps; ++ai) {
        const Tick a = ai * resolution;
        const auto& r = per_sender[static_cast<std::size_t>(ai)];
        if (!r.deterministic) {
            out.deterministic = false;
            out.worst = kInfiniteTick;
            out.sender_phase = a;
            out.listener_phase = r.listener_phase;
            return out;
        }
        if (r.worst > out.worst) {
            out.worst = r.worst;
            out.sender_phase = a;
            out.listener_phase = r.listener_phase;
        }
    }
    return out;
}

AperiodicCoverageReport aperiodic_coverage_check(const BeaconSchedule& beacons, const ReceptionSchedule& reception,
                                                 Tick horizon, std::size_t count, ReceptionPredicate predicate) {
    if (count == 0) throw DomainError("coverage check needs at least one beacon");
    if (beacons.durations.empty() || beacons.gaps.size() != beacons.durations.size()) {
        throw DomainError("beacon schedule needs equally many durations and gaps");
    }
    const ReceptionSchedule generated =
        reception.is_periodic() ? ReceptionSchedule::make_aperiodic(wrap_periodic(reception)) : reception;

    AperiodicCoverageReport rep;
    rep.beacons = static_cast<std::int64_t>(count);
    rep.horizon = horizon;
    rep.declared_gamma = generated.generator.gamma;
    rep.slack = beacons.start_of(count - 1) + beacons.duration_of(count - 1);

    const Listener listener(generated, horizon);
    rep.windows_in_horizon = listener.windows().size();
    if (rep.windows_in_horizon < 100) {
        throw DomainError("horizon " + std::to_string(horizon) + " holds only " +
                          std::to_string(rep.windows_in_horizon) + " windows; at least 100 are required");
    }
    if (horizon <= rep.slack) throw DomainError("horizon shorter than the beacon span");

    Tick listening = 0;
    for (const auto& w : listener.windows()) listening += std::min(w.end(), horizon) - w.offset;
    rep.running_gamma = Rational(listening, horizon);

    rep.contacts_checked = horizon - rep.slack;
    for (Tick phi = 0; phi < rep.contacts_checked; ++phi) {
        bool hit = false;
        for (std::size_t k = 0; k < count && !hit; ++k) {
            hit = listener.receives(phi + beacons.start_of(k), beacons.duration_of(k), predicate);
        }
        if (hit) continue;
        if (!rep.uncovered.empty() && rep.uncovered.back().end == phi) {
            ++rep.uncovered.back().end;
        } else {
            rep.uncovered.push_back({phi, phi + 1});
        }
    }
    rep.covered = rep.uncovered.empty();
    return rep;
}

void write_coverage_csv(std::ostream& os, const CoverageMap& map, const Rational& gamma) {
    os << "# gamma=" << gamma.str() << "\n";
    os << "# M=" << map.per_beacon_sets.size() << "\n";
    os << "# Lambda=" << map.total_covered << "\n";
    os << "# domain=" << map.domain << "\n";
    os << "tick,multiplicity\n";
    for (std::size_t t = 0; t < map.multiplicity.size(); ++t) {
        os << t << "," << map.multiplicity[t] << "\n";
    }
}

}  // namespace ndkit
