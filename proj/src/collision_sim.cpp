#include "ndkit/collision_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ndkit/bounds.hpp"
#include "ndkit/errors.hpp"
#include "ndkit/parallel.hpp"

namespace ndkit {

namespace {

struct Interval {
    Tick start;
    Tick end;
};

struct Device {
    const ProtocolSpec* spec;
    Listener listener;
    Tick hyperperiod;
};

/// Global-time transmissions of a device at `phase` that intersect [lo, hi).
void transmissions(const BeaconSchedule& b, Tick phase, Tick lo, Tick hi, std::vector<Interval>& out) {
    const Tick period = b.period();
    const Tick local_lo = lo + phase - b.max_duration();
    const Tick local_hi = hi + phase;
    for (Tick base = floor_div(local_lo - b.offset, period) * period; base + b.offset < local_hi; base += period) {
        Tick s = base + b.offset;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Tick start = s - phase;
            const Tick end = start + b.durations[j];
            if (start < hi && (end > lo || (start >= lo && b.durations[j] == 0))) out.push_back({start, end});
            s += b.gaps[j];
        }
    }
}

bool collides(const Interval& beacon, const std::vector<Interval>& others, Tick max_len) {
    if (beacon.end <= beacon.start) return false;
    auto it = std::lower_bound(others.begin(), others.end(), beacon.end,
                               [](const Interval& iv, Tick v) { return iv.start < v; });
    while (it != others.begin()) {
        --it;
        if (it->start + max_len <= beacon.start) break;
        if (it->end > beacon.start && it->start < beacon.end) return true;
    }
    return false;
}

void require_runnable(const ProtocolSpec& spec) {
    if (!spec.beacons.periodic || spec.beacons.durations.empty() || spec.beacons.period() <= 0) {
        throw DomainError("spec '" + spec.name + "' needs a periodic beacon schedule");
    }
    if (!spec.reception.is_periodic()) {
        throw DomainError("spec '" + spec.name + "' needs a periodic reception schedule for network simulation");
    }
}

}  // namespace

double SimResult::fraction_with_destroyed_hits(std::uint32_t q) const {
    if (trials.empty()) return 0.0;
    const auto n = std::count_if(trials.begin(), trials.end(),
                                 [q](const TrialRecord& t) { return t.destroyed_hits >= q; });
    return static_cast<double>(n) / static_cast<double>(trials.size());
}

std::optional<DiscoveryEvent> simulate_pairwise(const ProtocolSpec& listener_spec, const ProtocolSpec& sender,
                                                Tick phase, Tick horizon, ReceptionPredicate predicate) {
    const auto& reception = listener_spec.reception;
    if (reception.is_periodic() && horizon < reception.period) {
        throw DomainError("horizon shorter than one listener period");
    }
    const auto& b = sender.beacons;
    if (b.durations.empty() || b.gaps.size() != b.durations.size()) {
        throw DomainError("beacon schedule needs equally many durations and gaps");
    }
    const Listener listener(reception, horizon + b.max_duration() + 1);
    for (std::size_t k = 0; b.periodic || k < b.size(); ++k) {
        const Tick start = phase + b.start_of(k);
        if (start >= horizon) break;
        if (listener.receives(start, b.duration_of(k), predicate)) {
            return DiscoveryEvent{start + b.duration_of(k), k, phase};
        }
    }
    return std::nullopt;
}

std::optional<DiscoveryEvent> simulate_pairwise(const ProtocolSpec& listener, const ProtocolSpec& sender,
                                                SplitMix64& rng, Tick horizon, ReceptionPredicate predicate) {
    if (!listener.reception.is_periodic()) throw DomainError("random phase needs a periodic listener");
    const auto phase = static_cast<Tick>(rng.below(static_cast<std::uint64_t>(listener.reception.period)));
    return simulate_pairwise(listener, sender, phase, horizon, predicate);
}

SimResult simulate_network(const SimConfig& config) {
    if (config.devices < 2) throw DomainError("simulation needs at least two devices");
    if (config.trials < 1) throw DomainError("simulation needs at least one trial");
    if (config.specs.size() != 1 && config.specs.size() != static_cast<std::size_t>(config.devices)) {
        throw DomainError("give one spec or one per device");
    }
    const auto S = static_cast<std::size_t>(config.devices);
    if (config.listener >= S || config.sender >= S || config.listener == config.sender) {
        throw DomainError("focus pair must name two distinct devices");
    }

    std::vector<Device> devices;
    devices.reserve(S);
    for (std::size_t i = 0; i < S; ++i) {
        const auto& spec = config.specs.size() == 1 ? config.specs[0] : config.specs[i];
        require_runnable(spec);
        devices.push_back({&spec, Listener(spec.reception), std::lcm(spec.beacons.period(), spec.reception.period)});
    }
    const auto& E = devices[config.listener];
    const auto& F = devices[config.sender];
    const Tick pair_hyper = std::lcm(E.hyperperiod, F.hyperperiod);
    if (config.horizon < pair_hyper) {
        throw DomainError("horizon " + std::to_string(config.horizon) + " is shorter than the focus-pair hyperperiod " +
                          std::to_string(pair_hyper));
    }
    const Tick target = config.latency_target > 0 ? config.latency_target : config.horizon;
    Tick max_len = 0;
    for (const auto& d : devices) max_len = std::max(max_len, d.spec->beacons.max_duration());

    SimResult result;
    result.latency_target = target;
    result.trials.resize(config.trials);

    parallel_for(static_cast<std::size_t>(config.trials), config.workers, [&](std::size_t idx) {
        auto rng = SplitMix64::stream(config.seed, idx);
        TrialRecord rec;
        rec.trial = idx;
        rec.phases.resize(S);
        for (std::size_t i = 0; i < S; ++i) {
            rec.phases[i] = static_cast<Tick>(rng.below(static_cast<std::uint64_t>(devices[i].hyperperiod)));
        }

        std::vector<Interval> others;
        for (std::size_t i = 0; i < S; ++i) {
            if (i == config.listener || i == config.sender) continue;
            transmissions(devices[i].spec->beacons, rec.phases[i], -max_len, config.horizon + max_len, others);
        }
        std::sort(others.begin(), others.end(), [](const Interval& a, const Interval& b) {
            return a.start < b.start || (a.start == b.start && a.end < b.end);
        });

        std::vector<Interval> own;
        transmissions(E.spec->beacons, rec.phases[config.listener], 0, config.horizon, own);
        for (const auto& iv : own) {
            if (iv.start < 0) continue;
            ++rec.focus_beacons;
            if (collides(iv, others, max_len)) ++rec.collided_beacons;
        }

        std::vector<Interval> sent;
        transmissions(F.spec->beacons, rec.phases[config.sender], 0, config.horizon, sent);
        std::sort(sent.begin(), sent.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
        const Tick e_phase = rec.phases[config.listener];
        for (const auto& iv : sent) {
            if (iv.start < 0) continue;
            ++rec.focus_beacons;
            const bool destroyed = collides(iv, others, max_len);
            if (destroyed) ++rec.collided_beacons;
            if (rec.discovered || iv.start <= 0) continue;
            const Tick omega = iv.end - iv.start;
            if (!E.listener.receives(iv.start + e_phase, omega, config.predicate)) continue;
            if (destroyed) {
                if (iv.end <= target) ++rec.destroyed_hits;
                continue;
            }
            rec.discovered = true;
            rec.latency = iv.end;
        }
        result.trials[idx] = std::move(rec);
    });

    std::uint64_t discovered = 0;
    std::uint64_t failed = 0;
    result.sorted_latencies.reserve(result.trials.size());
    for (const auto& t : result.trials) {
        result.focus_beacons += t.focus_beacons;
        result.collided_beacons += t.collided_beacons;
        if (t.discovered) ++discovered;
        if (!t.discovered || t.latency > target) ++failed;
        result.sorted_latencies.push_back(t.latency);
    }
    std::sort(result.sorted_latencies.begin(), result.sorted_latencies.end());
    const auto n = static_cast<double>(result.trials.size());
    result.empirical_collision_rate =
        result.focus_beacons == 0 ? 0.0
                                  : static_cast<double>(result.collided_beacons) / static_cast<double>(result.focus_beacons);
    result.empirical_failure_rate = static_cast<double>(failed) / n;
    result.discovered_within_horizon = static_cast<double>(discovered) / n;
    result.analytic_P_c = collision_probability(period_duty_cycle(F.spec->beacons).to_double(), config.devices);
    for (double q : config.quantiles) result.latency_quantiles.emplace_back(q, latency_quantile(result, q));
    return result;
}

Tick latency_quantile(const SimResult& result, double q) {
    if (!(q > 0.0) || q > 1.0) throw DomainError("quantile must lie in (0, 1]");
    const auto& v = result.sorted_latencies;
    if (v.empty()) throw DomainError("result holds no trial latencies");
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

}  // namespace ndkit
