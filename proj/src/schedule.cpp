#include "ndkit/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ndkit/errors.hpp"
#include "ndkit/rng.hpp"

namespace ndkit {

Tick BeaconSchedule::period() const {
    return std::accumulate(gaps.begin(), gaps.end(), Tick{0});
}

Tick BeaconSchedule::start_of(std::size_t k) const {
    const std::size_t m = gaps.size();
    if (m == 0) return 0;
    const Tick full = static_cast<Tick>(k / m) * period();
    Tick partial = 0;
    for (std::size_t i = 0; i < k % m; ++i) partial += gaps[i];
    return full + partial;
}

Tick BeaconSchedule::max_duration() const {
    return durations.empty() ? 0 : *std::max_element(durations.begin(), durations.end());
}

WindowGenerator make_generator(const std::string& preset, Rational gamma, std::uint64_t seed) {
    if (gamma <= Rational{0} || gamma > Rational{1}) {
        throw DomainError("generator gamma must lie in (0, 1], got " + gamma.str());
    }
    const Tick p = gamma.num();
    const Tick q = gamma.den();
    WindowGenerator gen{preset, gamma, seed, {}};
    if (preset == "uniform") {
        gen.at = [p, q](std::int64_t k) { return Window{k * q, p}; };
    } else if (preset == "alternating") {
        if (2 * p > q) {
            throw DomainError("alternating preset needs gamma <= 1/2, got " + gamma.str());
        }
        gen.at = [p, q](std::int64_t k) {
            const Tick slot = 2 * q * k;
            return (k % 2 == 0) ? Window{slot, p} : Window{slot + p, 3 * p};
        };
    } else if (preset == "jitter") {
        gen.at = [p, q, seed](std::int64_t k) {
            const auto span = static_cast<std::uint64_t>(q - p + 1);
            const auto shift = static_cast<Tick>(SplitMix64::stream(seed, static_cast<std::uint64_t>(k)).next() % span);
            return Window{k * q + shift, p};
        };
    } else {
        throw DomainError("unknown generator preset '" + preset + "'");
    }
    return gen;
}

ReceptionSchedule ReceptionSchedule::make_periodic(Tick period, std::vector<Window> windows) {
    ReceptionSchedule r;
    r.kind = Kind::periodic;
    r.period = period;
    r.windows = std::move(windows);
    return r;
}

ReceptionSchedule ReceptionSchedule::make_aperiodic(WindowGenerator generator) {
    ReceptionSchedule r;
    r.kind = Kind::aperiodic;
    r.generator = std::move(generator);
    return r;
}

Tick ReceptionSchedule::total_window_time() const {
    Tick sum = 0;
    for (const auto& w : windows) sum += w.duration;
    return sum;
}

std::vector<Window> ReceptionSchedule::sorted_windows() const {
    auto out = windows;
    std::sort(out.begin(), out.end(), [](const Window& a, const Window& b) { return a.offset < b.offset; });
    return out;
}

WindowGenerator wrap_periodic(const ReceptionSchedule& reception) {
    if (!reception.is_periodic() || reception.period <= 0 || reception.windows.empty()) {
        throw DomainError("only a non-empty periodic schedule can be wrapped as a generator");
    }
    auto sorted = reception.sorted_windows();
    const Tick period = reception.period;
    std::ostringstream name;
    name << "periodic(T=" << period;
    for (const auto& w : sorted) name << ",(" << w.offset << "," << w.duration << ")";
    name << ")";
    WindowGenerator gen{name.str(), reception_duty_cycle(reception), 0, {}};
    gen.at = [sorted, period](std::int64_t k) {
        const auto n = static_cast<std::int64_t>(sorted.size());
        const auto& w = sorted[static_cast<std::size_t>(k % n)];
        return Window{(k / n) * period + w.offset, w.duration};
    };
    return gen;
}

Rational transmit_duty_cycle(const BeaconSchedule& beacons, const RadioOverheads& overheads) {
    if (!beacons.periodic) {
        throw DomainError("transmit duty cycle is undefined for a finite beacon sequence");
    }
    if (beacons.durations.empty() || beacons.durations.size() != beacons.gaps.size()) {
        throw DomainError("beacon schedule needs equally many durations and gaps");
    }
    Rational beta{0};
    for (std::size_t i = 0; i < beacons.size(); ++i) {
        if (beacons.gaps[i] <= 0) {
            throw DomainError("gap " + std::to_string(i) + " is zero");
        }
        beta += Rational(beacons.durations[i] + overheads.tx, beacons.gaps[i]);
    }
    return beta;
}

Rational period_duty_cycle(const BeaconSchedule& beacons) {
    const Tick period = beacons.period();
    if (!beacons.periodic || period <= 0) {
        throw DomainError("period duty cycle needs a periodic schedule with positive period");
    }
    Tick busy = 0;
    for (Tick d : beacons.durations) busy += d;
    return Rational(busy, period);
}

Rational reception_duty_cycle(const ReceptionSchedule& reception, const RadioOverheads& overheads) {
    if (!reception.is_periodic()) {
        if (overheads.rx != 0) {
            throw DomainError("rx overhead on an aperiodic schedule has no defined window count");
        }
        return reception.generator.gamma;
    }
    if (reception.period <= 0) {
        throw DomainError("reception period must be positive");
    }
    const Tick n = static_cast<Tick>(reception.windows.size());
    return Rational(reception.total_window_time() + n * overheads.rx, reception.period);
}

Rational combined_duty_cycle(const Rational& beta, const Rational& gamma, const Rational& alpha) {
    if (alpha <= Rational{0}) throw DomainError("alpha must be positive");
    if (beta < Rational{0} || beta > Rational{1} || gamma < Rational{0} || gamma > Rational{1}) {
        throw DomainError("duty cycles must lie in [0, 1]");
    }
    return alpha * beta + gamma;
}

DutyCycleReport duty_cycles(const ProtocolSpec& spec, const Rational& alpha) {
    DutyCycleReport r;
    r.alpha = alpha;
    r.beta = transmit_duty_cycle(spec.beacons, spec.overheads);
    r.gamma = reception_duty_cycle(spec.reception, spec.overheads);
    r.eta = alpha * r.beta + r.gamma;
    return r;
}

ProtocolSpec lpl_dualize(const ProtocolSpec& spec) {
    if (!spec.reception.is_periodic()) {
        throw DomainError("cannot dualize an aperiodic reception schedule");
    }
    if (!spec.beacons.periodic) {
        throw DomainError("cannot dualize a finite beacon sequence");
    }
    if (auto problems = validate_schedule(spec); !problems.empty()) {
        throw DomainError("cannot dualize an invalid spec: " + problems.front());
    }
    const auto& b = spec.beacons;
    const Tick last = static_cast<Tick>(b.size()) - 1;
    if (b.offset + b.start_of(static_cast<std::size_t>(last)) + b.durations.back() > b.period()) {
        throw DomainError("beacon train wraps past its period; shift the offset before dualizing");
    }

    ProtocolSpec dual;
    dual.name = spec.name;
    dual.tick_us = spec.tick_us;
    dual.overheads = {spec.overheads.rx, spec.overheads.tx, spec.overheads.rx_tx, spec.overheads.tx_rx};

    std::vector<Window> windows;
    windows.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        windows.push_back({b.offset + b.start_of(i), b.durations[i]});
    }
    dual.reception = ReceptionSchedule::make_periodic(b.period(), std::move(windows));

    auto sorted = spec.reception.sorted_windows();
    dual.beacons.periodic = true;
    dual.beacons.offset = sorted.front().offset;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const Tick next = (i + 1 < sorted.size()) ? sorted[i + 1].offset : sorted.front().offset + spec.reception.period;
        dual.beacons.durations.push_back(sorted[i].duration);
        dual.beacons.gaps.push_back(next - sorted[i].offset);
    }
    return dual;
}

std::vector<std::string> validate_schedule(const ProtocolSpec& spec) {
    std::vector<std::string> out;
    const auto idx = [](std::size_t i) { return std::to_string(i); };

    if (spec.tick_us <= Rational{0}) out.push_back("tick_us must be positive");

    const auto& b = spec.beacons;
    if (b.durations.empty()) out.push_back("beacon schedule is empty");
    if (b.durations.size() != b.gaps.size()) out.push_back("beacon durations and gaps differ in length");
    if (b.offset < 0) out.push_back("beacon offset is negative");
    for (std::size_t i = 0; i < std::min(b.durations.size(), b.gaps.size()); ++i) {
        if (b.durations[i] < 0) out.push_back("beacon " + idx(i) + " has negative duration");
        if (b.gaps[i] <= 0) out.push_back("gap " + idx(i) + " is not positive");
        if (b.gaps[i] < b.durations[i]) out.push_back("gap " + idx(i) + " shorter than beacon " + idx(i));
    }

    const auto& r = spec.reception;
    if (r.is_periodic()) {
        if (r.period <= 0) out.push_back("reception period is not positive");
        if (r.windows.empty()) out.push_back("reception schedule has no windows");
        for (std::size_t i = 0; i < r.windows.size(); ++i) {
            const auto& w = r.windows[i];
            if (w.offset < 0 || w.duration < 0) {
                out.push_back("window " + idx(i) + " has negative offset or duration");
            } else if (r.period > 0 && w.end() > r.period) {
                out.push_back("window " + idx(i) + " exceeds period");
            }
        }
        for (std::size_t i = 0; i < r.windows.size(); ++i) {
            for (std::size_t j = i + 1; j < r.windows.size(); ++j) {
                const auto& a = r.windows[i];
                const auto& c = r.windows[j];
                if (a.offset < c.end() && c.offset < a.end()) {
                    out.push_back("windows " + idx(i) + " and " + idx(j) + " overlap");
                }
            }
        }
    } else {
        const auto& g = r.generator;
        if (!g.at) out.push_back("aperiodic reception has no generator");
        if (g.gamma <= Rational{0} || g.gamma > Rational{1}) out.push_back("declared gamma outside (0, 1]");
        if (g.at) {
            // Spot-check monotonicity and disjointness on a prefix.
            Window prev = g.at(0);
            for (std::int64_t k = 1; k < 256; ++k) {
                Window w = g.at(k);
                if (w.offset < prev.end() || w.offset <= prev.offset) {
                    out.push_back("generator windows " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                  " are not increasing and disjoint");
                    break;
                }
                prev = w;
            }
        }
    }

    const auto& o = spec.overheads;
    if (o.tx < 0) out.push_back("overhead tx is negative");
    if (o.rx < 0) out.push_back("overhead rx is negative");
    if (o.tx_rx < 0) out.push_back("overhead tx_rx is negative");
    if (o.rx_tx < 0) out.push_back("overhead rx_tx is negative");
    return out;
}

}  // namespace ndkit
