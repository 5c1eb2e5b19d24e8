#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ndkit/rational.hpp"

namespace ndkit {

/// Integer count of the base time unit (1 us unless a spec says otherwise).
/// Every time, duration and period in the toolkit is a Tick.
using Tick = std::int64_t;

inline constexpr Tick kInfiniteTick = std::numeric_limits<Tick>::max();

/// Floor division that behaves for negative numerators.
constexpr Tick floor_div(Tick a, Tick b) noexcept {
    Tick q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Mathematical modulo in [0, b).
constexpr Tick floor_mod(Tick a, Tick b) noexcept {
    Tick r = a % b;
    return r < 0 ? r + b : r;
}

/// Transmission pattern: beacon i lasts durations[i] ticks and the next beacon
/// starts gaps[i] ticks after beacon i starts. A periodic schedule repeats the
/// list forever with period sum(gaps).
struct BeaconSchedule {
    std::vector<Tick> durations;
    std::vector<Tick> gaps;
    bool periodic{true};
    /// Start of the first beacon inside the period. Only positions matter for
    /// the low-power-listening dual; every analysis is phase-swept anyway.
    Tick offset{0};

    [[nodiscard]] std::size_t size() const noexcept { return durations.size(); }
    /// Sum of gaps, i.e. the repetition period of a periodic schedule.
    [[nodiscard]] Tick period() const;
    /// Start of the k-th beacon relative to the first one, cycling through the
    /// gap list (sum of the first k gaps).
    [[nodiscard]] Tick start_of(std::size_t k) const;
    [[nodiscard]] Tick duration_of(std::size_t k) const { return durations[k % durations.size()]; }
    [[nodiscard]] Tick max_duration() const;

    friend bool operator==(const BeaconSchedule&, const BeaconSchedule&) = default;
};

struct Window {
    Tick offset{0};
    Tick duration{0};

    [[nodiscard]] Tick end() const noexcept { return offset + duration; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Named aperiodic window generator: k -> k-th window, strictly increasing and
/// non-overlapping. Two generators compare equal when preset, gamma and seed
/// agree; `at` is derived from those.
struct WindowGenerator {
    std::string preset;
    Rational gamma;
    std::uint64_t seed{0};
    std::function<Window(std::int64_t)> at;

    friend bool operator==(const WindowGenerator& a, const WindowGenerator& b) {
        return a.preset == b.preset && a.gamma == b.gamma && a.seed == b.seed;
    }
};

/// Built-in presets, all parameterised by the declared duty cycle p/q:
///   uniform      window of p ticks every q ticks
///   alternating  slots of 2q ticks holding windows of p and 3p ticks in turn,
///                the long one shifted by p inside its slot (p=1, q=4 gives
///                windows of 1 and 3 ticks every 8 ticks)
///   jitter       one p-tick window per q-tick slot at a pseudo-random
///                position derived from the seed; never repeats
WindowGenerator make_generator(const std::string& preset, Rational gamma, std::uint64_t seed = 0);

struct ReceptionSchedule {
    enum class Kind { periodic, aperiodic };

    Kind kind{Kind::periodic};
    Tick period{0};
    std::vector<Window> windows;
    WindowGenerator generator;

    static ReceptionSchedule make_periodic(Tick period, std::vector<Window> windows);
    static ReceptionSchedule make_aperiodic(WindowGenerator generator);

    [[nodiscard]] bool is_periodic() const noexcept { return kind == Kind::periodic; }
    [[nodiscard]] Tick total_window_time() const;
    /// Windows sorted by offset (periodic only).
    [[nodiscard]] std::vector<Window> sorted_windows() const;

    friend bool operator==(const ReceptionSchedule& a, const ReceptionSchedule& b) {
        if (a.kind != b.kind) return false;
        if (a.is_periodic()) return a.period == b.period && a.windows == b.windows;
        return a.generator == b.generator;
    }
};

/// Wraps a periodic schedule as a generator so the aperiodic code path can be
/// checked against the periodic one.
WindowGenerator wrap_periodic(const ReceptionSchedule& reception);

/// Effective extra active time spent switching the radio on and off.
/// tx_rx / rx_tx are carried through files but not used by any formula.
struct RadioOverheads {
    Tick tx{0};
    Tick rx{0};
    Tick tx_rx{0};
    Tick rx_tx{0};

    friend bool operator==(const RadioOverheads&, const RadioOverheads&) = default;
};

struct ProtocolSpec {
    std::string name;
    BeaconSchedule beacons;
    ReceptionSchedule reception;
    RadioOverheads overheads;
    /// Length of one tick in microseconds.
    Rational tick_us{1};

    friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

struct DutyCycleReport {
    Rational beta;
    Rational gamma;
    Rational eta;
    Rational alpha;
};

/// beta = sum_i (w_i + d_oTx) / lambda_i, evaluated term by term.
Rational transmit_duty_cycle(const BeaconSchedule& beacons, const RadioOverheads& overheads = {});

/// Fraction of the repetition period spent transmitting: sum(w_i) / sum(lambda_i).
/// Coincides with transmit_duty_cycle for single-beacon schedules.
Rational period_duty_cycle(const BeaconSchedule& beacons);

/// gamma = sum_i (d_i + d_oRx) / T_C. Aperiodic schedules return their
/// declared gamma and reject a non-zero rx overhead.
Rational reception_duty_cycle(const ReceptionSchedule& reception, const RadioOverheads& overheads = {});

/// eta = alpha * beta + gamma.
Rational combined_duty_cycle(const Rational& beta, const Rational& gamma, const Rational& alpha);

DutyCycleReport duty_cycles(const ProtocolSpec& spec, const Rational& alpha = Rational{1});

/// Low-power-listening duality: beacons become reception windows at their
/// absolute positions, windows become beacons, tx and rx overheads swap.
/// Applying it twice returns the input unchanged.
ProtocolSpec lpl_dualize(const ProtocolSpec& spec);

/// Human-readable invariant violations; empty when the spec is well formed.
std::vector<std::string> validate_schedule(const ProtocolSpec& spec);

}  // namespace ndkit
