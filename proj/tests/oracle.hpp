#pragma once

// Brute-force reference models used to derive expected values. They expand
// schedules into explicit tick timelines and never call into the library's
// coverage or latency code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using i64 = std::int64_t;
inline constexpr i64 kNever = std::numeric_limits<i64>::max();

inline i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

struct Win {
    i64 start;
    i64 len;
};

/// Listening bitmap of one period, plus window identity per tick so that
/// containment can tell adjacent windows apart.
struct Timeline {
    i64 period;
    std::vector<int> window_id;  // -1 when asleep

    Timeline(i64 T, const std::vector<Win>& windows) : period(T), window_id(static_cast<std::size_t>(T), -1) {
        for (std::size_t w = 0; w < windows.size(); ++w) {
            for (i64 t = windows[w].start; t < windows[w].start + windows[w].len; ++t) {
                window_id[static_cast<std::size_t>(mod(t, T))] = static_cast<int>(w);
            }
        }
    }

    [[nodiscard]] int at(i64 t) const { return window_id[static_cast<std::size_t>(mod(t, period))]; }
    [[nodiscard]] bool on(i64 t) const { return at(t) >= 0; }
};

enum class Mode { point, containment, overlap };

inline bool heard(const Timeline& tl, i64 start, i64 omega, Mode mode) {
    if (omega <= 0 || mode == Mode::point) return tl.on(start);
    if (mode == Mode::overlap) {
        for (i64 t = start; t < start + omega; ++t) {
            if (tl.on(t)) return true;
        }
        return false;
    }
    const int id = tl.at(start);
    if (id < 0) return false;
    for (i64 t = start; t < start + omega; ++t) {
        if (tl.at(t) != id) return false;
    }
    // Same id across a period boundary is a different occurrence unless the
    // window itself wraps, which valid schedules never do.
    return mod(start, tl.period) <= mod(start + omega - 1, tl.period);
}

/// Beacon k start relative to beacon 0, by explicit accumulation.
inline std::vector<i64> beacon_starts(const std::vector<i64>& gaps, std::size_t count) {
    std::vector<i64> out;
    i64 s = 0;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(s);
        s += gaps[k % gaps.size()];
    }
    return out;
}

/// Multiplicity of every offset phi in [0, T).
inline std::vector<int> coverage(const Timeline& tl, const std::vector<i64>& durations, const std::vector<i64>& gaps,
                                 std::size_t count, Mode mode = Mode::point) {
    std::vector<int> mult(static_cast<std::size_t>(tl.period), 0);
    const auto starts = beacon_starts(gaps, count);
    for (i64 phi = 0; phi < tl.period; ++phi) {
        for (std::size_t k = 0; k < count; ++k) {
            if (heard(tl, phi + starts[k], durations[k % durations.size()], mode)) ++mult[static_cast<std::size_t>(phi)];
        }
    }
    return mult;
}

/// Worst case over every (sender phase, listener phase) pair of the time from
/// contact (tick 0) to the end of the first heard beacon starting after 0.
/// Steps tick by tick through an explicit sender timeline.
inline i64 worst_latency(const Timeline& listener, const std::vector<i64>& durations, const std::vector<i64>& gaps,
                         i64 search, Mode mode = Mode::point) {
    i64 P = 0;
    for (i64 g : gaps) P += g;
    // Which beacon (if any) starts at each tick of the sender period.
    std::vector<int> starts_at(static_cast<std::size_t>(P), -1);
    i64 s = 0;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        starts_at[static_cast<std::size_t>(s)] = static_cast<int>(j);
        s += gaps[j];
    }
    i64 worst = 0;
    for (i64 a = 0; a < P; ++a) {
        for (i64 b = 0; b < listener.period; ++b) {
            i64 found = kNever;
            for (i64 t = 1; t <= search; ++t) {
                const int j = starts_at[static_cast<std::size_t>(mod(t + a, P))];
                if (j < 0) continue;
                const i64 w = durations[static_cast<std::size_t>(j)];
                if (heard(listener, t + b, w, mode)) {
                    found = t + w;
                    break;
                }
            }
            if (found == kNever) return kNever;
            worst = std::max(worst, found);
        }
    }
    return worst;
}

/// Correlated pair in point mode, evaluated on half ticks as doubles.
/// F's correlated beacon at phi = n + 1/2 on E's clock; both devices send at
/// `offsets` (device clock) and listen on `windows` of period T.
struct Pair {
    i64 T;
    std::vector<Win> windows;
    std::vector<i64> offsets;
    i64 correlated;  // anchor + zeta

    [[nodiscard]] bool listening(double t) const {
        double r = t - static_cast<double>(T) * std::floor(t / static_cast<double>(T));
        for (const auto& w : windows) {
            if (r >= static_cast<double>(w.start) && r < static_cast<double>(w.start + w.len)) return true;
        }
        return false;
    }

    /// F origin on E's clock.
    [[nodiscard]] double origin(i64 n) const { return static_cast<double>(n) + 0.5 - static_cast<double>(correlated); }

    [[nodiscard]] bool f_heard_by_e(i64 n, i64 z) const { return listening(origin(n) + static_cast<double>(z)); }
    [[nodiscard]] bool e_heard_by_f(i64 n, i64 z) const { return listening(static_cast<double>(z) - origin(n)); }

    /// 1 = F only, 2 = E only, 3 = both, 0 = none.
    [[nodiscard]] int cell(i64 n) const {
        int c = 0;
        for (i64 z : offsets) {
            if (f_heard_by_e(n, z)) c |= 1;
            if (e_heard_by_f(n, z)) c |= 2;
        }
        return c;
    }

    /// Earliest end (E clock, half-tick steps) of a direct discovery either way
    /// for a beacon starting strictly after `contact`.
    [[nodiscard]] double first_discovery(i64 n, double contact, i64 omega) const {
        for (double t = contact + 0.5; t < contact + 4.0 * static_cast<double>(T); t += 0.5) {
            for (i64 z : offsets) {
                const double fz = origin(n) + static_cast<double>(z);
                const double shift = fz - static_cast<double>(T) * std::floor(fz / static_cast<double>(T));
                const double tm = t - static_cast<double>(T) * std::floor(t / static_cast<double>(T));
                if (tm == shift && f_heard_by_e(n, z)) return t + static_cast<double>(omega);
                if (tm == static_cast<double>(z) && e_heard_by_f(n, z)) return t + static_cast<double>(omega);
            }
        }
        return -1.0;
    }
};

}  // namespace oracle
