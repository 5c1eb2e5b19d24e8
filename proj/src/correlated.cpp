#include "ndkit/correlated.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "ndkit/errors.hpp"

namespace ndkit {

namespace {

// Everything below runs in half ticks so that offset cells can be sampled at
// their midpoints while beacon and window edges stay integral.

ReceptionSchedule doubled(const ReceptionSchedule& r) {
    std::vector<Window> ws;
    ws.reserve(r.windows.size());
    for (const auto& w : r.windows) ws.push_back({2 * w.offset, 2 * w.duration});
    return ReceptionSchedule::make_periodic(2 * r.period, std::move(ws));
}

struct HalfTickModel {
    Listener listener;
    Tick period2;
    Tick correlated2;  // 2 * (anchor + zeta)
    Tick omega2;
    ReceptionPredicate predicate;

    explicit HalfTickModel(const CorrelatedQuadruple& q)
        : listener(doubled(q.reception)),
          period2(2 * q.period()),
          correlated2(2 * (q.anchor() + q.zeta)),
          omega2(2 * q.omega),
          predicate(q.predicate) {}

    /// F's origin on E's clock when F's correlated beacon is in cell n.
    [[nodiscard]] Tick f_origin(Tick cell) const { return 2 * cell + 1 - correlated2; }
    /// F beacon at plan offset z heard by E.
    [[nodiscard]] bool f_hits(Tick z, Tick origin) const { return listener.receives(origin + 2 * z, omega2, predicate); }
    /// E beacon at plan offset z heard by F.
    [[nodiscard]] bool e_hits(Tick z, Tick origin) const { return listener.receives(2 * z - origin, omega2, predicate); }
};

void validate_template(const ReceptionSchedule& r, Tick zeta, Tick omega) {
    if (!r.is_periodic()) throw DomainError("correlated schedules need a periodic reception template");
    if (r.period <= 0 || r.windows.empty()) throw DomainError("reception template needs a period and windows");
    if (zeta < 0 || zeta >= r.period) throw DomainError("zeta must lie in [0, T_C)");
    if (omega < 0) throw DomainError("omega must be non-negative");
    ProtocolSpec probe;
    probe.reception = r;
    probe.beacons = {{0}, {1}, true, 0};
    if (auto problems = validate_schedule(probe); !problems.empty()) throw DomainError(problems.front());
}

std::vector<TickRange> ranges_of(const std::vector<bool>& covered) {
    std::vector<TickRange> out;
    for (Tick t = 0; t < static_cast<Tick>(covered.size()); ++t) {
        if (covered[static_cast<std::size_t>(t)]) continue;
        if (!out.empty() && out.back().end == t) {
            ++out.back().end;
        } else {
            out.push_back({t, t + 1});
        }
    }
    return out;
}

std::string describe(const std::vector<TickRange>& ranges) {
    std::string s;
    for (const auto& r : ranges) {
        if (!s.empty()) s += " ";
        s += "[" + std::to_string(r.begin) + "," + std::to_string(r.end) + ")";
    }
    return s.empty() ? "none" : s;
}

struct Candidate {
    Tick offset;
    std::vector<Tick> f_cells;
    std::vector<Tick> e_cells;
};

std::vector<Candidate> tiling_candidates(const CorrelatedQuadruple& shell) {
    const Tick period = shell.period();
    Tick step = period;
    for (const auto& w : shell.reception.windows) {
        if (w.duration > 0) step = std::min(step, w.duration);
    }
    const HalfTickModel model(shell);
    std::vector<Candidate> out;
    std::vector<bool> seen(static_cast<std::size_t>(period), false);
    for (Tick k = 0; k * step < period; ++k) {
        const Tick z = floor_mod(shell.anchor() + shell.zeta + k * step, period);
        if (seen[static_cast<std::size_t>(z)]) continue;
        seen[static_cast<std::size_t>(z)] = true;
        Candidate c{z, {}, {}};
        for (Tick n = 0; n < period; ++n) {
            const Tick origin = model.f_origin(n);
            if (model.f_hits(z, origin)) c.f_cells.push_back(n);
            if (model.e_hits(z, origin)) c.e_cells.push_back(n);
        }
        out.push_back(std::move(c));
    }
    return out;
}

CorrelatedQuadruple shell_of(const ReceptionSchedule& reception, Tick zeta, ReceptionPredicate predicate, Tick omega) {
    validate_template(reception, zeta, omega);
    CorrelatedQuadruple q;
    q.reception = reception;
    q.zeta = zeta;
    q.omega = omega;
    q.predicate = predicate;
    return q;
}

}  // namespace

Tick CorrelatedQuadruple::anchor() const {
    return reception.sorted_windows().front().offset;
}

BeaconSchedule CorrelatedQuadruple::beacons() const {
    BeaconSchedule b;
    b.periodic = true;
    if (beacon_offsets.empty()) return b;
    b.offset = beacon_offsets.front();
    for (std::size_t i = 0; i < beacon_offsets.size(); ++i) {
        const Tick next = i + 1 < beacon_offsets.size() ? beacon_offsets[i + 1] : beacon_offsets.front() + period();
        b.durations.push_back(omega);
        b.gaps.push_back(next - beacon_offsets[i]);
    }
    return b;
}

Rational CorrelatedQuadruple::beta() const {
    return Rational(static_cast<Tick>(beacon_offsets.size()) * omega, period());
}

Tick mirror_offset(Tick zeta, Tick phi, Tick period) {
    if (period <= 0) throw DomainError("period must be positive");
    return floor_mod(2 * zeta - phi, period);
}

CorrelatedQuadruple build_correlated_quadruple(const ReceptionSchedule& reception, Tick zeta,
                                               ReceptionPredicate predicate, Tick omega) {
    CorrelatedQuadruple quad = shell_of(reception, zeta, predicate, omega);
    const Tick period = quad.period();
    const Tick total = reception.total_window_time();
    if (total <= 0 || period % total != 0) {
        throw DomainError("T_C=" + std::to_string(period) + " is not a multiple of the window time " +
                          std::to_string(total));
    }
    const auto limit = static_cast<std::size_t>((period / total + 1) / 2);

    const auto candidates = tiling_candidates(quad);
    std::vector<bool> covered(static_cast<std::size_t>(period), false);
    std::vector<std::size_t> chosen;
    const auto take = [&](std::size_t i) {
        chosen.push_back(i);
        for (Tick n : candidates[i].f_cells) covered[static_cast<std::size_t>(n)] = true;
        for (Tick n : candidates[i].e_cells) covered[static_cast<std::size_t>(n)] = true;
    };
    const auto full = [&] { return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }); };
    const auto is_chosen = [&](std::size_t i) { return std::find(chosen.begin(), chosen.end(), i) != chosen.end(); };

    take(0);
    for (std::size_t i = 1; i < candidates.size() && !full(); ++i) {
        const auto& c = candidates[i];
        if (c.f_cells.empty() && c.e_cells.empty()) continue;
        std::vector<bool> mine(static_cast<std::size_t>(period), false);
        bool fresh = true;
        for (Tick n : c.f_cells) {
            fresh = fresh && !covered[static_cast<std::size_t>(n)];
            mine[static_cast<std::size_t>(n)] = true;
        }
        for (Tick n : c.e_cells) fresh = fresh && !covered[static_cast<std::size_t>(n)] && !mine[static_cast<std::size_t>(n)];
        if (fresh) take(i);
    }
    for (std::size_t i = 1; i < candidates.size() && !full(); ++i) {
        if (is_chosen(i)) continue;
        const auto& c = candidates[i];
        const bool adds = std::any_of(c.f_cells.begin(), c.f_cells.end(),
                                      [&](Tick n) { return !covered[static_cast<std::size_t>(n)]; }) ||
                          std::any_of(c.e_cells.begin(), c.e_cells.end(),
                                      [&](Tick n) { return !covered[static_cast<std::size_t>(n)]; });
        if (adds) take(i);
    }

    if (!full() || chosen.size() > limit) {
        std::vector<bool> partial(static_cast<std::size_t>(period), false);
        for (std::size_t k = 0; k < std::min(limit, chosen.size()); ++k) {
            for (Tick n : candidates[chosen[k]].f_cells) partial[static_cast<std::size_t>(n)] = true;
            for (Tick n : candidates[chosen[k]].e_cells) partial[static_cast<std::size_t>(n)] = true;
        }
        const auto residual = ranges_of(partial);
        std::vector<std::pair<std::int64_t, std::int64_t>> raw;
        for (const auto& r : residual) raw.emplace_back(r.begin, r.end);
        throw ConstructionError("no correlated plan with " + std::to_string(limit) + " beacons for zeta=" +
                                    std::to_string(zeta) + "; uncovered offsets " + describe(residual),
                                std::move(raw));
    }
    for (std::size_t i : chosen) quad.beacon_offsets.push_back(candidates[i].offset);
    std::sort(quad.beacon_offsets.begin(), quad.beacon_offsets.end());
    return quad;
}

CorrelatedQuadruple direct_quadruple(const ReceptionSchedule& reception, Tick zeta, ReceptionPredicate predicate,
                                     Tick omega) {
    CorrelatedQuadruple quad = shell_of(reception, zeta, predicate, omega);
    const auto candidates = tiling_candidates(quad);
    std::vector<bool> covered(static_cast<std::size_t>(quad.period()), false);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const bool adds = i == 0 || std::any_of(c.f_cells.begin(), c.f_cells.end(), [&](Tick n) {
                              return !covered[static_cast<std::size_t>(n)];
                          });
        if (!adds) continue;
        quad.beacon_offsets.push_back(c.offset);
        for (Tick n : c.f_cells) covered[static_cast<std::size_t>(n)] = true;
    }
    if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
        throw ConstructionError("tiling translations do not cover the period on their own");
    }
    std::sort(quad.beacon_offsets.begin(), quad.beacon_offsets.end());
    return quad;
}

std::vector<Tick> feasible_zetas(const ReceptionSchedule& reception, ReceptionPredicate predicate, Tick omega) {
    std::vector<Tick> out;
    for (Tick z = 0; z < reception.period; ++z) {
        try {
            build_correlated_quadruple(reception, z, predicate, omega);
            out.push_back(z);
        } catch (const ConstructionError&) {
        }
    }
    return out;
}

MutualExclusiveVerdict verify_mutual_exclusive(const CorrelatedQuadruple& quad) {
    validate_template(quad.reception, quad.zeta, quad.omega);
    const HalfTickModel model(quad);
    const Tick period = quad.period();
    MutualExclusiveVerdict v;
    v.beacons_per_device = quad.beacon_offsets.size();
    v.cells.assign(static_cast<std::size_t>(period), kNone);
    std::vector<bool> covered(static_cast<std::size_t>(period), false);
    for (Tick n = 0; n < period; ++n) {
        const Tick origin = model.f_origin(n);
        std::uint8_t cell = kNone;
        for (Tick z : quad.beacon_offsets) {
            if (model.f_hits(z, origin)) cell |= kByF;
            if (model.e_hits(z, origin)) cell |= kByE;
        }
        v.cells[static_cast<std::size_t>(n)] = cell;
        covered[static_cast<std::size_t>(n)] = cell != kNone;
        if (cell & kByF) ++v.covered_by_f;
        if (cell & kByE) ++v.covered_by_e;
        if (cell == kByBoth) ++v.covered_by_both;
    }
    v.uncovered = ranges_of(covered);
    v.covered = v.uncovered.empty();
    v.disjoint = v.covered_by_both == 0;
    return v;
}

namespace {

/// Hitting beacon starts on E's clock within one period, ascending.
std::vector<Tick> hitting_starts(const CorrelatedQuadruple& quad, const HalfTickModel& model, Tick origin) {
    std::vector<Tick> starts;
    for (Tick z : quad.beacon_offsets) {
        if (model.f_hits(z, origin)) starts.push_back(floor_mod(origin + 2 * z, model.period2));
        if (model.e_hits(z, origin)) starts.push_back(floor_mod(2 * z, model.period2));
    }
    std::sort(starts.begin(), starts.end());
    return starts;
}

/// First start strictly after t, given the starts of one period.
Tick next_after(const std::vector<Tick>& starts, Tick period2, Tick t) {
    const Tick base = floor_div(t, period2) * period2;
    const Tick local = t - base;
    auto it = std::upper_bound(starts.begin(), starts.end(), local);
    if (it != starts.end()) return base + *it;
    return base + period2 + starts.front();
}

Tick first_hit(const std::vector<Tick>& offsets, Tick shift, Tick period2, Tick after, const auto& hits) {
    Tick best = kInfiniteTick;
    for (Tick z : offsets) {
        if (!hits(z)) continue;
        const Tick v = shift + 2 * z;
        // Smallest v + m * period2 strictly greater than `after`.
        const Tick m = floor_div(after - v, period2) + 1;
        best = std::min(best, v + m * period2);
    }
    return best;
}

}  // namespace

Tick one_way_latency_correlated(const CorrelatedQuadruple& quad) {
    if (!verify_mutual_exclusive(quad).covered) {
        throw DomainError("quadruple does not guarantee one-way discovery");
    }
    const HalfTickModel model(quad);
    const Tick period = quad.period();
    Tick worst2 = 0;
    for (Tick n = 0; n < period; ++n) {
        const auto starts = hitting_starts(quad, model, model.f_origin(n));
        for (Tick c = 0; c < period; ++c) {
            const Tick latency2 = next_after(starts, model.period2, 2 * c) - 2 * c + model.omega2;
            worst2 = std::max(worst2, latency2);
        }
    }
    return (worst2 + 1) / 2;
}

AssistOutcome simulate_mutual_assistance(const CorrelatedQuadruple& quad, Tick phi, Tick contact) {
    validate_template(quad.reception, quad.zeta, quad.omega);
    const HalfTickModel model(quad);
    const Tick period = quad.period();
    const Tick origin = model.f_origin(floor_mod(phi, period));
    const Tick c2 = 2 * contact;
    const Tick limit = 2 * model.period2;

    const Tick f_first = first_hit(quad.beacon_offsets, origin, model.period2, c2,
                                   [&](Tick z) { return model.f_hits(z, origin); });
    const Tick e_first = first_hit(quad.beacon_offsets, 0, model.period2, c2,
                                   [&](Tick z) { return model.e_hits(z, origin); });
    if (f_first == kInfiniteTick && e_first == kInfiniteTick) {
        throw DomainError("no direction discovers at offset cell " + std::to_string(phi));
    }

    AssistOutcome out;
    Tick one2 = 0;
    Tick two2 = 0;
    if (f_first < e_first) {
        // E heard F and learns F's next listening instant.
        out.first = Direction::f_to_e;
        one2 = f_first + model.omega2;
        const Tick tau_f = model.listener.next_reception_start(one2 - origin, model.omega2, model.predicate, limit);
        const Tick assisted = tau_f == kInfiniteTick ? kInfiniteTick : tau_f + origin + model.omega2;
        const Tick natural = e_first == kInfiniteTick ? kInfiniteTick : e_first + model.omega2;
        two2 = std::min(assisted, natural);
    } else if (e_first < f_first) {
        out.first = Direction::e_to_f;
        one2 = e_first + model.omega2;
        const Tick tau_e = model.listener.next_reception_start(one2, model.omega2, model.predicate, limit);
        const Tick assisted = tau_e == kInfiniteTick ? kInfiniteTick : tau_e + model.omega2;
        const Tick natural = f_first == kInfiniteTick ? kInfiniteTick : f_first + model.omega2;
        two2 = std::min(assisted, natural);
    } else {
        out.first = Direction::simultaneous;
        one2 = f_first + model.omega2;
        two2 = one2;
    }
    if (two2 == kInfiniteTick) throw DomainError("reverse direction never completes");
    out.one_way = Rational(one2 - c2, 2);
    out.two_way = Rational(two2 - c2, 2);
    return out;
}

void write_coverage_union_csv(std::ostream& os, const MutualExclusiveVerdict& verdict) {
    os << "# covered=" << (verdict.covered ? "true" : "false") << "\n";
    os << "# beacons_per_device=" << verdict.beacons_per_device << "\n";
    os << "# omega_f=" << verdict.covered_by_f << " omega_e=" << verdict.covered_by_e
       << " both=" << verdict.covered_by_both << "\n";
    os << "tick,covered_by\n";
    for (std::size_t t = 0; t < verdict.cells.size(); ++t) {
        const char* label = "none";
        switch (verdict.cells[t]) {
            case kByF: label = "F"; break;
            case kByE: label = "E"; break;
            case kByBoth: label = "both"; break;
            default: break;
        }
        os << t << "," << label << "\n";
    }
}

}  // namespace ndkit
