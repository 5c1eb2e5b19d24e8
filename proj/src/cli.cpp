#include "ndkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ndkit/bounds.hpp"
#include "ndkit/collision_sim.hpp"
#include "ndkit/correlated.hpp"
#include "ndkit/coverage.hpp"
#include "ndkit/errors.hpp"
#include "ndkit/spec_io.hpp"

namespace ndkit::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Above this many phase pairs `verify` skips the exhaustive sweep unless a
/// coarser --resolution is requested.
constexpr std::uint64_t kSweepBudget = 200'000'000;

std::ostringstream stream() {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    return os;
}

/// Shortest text that reads back to the same double, or `precision`
/// significant digits for the human block.
std::string num(double v, int precision = 0) {
    if (precision == 0) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }
    auto os = stream();
    os << std::setprecision(precision) << v;
    return os.str();
}

std::string ticks(Tick t) { return t == kInfiniteTick ? "inf" : std::to_string(t); }

double to_seconds(const Rational& t, const Rational& tick_us) { return (t * tick_us).to_double() * 1e-6; }

std::string ranges(const std::vector<TickRange>& rs, std::size_t limit = 50) {
    if (rs.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < rs.size() && i < limit; ++i) {
        if (i) s += " ";
        s += "[" + std::to_string(rs[i].begin) + "," + std::to_string(rs[i].end) + ")";
    }
    if (rs.size() > limit) s += " ... (" + std::to_string(rs.size()) + " ranges)";
    return s;
}

std::string tick_list(const std::vector<TickRange>& rs, std::size_t limit = 200) {
    std::string s;
    std::size_t n = 0;
    for (const auto& r : rs) {
        for (Tick t = r.begin; t < r.end; ++t) {
            if (n == limit) return s + " ...";
            if (n++) s += " ";
            s += std::to_string(t);
        }
    }
    return s;
}

std::vector<Tick> parse_tick_list(const std::string& text, const char* flag) {
    std::vector<Tick> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream in(item);
        in.imbue(std::locale::classic());
        double v = 0;
        if (!(in >> v) || !in.eof()) throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

Rational rational(const std::string& text, const char* flag) {
    try {
        return Rational::parse(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

struct Loaded {
    std::string path;
    std::string digest;
    ProtocolSpec spec;
};

Loaded load(const std::string& path) {
    const std::string text = read_file(path);
    return {path, fnv1a_hex(text), parse_spec_text(text, path)};
}

struct Report {
    std::ostringstream machine = stream();
    std::ostringstream human = stream();
    int code = kOk;
};

void provenance(std::ostream& os, std::string_view verb, const std::vector<const Loaded*>& inputs,
                std::optional<std::uint64_t> seed = std::nullopt) {
    os << "# ndkit " << kVersion << "\n";
    os << "# verb: " << verb << "\n";
    if (seed) os << "# seed: " << *seed << "\n";
    for (const auto* in : inputs) os << "# input: " << in->path << " fnv1a64=" << in->digest << "\n";
}

std::string quote_inputs(const std::vector<std::pair<std::string, std::string>>& inputs) {
    std::string s;
    for (const auto& [k, v] : inputs) {
        if (!s.empty()) s += ";";
        s += k + "=" + v;
    }
    return "\"" + s + "\"";
}

struct Common {
    std::string predicate = "point";
    std::string out_path;
    bool csv = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--predicate", c.predicate, "Reception predicate")
        ->check(CLI::IsMember({"point", "containment", "overlap"}));
    sub->add_option("--out", c.out_path, "Write the machine-readable block to this file");
    sub->add_flag("--csv", c.csv, "Print the machine-readable block instead of the human one");
}

unsigned resolve_workers(unsigned w) {
    if (w > 0) return w;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// ---------------------------------------------------------------- bounds

struct BoundsOpts {
    Common common;
    std::string formula;
    std::string spec;
    std::optional<Tick> omega;
    std::optional<std::string> beta;
    std::optional<std::string> gamma;
    std::optional<std::string> eta;
    std::string alpha = "1";
    std::optional<Tick> period;
    std::optional<std::string> windows;
    std::optional<Tick> d_otx;
    std::optional<Tick> d_orx;
    std::int64_t Q = 1;
    double q = 0.0;
    std::int64_t S = 3;
    std::optional<double> pf;
    double beta_cap = kDefaultBetaCap;
    std::optional<std::string> tick_us;
};

template <class T>
const T& need(const std::optional<T>& v, const char* flag, const std::string& formula) {
    if (!v) throw UsageError("formula '" + formula + "' needs " + flag);
    return *v;
}

Report cmd_bounds(const BoundsOpts& o) {
    Report rep;
    std::optional<Loaded> in;
    std::vector<const Loaded*> inputs;
    if (!o.spec.empty()) {
        in = load(o.spec);
        inputs.push_back(&*in);
    }
    const bool with_overheads = o.formula == "unidirectional-overheads";

    // Defaults derived from the spec file, overridden by explicit flags.
    std::optional<Tick> omega = o.omega;
    std::optional<Rational> beta;
    std::optional<Rational> gamma;
    std::optional<Tick> period = o.period;
    std::optional<std::vector<Tick>> windows;
    RadioOverheads overheads;
    Rational tick_us{1};
    if (in) {
        const auto& s = in->spec;
        if (!omega) omega = s.beacons.max_duration();
        if (s.beacons.periodic) beta = transmit_duty_cycle(s.beacons, with_overheads ? s.overheads : RadioOverheads{});
        if (s.reception.is_periodic()) {
            gamma = reception_duty_cycle(s.reception, with_overheads ? s.overheads : RadioOverheads{});
            if (!period) period = s.reception.period;
            windows.emplace();
            for (const auto& w : s.reception.windows) windows->push_back(w.duration);
        } else if (s.overheads.rx == 0) {
            gamma = reception_duty_cycle(s.reception);
        }
        overheads = s.overheads;
        tick_us = s.tick_us;
    }
    if (o.beta) beta = rational(*o.beta, "--beta");
    if (o.gamma) gamma = rational(*o.gamma, "--gamma");
    if (o.windows) windows = parse_tick_list(*o.windows, "--windows");
    if (o.d_otx) overheads.tx = *o.d_otx;
    if (o.d_orx) overheads.rx = *o.d_orx;
    if (o.tick_us) tick_us = rational(*o.tick_us, "--tick-us");
    const Rational alpha = rational(o.alpha, "--alpha");
    const std::string& f = o.formula;

    if (f == "failure-rate" || f == "beta-for-pf") {
        auto& m = rep.machine;
        provenance(m, "bounds", inputs);
        RedundancyParams params{o.Q, o.q, o.S, 0.0, 0.0};
        if (f == "failure-rate") {
            const double b = need(beta, "--beta", f).to_double();
            const double pc = collision_probability(b, o.S);
            const double pf = failure_rate(b, params);
            m << "formula,inputs,P_c,P_f\n";
            m << f << "," << quote_inputs({{"beta", num(b)}, {"Q", std::to_string(o.Q)}, {"q", num(o.q)},
                                           {"S", std::to_string(o.S)}})
              << "," << num(pc) << "," << num(pf) << "\n";
            rep.human << "formula  failure-rate\n"
                      << "inputs   beta=" << num(b, 6) << " Q=" << o.Q << " q=" << num(o.q, 6) << " S=" << o.S << "\n"
                      << "P_c      " << num(pc, 6) << "\n"
                      << "P_f      " << num(pf, 6) << "\n";
        } else {
            const double pf = need(o.pf, "--pf", f);
            const auto sol = o.q == 0.0 ? beta_for_failure_rate(pf, o.Q, o.S, o.beta_cap)
                                        : beta_for_failure_rate_bisect(pf, o.Q, o.q, o.S);
            params.P_f = pf;
            const double back = failure_rate(sol.beta, params);
            m << "formula,inputs,P_c,beta,roundtrip_P_f\n";
            m << f << "," << quote_inputs({{"P_f", num(pf)}, {"Q", std::to_string(o.Q)}, {"q", num(o.q)},
                                           {"S", std::to_string(o.S)}})
              << "," << num(sol.P_c) << "," << num(sol.beta) << "," << num(back) << "\n";
            rep.human << "formula  beta-for-pf" << (o.q == 0.0 ? " (closed form)" : " (bisection)") << "\n"
                      << "inputs   P_f=" << num(pf, 6) << " Q=" << o.Q << " q=" << num(o.q, 6) << " S=" << o.S << "\n"
                      << "P_c      " << num(sol.P_c, 6) << " (" << num(100.0 * sol.P_c, 4) << " %)\n"
                      << "beta     " << num(sol.beta, 6) << "\n"
                      << "check    failure_rate(beta) = " << num(back, 12) << "\n";
        }
        return rep;
    }

    BoundReport r;
    if (f == "unidirectional") {
        r = bound_unidirectional(need(omega, "--omega", f), need(beta, "--beta", f), need(gamma, "--gamma", f));
    } else if (f == "unidirectional-overheads") {
        r = bound_unidirectional_overheads(need(omega, "--omega", f), need(beta, "--beta", f),
                                           need(gamma, "--gamma", f), overheads, need(windows, "--windows", f));
    } else if (f == "mutual-exclusive") {
        r = bound_mutual_exclusive(need(omega, "--omega", f), alpha,
                                   rational(need(o.eta, "--eta", f), "--eta"));
    } else if (f == "half-coverage") {
        r = bound_half_coverage(need(period, "--period", f), need(windows, "--windows", f), need(omega, "--omega", f),
                                need(beta, "--beta", f));
    } else {
        r = latency_with_redundancy(o.Q, need(period, "--period", f), need(windows, "--windows", f),
                                    need(omega, "--omega", f), need(beta, "--beta", f));
    }

    std::string detail;
    if (!r.branch.empty()) detail = "branch=" + r.branch;
    if (r.slots > 0) detail = "slots=" + std::to_string(r.slots);
    if (r.full_slots > 0) detail += ";full_slots=" + std::to_string(r.full_slots);
    const double secs = to_seconds(r.latency, tick_us);

    provenance(rep.machine, "bounds", inputs);
    rep.machine << "formula,inputs,detail,L_ticks,L_seconds\n";
    rep.machine << formula_id(r.formula) << "," << quote_inputs(r.inputs) << "," << detail << "," << r.latency.str()
                << "," << num(secs) << "\n";

    rep.human << "formula  " << formula_id(r.formula) << "\n";
    rep.human << "inputs  ";
    for (const auto& [k, v] : r.inputs) rep.human << " " << k << "=" << v;
    rep.human << "\n";
    if (!detail.empty()) rep.human << "detail   " << detail << "\n";
    rep.human << "L        " << r.latency.str();
    if (!r.latency.is_integer()) rep.human << " (" << num(r.latency.to_double(), 10) << ")";
    rep.human << " ticks = " << num(secs, 6) << " s\n";
    return rep;
}

// -------------------------------------------------------------- coverage

struct CoverageOpts {
    Common common;
    std::string spec;
    std::optional<std::int64_t> count;
    std::optional<Tick> horizon;
};

std::size_t default_count(const ProtocolSpec& s, std::optional<std::int64_t> count) {
    if (count) {
        if (*count < 1) throw UsageError("--count must be at least 1");
        return static_cast<std::size_t>(*count);
    }
    if (!s.beacons.periodic) return s.beacons.size();
    return static_cast<std::size_t>(min_beacons(reception_duty_cycle(s.reception)));
}

Report cmd_coverage(const CoverageOpts& o) {
    Report rep;
    const auto in = load(o.spec);
    const auto& s = in.spec;
    const auto predicate = parse_predicate(o.common.predicate);
    if (!s.reception.is_periodic() && !o.horizon) throw UsageError("an aperiodic reception schedule needs --horizon");
    const std::size_t M = default_count(s, o.count);
    const auto map = coverage_map(s.beacons, s.reception, M, predicate, o.horizon.value_or(0));
    const auto det = check_deterministic(map);
    const bool disjoint = check_disjoint(map);
    const Rational gamma = reception_duty_cycle(s.reception);

    provenance(rep.machine, "coverage", {&in});
    rep.machine << "# predicate=" << to_string(predicate) << "\n";
    write_coverage_csv(rep.machine, map, gamma);

    rep.human << "spec          " << s.name << "\n"
              << "predicate     " << to_string(predicate) << "\n"
              << "gamma         " << gamma.str() << "\n"
              << "beacons M     " << M << "\n"
              << "covered       " << map.total_covered << " of " << map.domain << " ticks\n"
              << "deterministic " << (det.deterministic ? "yes" : "no") << "\n"
              << "disjoint      " << (disjoint ? "yes" : "no") << "\n"
              << "uncovered     " << ranges(det.uncovered) << "\n";
    for (std::size_t k = 0; k < map.per_beacon_sets.size() && k < 20; ++k) {
        rep.human << "beacon " << std::setw(3) << k << "    " << map.per_beacon_sets[k].size() << " offsets\n";
    }
    return rep;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
    Common common;
    std::string spec;
    std::optional<std::int64_t> count;
    std::optional<Tick> horizon;
    std::string alpha = "1";
    Tick resolution = 1;
    unsigned workers = 0;
};

Report cmd_verify(const VerifyOpts& o) {
    Report rep;
    const auto in = load(o.spec);
    const auto& s = in.spec;
    const auto predicate = parse_predicate(o.common.predicate);
    const Rational alpha = rational(o.alpha, "--alpha");
    if (o.resolution < 1) throw UsageError("--resolution must be at least 1");
    auto& m = rep.machine;
    auto& h = rep.human;
    provenance(m, "verify", {&in});
    m << "key,value\n";
    m << "predicate," << to_string(predicate) << "\n";
    h << "spec           " << s.name << "\n";
    h << "predicate      " << to_string(predicate) << "\n";

    std::optional<Rational> beta;
    if (s.beacons.periodic) {
        beta = transmit_duty_cycle(s.beacons);
        const Rational beta_o = transmit_duty_cycle(s.beacons, s.overheads);
        m << "beta," << beta->str() << "\nbeta_overheads," << beta_o.str() << "\n";
        h << "beta           " << beta->str() << " (with overheads " << beta_o.str() << ")\n";
    }
    const Rational gamma = reception_duty_cycle(s.reception);
    m << "gamma," << gamma.str() << "\n";
    h << "gamma          " << gamma.str();
    if (s.reception.is_periodic()) {
        const Rational gamma_o = reception_duty_cycle(s.reception, s.overheads);
        m << "gamma_overheads," << gamma_o.str() << "\n";
        h << " (with overheads " << gamma_o.str() << ")";
    }
    h << "\n";
    if (beta) {
        const Rational eta = combined_duty_cycle(*beta, gamma, alpha);
        m << "eta," << eta.str() << "\n";
        h << "eta            " << eta.str() << " (alpha " << alpha.str() << ")\n";
    }
    const std::int64_t m_min = min_beacons(gamma);
    const std::size_t M = default_count(s, o.count);
    m << "min_beacons," << m_min << "\nM," << M << "\n";

    bool deterministic = false;
    bool disjoint = false;
    std::vector<TickRange> uncovered;
    if (s.reception.is_periodic()) {
        const auto map = coverage_map(s.beacons, s.reception, M, predicate);
        const auto det = check_deterministic(map);
        deterministic = det.deterministic;
        disjoint = check_disjoint(map);
        uncovered = det.uncovered;
        m << "covered_ticks," << map.total_covered << "\ndomain," << map.domain << "\n";
    } else {
        if (!o.horizon) throw UsageError("an aperiodic reception schedule needs --horizon");
        const auto a = aperiodic_coverage_check(s.beacons, s.reception, *o.horizon, M, predicate);
        deterministic = a.covered;
        disjoint = true;
        uncovered = a.uncovered;
        m << "horizon," << a.horizon << "\nwindows_in_horizon," << a.windows_in_horizon << "\nrunning_gamma,"
          << a.running_gamma.str() << "\ncontacts_checked," << a.contacts_checked << "\n";
        h << "horizon        " << a.horizon << " ticks, " << a.windows_in_horizon << " windows, running gamma "
          << a.running_gamma.str() << " (" << num(a.running_gamma.to_double(), 6) << ")\n";
    }
    const std::string verdict = std::string(deterministic ? "deterministic" : "NOT deterministic") + ", " +
                                (s.reception.is_periodic() ? (disjoint ? "disjoint" : "NOT disjoint") : "aperiodic") +
                                ", M=" + std::to_string(M);
    m << "deterministic," << (deterministic ? "true" : "false") << "\n";
    if (s.reception.is_periodic()) m << "disjoint," << (disjoint ? "true" : "false") << "\n";
    m << "uncovered," << ranges(uncovered, SIZE_MAX) << "\n";
    h << "verdict        " << verdict << "\n";
    h << "min beacons    " << m_min << (static_cast<std::int64_t>(M) == m_min ? " (matches M)" : "") << "\n";
    if (!deterministic) {
        h << "uncovered      " << ranges(uncovered) << "\n";
        h << "uncovered ticks " << tick_list(uncovered) << "\n";
    }

    // Exhaustive phase sweep and the closed-form bound it should meet.
    if (s.beacons.periodic) {
        const Tick listener_phases = s.reception.is_periodic() ? s.reception.period : o.horizon.value_or(0) / 2;
        const auto steps = [&](Tick n) { return static_cast<std::uint64_t>((n + o.resolution - 1) / o.resolution); };
        const std::uint64_t pairs = steps(s.beacons.period()) * steps(listener_phases);
        if (pairs > kSweepBudget) {
            m << "sweep,skipped\n";
            h << "sweep          skipped: " << pairs << " phase pairs; pass a coarser --resolution\n";
        } else {
            const auto w = worst_case_latency(s, s, predicate, o.horizon.value_or(0), resolve_workers(o.workers),
                                              o.resolution);
            m << "sweep_resolution," << o.resolution << "\nsweep_phases," << w.phases_checked << "\nworst_ticks,"
              << ticks(w.worst) << "\nworst_seconds,"
              << (w.deterministic ? num(to_seconds(Rational(w.worst), s.tick_us)) : "inf") << "\n";
            h << "sweep          " << w.phases_checked << " phase pairs at resolution " << o.resolution
              << (o.resolution > 1 ? " (sampled, not exhaustive)" : "") << "\n";
            if (w.deterministic) {
                h << "worst case     " << w.worst << " ticks = " << num(to_seconds(Rational(w.worst), s.tick_us), 6)
                  << " s (sender phase " << w.sender_phase << ", listener phase " << w.listener_phase << ")\n";
            } else {
                h << "worst case     undiscovered at sender phase " << w.sender_phase << ", listener phase "
                  << w.listener_phase << " within " << w.search_bound << " ticks\n";
                deterministic = false;
            }
            const Tick omega = s.beacons.max_duration();
            if (*beta > Rational{0} && gamma > Rational{0} && *beta <= Rational{1}) {
                const auto b = bound_unidirectional(omega, *beta, gamma);
                m << "bound_ticks," << b.latency.str() << "\n";
                h << "bound w/(bg)   " << b.latency.str() << " ticks = " << num(b.seconds(s.tick_us), 6) << " s";
                if (w.deterministic) {
                    const Rational diff = Rational(w.worst) - b.latency;
                    const Rational gap = diff < Rational{0} ? -diff : diff;
                    const bool within = gap <= Rational(omega + 1);
                    m << "bound_gap_ticks," << gap.str() << "\nwithin_omega_plus_one," << (within ? "true" : "false")
                      << "\n";
                    h << ", |worst - bound| = " << gap.str() << (within ? " <= " : " > ") << "w+1";
                }
                h << "\n";
                const auto& ov = s.overheads;
                if ((ov.tx != 0 || ov.rx != 0) && s.reception.is_periodic()) {
                    std::vector<Tick> ds;
                    for (const auto& win : s.reception.windows) ds.push_back(win.duration);
                    const auto bo = bound_unidirectional_overheads(omega, transmit_duty_cycle(s.beacons, ov),
                                                                   reception_duty_cycle(s.reception, ov), ov, ds);
                    m << "bound_overheads_ticks," << bo.latency.str() << "\n";
                    h << "bound overheads " << bo.latency.str() << " ticks = " << num(bo.seconds(s.tick_us), 6)
                      << " s\n";
                }
            } else {
                h << "bound w/(bg)   n/a (beta or gamma is zero)\n";
            }
        }
    }
    if (!deterministic) rep.code = kVerificationFailed;
    return rep;
}

// -------------------------------------------------------------- simulate

struct SimulateOpts {
    Common common;
    std::string spec;
    std::int64_t devices = 2;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    std::optional<Tick> horizon;
    std::optional<Tick> target;
    std::string quantiles = "0.5,0.9,0.99";
    std::optional<std::string> phase;
    unsigned workers = 0;
};

Report cmd_simulate(const SimulateOpts& o) {
    Report rep;
    const auto in = load(o.spec);
    const auto& s = in.spec;
    const auto predicate = parse_predicate(o.common.predicate);
    auto& m = rep.machine;
    auto& h = rep.human;

    if (!s.reception.is_periodic()) throw UsageError("simulate needs a periodic reception schedule");
    const Tick hyper = std::lcm(s.beacons.period(), s.reception.period);
    const Tick horizon = o.horizon.value_or(2 * hyper);

    if (o.phase) {
        std::optional<DiscoveryEvent> ev;
        if (*o.phase == "random") {
            auto rng = SplitMix64::stream(o.seed, 0);
            ev = simulate_pairwise(s, s, rng, horizon, predicate);
        } else {
            const auto phases = parse_tick_list(*o.phase, "--phase");
            ev = simulate_pairwise(s, s, phases.front(), horizon, predicate);
        }
        provenance(m, "simulate", {&in}, o.seed);
        m << "phase,discovered,beacon,time_ticks,time_seconds\n";
        if (ev) {
            m << ev->phase << ",true," << ev->beacon << "," << ev->time << ","
              << num(to_seconds(Rational(ev->time), s.tick_us)) << "\n";
            h << "phase " << ev->phase << ": beacon " << ev->beacon << " received, ends at tick " << ev->time << " ("
              << num(to_seconds(Rational(ev->time), s.tick_us), 6) << " s)\n";
        } else {
            m << *o.phase << ",false,,inf,inf\n";
            h << "phase " << *o.phase << ": no beacon received within " << horizon << " ticks\n";
            rep.code = kVerificationFailed;
        }
        return rep;
    }

    SimConfig c;
    c.specs = {s};
    c.devices = o.devices;
    c.trials = o.trials;
    c.horizon = horizon;
    c.seed = o.seed;
    c.predicate = predicate;
    c.latency_target = o.target.value_or(0);
    c.quantiles = parse_double_list(o.quantiles, "--quantiles");
    c.workers = resolve_workers(o.workers);
    const auto r = simulate_network(c);

    provenance(m, "simulate", {&in}, o.seed);
    m << "# devices=" << o.devices << " trials=" << o.trials << " horizon=" << horizon
      << " target=" << r.latency_target << " predicate=" << to_string(predicate) << "\n";
    m << "# empirical_collision_rate=" << num(r.empirical_collision_rate) << "\n";
    m << "# analytic_P_c=" << num(r.analytic_P_c) << "\n";
    m << "# empirical_failure_rate=" << num(r.empirical_failure_rate) << "\n";
    m << "# discovered_within_horizon=" << num(r.discovered_within_horizon) << "\n";
    m << "# focus_beacons=" << r.focus_beacons << " collided=" << r.collided_beacons << "\n";
    for (const auto& [q, t] : r.latency_quantiles) {
        m << "# quantile " << num(q) << " = " << ticks(t) << " ticks";
        if (t != kInfiniteTick) m << " = " << num(to_seconds(Rational(t), s.tick_us)) << " s";
        m << "\n";
    }
    m << "trial";
    for (std::int64_t i = 0; i < o.devices; ++i) m << ",phase_" << i;
    m << ",discovered,latency,destroyed_hits\n";
    for (const auto& t : r.trials) {
        m << t.trial;
        for (Tick p : t.phases) m << "," << p;
        m << "," << (t.discovered ? "true" : "false") << "," << ticks(t.latency) << "," << t.destroyed_hits << "\n";
    }

    h << "spec                 " << s.name << "\n"
      << "devices              " << o.devices << "\n"
      << "trials               " << o.trials << " (seed " << o.seed << ")\n"
      << "horizon              " << horizon << " ticks\n"
      << "collision rate       " << num(r.empirical_collision_rate, 6) << " (" << r.collided_beacons << " of "
      << r.focus_beacons << " beacons)\n"
      << "analytic P_c         " << num(r.analytic_P_c, 6) << "\n"
      << "failure rate         " << num(r.empirical_failure_rate, 6) << " (target " << r.latency_target
      << " ticks)\n"
      << "discovered           " << num(r.discovered_within_horizon, 6) << "\n";
    for (const auto& [q, t] : r.latency_quantiles) {
        h << "latency q=" << std::left << std::setw(10) << num(q, 6) << " " << ticks(t) << " ticks";
        if (t != kInfiniteTick) h << " = " << num(to_seconds(Rational(t), s.tick_us), 6) << " s";
        h << "\n";
    }
    return rep;
}

// ------------------------------------------------------------ optimize-q

struct OptimizeOpts {
    Common common;
    Tick omega = 0;
    std::string alpha = "1";
    std::string eta;
    double pf = 0.0;
    std::int64_t S = 3;
    std::int64_t qmax = 6;
    std::string tick_us = "1";
};

Report cmd_optimize(const OptimizeOpts& o) {
    Report rep;
    const Rational alpha = rational(o.alpha, "--alpha");
    const Rational eta = rational(o.eta, "--eta");
    const Rational tick_us = rational(o.tick_us, "--tick-us");
    auto& m = rep.machine;
    auto& h = rep.human;
    provenance(m, "optimize-q", {});
    m << "# omega=" << o.omega << " alpha=" << alpha.str() << " eta=" << eta.str() << " P_f=" << num(o.pf)
      << " S=" << o.S << " Q_max=" << o.qmax << "\n";

    RedundancyPlan plan;
    try {
        plan = optimize_redundancy(o.omega, alpha, eta, o.pf, o.S, o.qmax);
    } catch (const InfeasibleError& e) {
        m << "Q,feasible,reason\n";
        h << "no feasible Q:\n";
        for (std::size_t i = 0; i < e.reasons.size(); ++i) {
            m << i + 1 << ",false,\"" << e.reasons[i] << "\"\n";
            h << "  " << e.reasons[i] << "\n";
        }
        rep.code = kVerificationFailed;
        return rep;
    }

    m << "Q,P_c,beta,feasible,gamma,slots,L_ticks,L_seconds,roundtrip_rel_error,reason\n";
    h << std::left << std::setw(4) << "Q" << std::setw(12) << "P_c" << std::setw(14) << "beta" << std::setw(12)
      << "gamma" << std::setw(8) << "slots" << std::setw(14) << "L (s)" << "round-trip\n";
    for (const auto& row : plan.table) {
        const double back = row.beta > 0 ? failure_rate(row.beta, {row.Q, 0.0, o.S}) : 0.0;
        const double rel = std::abs(back - o.pf) / o.pf;
        const double secs = row.latency * tick_us.to_double() * 1e-6;
        m << row.Q << "," << num(row.P_c) << "," << num(row.beta) << "," << (row.feasible ? "true" : "false") << ","
          << (row.feasible ? num(row.gamma) : "") << "," << (row.feasible ? std::to_string(row.slots) : "") << ","
          << (row.feasible ? num(row.latency) : "") << "," << (row.feasible ? num(secs) : "") << "," << num(rel, 3)
          << "," << (row.reason.empty() ? "" : "\"" + row.reason + "\"") << "\n";
        h << std::left << std::setw(4) << row.Q << std::setw(12) << num(row.P_c, 6) << std::setw(14)
          << num(row.beta, 6) << std::setw(12) << (row.feasible ? num(row.gamma, 6) : "-") << std::setw(8)
          << (row.feasible ? std::to_string(row.slots) : "-") << std::setw(14)
          << (row.feasible ? num(secs, 6) : "infeasible") << num(rel, 2) << "\n";
    }
    m << "# selected Q=" << plan.Q << " beta=" << num(plan.beta) << " gamma=" << num(plan.gamma)
      << " L_ticks=" << num(plan.latency) << "\n";
    h << "selected Q=" << plan.Q << ": beta " << num(plan.beta, 6) << ", gamma " << num(plan.gamma, 6) << ", L "
      << num(plan.latency, 8) << " ticks = " << num(plan.latency * tick_us.to_double() * 1e-6, 6) << " s\n";
    return rep;
}

// ------------------------------------------------------------ correlated

struct CorrelatedOpts {
    Common common;
    std::string action;
    std::string spec;
    std::optional<Tick> zeta;
    std::optional<Tick> omega;
    std::optional<std::string> beacons;
    std::optional<Tick> phase;
    Tick contact = 0;
    bool direct = false;
};

Report cmd_correlated(const CorrelatedOpts& o) {
    Report rep;
    const auto in = load(o.spec);
    const auto& s = in.spec;
    const auto predicate = parse_predicate(o.common.predicate);
    const Tick omega = o.omega.value_or(s.beacons.max_duration());
    const auto& r = s.reception;
    if (!r.is_periodic()) throw UsageError("correlated schedules need a periodic reception template");
    auto& m = rep.machine;
    auto& h = rep.human;
    provenance(m, "correlated " + o.action, {&in});

    if (o.action == "zetas") {
        const auto zs = feasible_zetas(r, predicate, omega);
        m << "zeta\n";
        for (Tick z : zs) m << z << "\n";
        h << "feasible zeta (" << zs.size() << " of " << r.period << "):";
        for (Tick z : zs) h << " " << z;
        h << "\n";
        return rep;
    }
    if (!o.zeta) throw UsageError("correlated " + o.action + " needs --zeta");
    if (o.action == "mirror") {
        if (!o.phase) throw UsageError("correlated mirror needs --phase");
        const Tick v = mirror_offset(*o.zeta, *o.phase, r.period);
        m << "zeta,phi,T_C,mirror\n" << *o.zeta << "," << *o.phase << "," << r.period << "," << v << "\n";
        h << "mirror of phi=" << *o.phase << " about zeta=" << *o.zeta << " (T_C " << r.period << ") = " << v << "\n";
        return rep;
    }

    CorrelatedQuadruple quad;
    try {
        quad = o.direct ? direct_quadruple(r, *o.zeta, predicate, omega)
                        : build_correlated_quadruple(r, *o.zeta, predicate, omega);
    } catch (const ConstructionError& e) {
        m << "status,residual\nfailed,\"";
        for (const auto& [a, b] : e.residual) m << "[" << a << "," << b << ")";
        m << "\"\n";
        h << "construction failed: " << e.what() << "\n";
        rep.code = kVerificationFailed;
        return rep;
    }
    if (o.beacons) quad.beacon_offsets = parse_tick_list(*o.beacons, "--beacons");
    const auto M = min_beacons(reception_duty_cycle(r));

    if (o.action == "build") {
        m << "offset\n";
        for (Tick z : quad.beacon_offsets) m << z << "\n";
        h << "template       T_C " << r.period << ", window time " << r.total_window_time() << ", anchor "
          << quad.anchor() << "\n"
          << "zeta           " << quad.zeta << "\n"
          << "plan           " << quad.beacon_offsets.size() << " beacons per device (direct coverage needs " << M
          << ")\n"
          << "offsets       ";
        for (Tick z : quad.beacon_offsets) h << " " << z;
        h << "\nbeta           " << quad.beta().str() << "\n";
        return rep;
    }

    const auto v = verify_mutual_exclusive(quad);
    if (o.action == "verify") {
        write_coverage_union_csv(m, v);
        h << "verdict        " << (v.covered ? "covered" : "NOT covered") << ", "
          << (v.disjoint ? "disjoint" : "overlapping") << ", " << v.beacons_per_device
          << " beacons per device (direct M=" << M << ")\n"
          << "Omega_F        " << v.covered_by_f << " ticks\n"
          << "Omega_E        " << v.covered_by_e << " ticks\n"
          << "both           " << v.covered_by_both << " ticks\n"
          << "uncovered      " << ranges(v.uncovered) << "\n";
        if (!v.covered) rep.code = kVerificationFailed;
        return rep;
    }
    if (!v.covered) {
        h << "quadruple does not cover every offset: " << ranges(v.uncovered) << "\n";
        m << "status\nnot covered\n";
        rep.code = kVerificationFailed;
        return rep;
    }

    if (o.action == "latency") {
        const Tick measured = one_way_latency_correlated(quad);
        std::vector<Tick> ds;
        for (const auto& w : r.windows) ds.push_back(w.duration);
        m << "measured_ticks,measured_seconds,bound_ticks,bound_seconds,within_omega_plus_one\n";
        m << measured << "," << num(to_seconds(Rational(measured), s.tick_us));
        h << "measured       " << measured << " ticks = " << num(to_seconds(Rational(measured), s.tick_us), 6)
          << " s\n";
        if (omega > 0) {
            const auto b = bound_half_coverage(r.period, ds, omega, quad.beta());
            const Rational diff = Rational(measured) - b.latency;
            const bool within = (diff < Rational{0} ? -diff : diff) <= Rational(omega + 1);
            m << "," << b.latency.str() << "," << num(b.seconds(s.tick_us)) << "," << (within ? "true" : "false")
              << "\n";
            h << "bound          " << b.latency.str() << " ticks (" << b.slots << " of " << b.full_slots
              << " slots), " << (within ? "within" : "outside") << " w+1\n";
        } else {
            m << ",,,\n";
            h << "bound          n/a for zero-length beacons\n";
        }
        return rep;
    }

    // assist
    std::vector<Tick> phis;
    if (o.phase) {
        phis.push_back(*o.phase);
    } else {
        phis.resize(static_cast<std::size_t>(r.period));
        std::iota(phis.begin(), phis.end(), Tick{0});
    }
    m << "phi,first,one_way_ticks,two_way_ticks,penalty_ticks\n";
    Rational worst{0};
    Tick worst_phi = 0;
    for (Tick phi : phis) {
        const auto out = simulate_mutual_assistance(quad, phi, o.contact);
        const char* dir = out.first == Direction::f_to_e ? "F->E" : out.first == Direction::e_to_f ? "E->F" : "both";
        m << phi << "," << dir << "," << out.one_way.str() << "," << out.two_way.str() << "," << out.penalty().str()
          << "\n";
        if (out.penalty() > worst) {
            worst = out.penalty();
            worst_phi = phi;
        }
    }
    const bool ok = worst <= Rational(r.period);
    h << "phases         " << phis.size() << "\n"
      << "max penalty    " << worst.str() << " ticks at phi=" << worst_phi << " (T_C " << r.period << ")\n"
      << "bound          " << (ok ? "penalty <= T_C holds" : "penalty exceeds T_C") << "\n";
    if (!ok) rep.code = kVerificationFailed;
    return rep;
}

// --------------------------------------------------------------- lpl-dual

struct DualOpts {
    Common common;
    std::string spec;
};

Report cmd_dual(const DualOpts& o) {
    Report rep;
    const auto in = load(o.spec);
    const auto dual = lpl_dualize(in.spec);
    rep.machine << emit_spec(dual);
    auto& h = rep.human;
    provenance(h, "lpl-dual", {&in});
    const auto line = [&](const char* label, const ProtocolSpec& s) {
        h << label << " beta " << transmit_duty_cycle(s.beacons, s.overheads).str() << ", gamma "
          << reception_duty_cycle(s.reception, s.overheads).str() << ", airtime "
          << period_duty_cycle(s.beacons).str() << "\n";
    };
    line("original", in.spec);
    line("dual    ", dual);
    h << emit_spec(dual);
    return rep;
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& verb_operations() {
    static const std::map<std::string, std::vector<std::string>> ops{
        {"bounds",
         {"parse_spec", "transmit_duty_cycle", "reception_duty_cycle", "bound_unidirectional",
          "bound_unidirectional_overheads", "bound_mutual_exclusive", "bound_half_coverage", "latency_with_redundancy",
          "collision_probability", "failure_rate", "beta_for_failure_rate", "beta_for_failure_rate_bisect"}},
        {"coverage",
         {"parse_spec", "min_beacons", "coverage_map", "check_deterministic", "check_disjoint", "write_coverage_csv"}},
        {"verify",
         {"parse_spec", "validate_schedule", "transmit_duty_cycle", "reception_duty_cycle", "combined_duty_cycle",
          "min_beacons", "coverage_map", "check_deterministic", "check_disjoint", "aperiodic_coverage_check",
          "worst_case_latency", "bound_unidirectional", "bound_unidirectional_overheads"}},
        {"simulate", {"parse_spec", "simulate_pairwise", "simulate_network", "latency_quantile"}},
        {"optimize-q", {"optimize_redundancy", "beta_for_failure_rate", "failure_rate"}},
        {"correlated",
         {"parse_spec", "mirror_offset", "feasible_zetas", "build_correlated_quadruple", "direct_quadruple",
          "verify_mutual_exclusive", "write_coverage_union_csv", "one_way_latency_correlated", "bound_half_coverage",
          "simulate_mutual_assistance"}},
        {"lpl-dual", {"parse_spec", "lpl_dualize", "emit_spec", "period_duty_cycle"}},
    };
    return ops;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neighbor-discovery schedule toolkit", "ndkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    BoundsOpts bo;
    auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form latency or failure-rate formula");
    bounds->add_option("--formula", bo.formula, "Formula")
        ->required()
        ->check(CLI::IsMember({"unidirectional", "unidirectional-overheads", "mutual-exclusive", "half-coverage",
                               "redundancy", "failure-rate", "beta-for-pf"}));
    bounds->add_option("--spec", bo.spec, "Take omega, beta, gamma, windows and overheads from a spec file");
    bounds->add_option("--omega", bo.omega, "Beacon duration (ticks)");
    bounds->add_option("--beta", bo.beta, "Transmit duty cycle (p/q or decimal)");
    bounds->add_option("--gamma", bo.gamma, "Reception duty cycle");
    bounds->add_option("--eta", bo.eta, "Combined duty cycle");
    bounds->add_option("--alpha", bo.alpha, "Transmit weighting");
    bounds->add_option("--period", bo.period, "Reception period T_C (ticks)");
    bounds->add_option("--windows", bo.windows, "Window durations, comma separated");
    bounds->add_option("--d-otx", bo.d_otx, "Transmit overhead (ticks)");
    bounds->add_option("--d-orx", bo.d_orx, "Receive overhead (ticks)");
    bounds->add_option("--redundancy,-Q", bo.Q, "Redundancy Q");
    bounds->add_option("--q", bo.q, "Fraction of offsets covered Q+1 times");
    bounds->add_option("--devices,-S", bo.S, "Device count S");
    bounds->add_option("--pf", bo.pf, "Target failure rate");
    bounds->add_option("--beta-cap", bo.beta_cap, "Largest acceptable beta for beta-for-pf");
    bounds->add_option("--tick-us", bo.tick_us, "Tick length in microseconds");
    add_common(bounds, bo.common);

    CoverageOpts co;
    auto* coverage = app.add_subcommand("coverage", "Coverage map of the first M beacons");
    coverage->add_option("spec", co.spec, "Spec file")->required();
    coverage->add_option("--count,-M", co.count, "Beacons in the sequence (default ceil(1/gamma))");
    coverage->add_option("--horizon", co.horizon, "Domain for aperiodic reception (ticks)");
    add_common(coverage, co.common);

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "Check determinism and disjointness, sweep the worst case");
    verify->add_option("spec", vo.spec, "Spec file")->required();
    verify->add_option("--count,-M", vo.count, "Beacons in the sequence");
    verify->add_option("--horizon", vo.horizon, "Horizon for aperiodic reception (ticks)");
    verify->add_option("--alpha", vo.alpha, "Transmit weighting for eta");
    verify->add_option("--resolution", vo.resolution, "Phase step of the sweep in ticks (1 = exhaustive)");
    verify->add_option("--workers", vo.workers, "Sweep threads (0 = all cores)");
    add_common(verify, vo.common);

    SimulateOpts so;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo collision and discovery simulation");
    simulate->add_option("spec", so.spec, "Spec file shared by every device")->required();
    simulate->add_option("--devices,-S", so.devices, "Device count");
    simulate->add_option("--trials", so.trials, "Trials");
    simulate->add_option("--seed", so.seed, "Master seed");
    simulate->add_option("--horizon", so.horizon, "Simulated ticks per trial (default two hyperperiods)");
    simulate->add_option("--target", so.target, "Latency target for the failure rate (default horizon)");
    simulate->add_option("--quantiles", so.quantiles, "Latency quantiles, comma separated");
    simulate->add_option("--phase", so.phase, "Single pairwise run at this phase, or 'random'");
    simulate->add_option("--workers", so.workers, "Threads (0 = all cores)");
    add_common(simulate, so.common);

    OptimizeOpts oo;
    auto* optimize = app.add_subcommand("optimize-q", "Per-Q redundancy table and the latency-minimal Q");
    optimize->add_option("--omega", oo.omega, "Beacon duration (ticks)")->required();
    optimize->add_option("--alpha", oo.alpha, "Transmit weighting");
    optimize->add_option("--eta", oo.eta, "Combined duty cycle budget")->required();
    optimize->add_option("--pf", oo.pf, "Target failure rate")->required();
    optimize->add_option("--devices,-S", oo.S, "Device count");
    optimize->add_option("--qmax", oo.qmax, "Largest Q to try");
    optimize->add_option("--tick-us", oo.tick_us, "Tick length in microseconds");
    add_common(optimize, oo.common);

    CorrelatedOpts xo;
    auto* correlated = app.add_subcommand("correlated", "Correlated mutual-exclusive schedules");
    correlated->add_option("action", xo.action, "build | verify | latency | assist | zetas | mirror")
        ->required()
        ->check(CLI::IsMember({"build", "verify", "latency", "assist", "zetas", "mirror"}));
    correlated->add_option("spec", xo.spec, "Spec file whose reception schedule is the template")->required();
    correlated->add_option("--zeta", xo.zeta, "Correlated beacon offset from the first window (ticks)");
    correlated->add_option("--omega", xo.omega, "Beacon duration (default: from the spec)");
    correlated->add_option("--beacons", xo.beacons, "Override the plan with these offsets, comma separated");
    correlated->add_option("--phase", xo.phase, "Offset cell phi (assist, mirror)");
    correlated->add_option("--contact", xo.contact, "Contact tick on E's clock (assist)");
    correlated->add_flag("--direct", xo.direct, "Use every tiling translation instead of the halved plan");
    add_common(correlated, xo.common);

    DualOpts dopt;
    auto* dual = app.add_subcommand("lpl-dual", "Swap beacons and reception windows");
    dual->add_option("spec", dopt.spec, "Spec file")->required();
    add_common(dual, dopt.common);

    std::vector<const char*> argv{"ndkit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    const Common* common = nullptr;
    Report rep;
    try {
        if (*bounds) {
            common = &bo.common;
            rep = cmd_bounds(bo);
        } else if (*coverage) {
            common = &co.common;
            rep = cmd_coverage(co);
        } else if (*verify) {
            common = &vo.common;
            rep = cmd_verify(vo);
        } else if (*simulate) {
            common = &so.common;
            rep = cmd_simulate(so);
        } else if (*optimize) {
            common = &oo.common;
            rep = cmd_optimize(oo);
        } else if (*correlated) {
            common = &xo.common;
            rep = cmd_correlated(xo);
        } else {
            common = &dopt.common;
            rep = cmd_dual(dopt);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (!common->out_path.empty()) {
        std::ofstream f(common->out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << common->out_path << "'\n";
            return kUsage;
        }
        f << rep.machine.str();
        if (!f) {
            err << "error: writing '" << common->out_path << "' failed\n";
            return kUsage;
        }
    }
    out << (common->csv ? rep.machine.str() : rep.human.str());
    return rep.code;
}

}  // namespace ndkit::cli
