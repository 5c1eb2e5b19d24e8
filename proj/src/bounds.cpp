#include "ndkit/bounds.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "ndkit/errors.hpp"

namespace ndkit {

namespace {

Tick sum_windows(std::span<const Tick> windows) {
    if (windows.empty()) throw DomainError("window list is empty");
    Tick sum = 0;
    for (Tick d : windows) {
        if (d < 0) throw DomainError("window durations must be non-negative");
        sum += d;
    }
    if (sum <= 0) throw DomainError("total window time must be positive");
    return sum;
}

std::string join(std::span<const Tick> values) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
    os << "]";
    return os.str();
}

void require_unit_interval(const Rational& v, const char* name) {
    if (v <= Rational{0} || v > Rational{1}) {
        throw DomainError(std::string(name) + " must lie in (0, 1], got " + v.str());
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string_view formula_id(Formula f) {
    switch (f) {
        case Formula::unidirectional: return "unidirectional";
        case Formula::unidirectional_overheads: return "unidirectional-overheads";
        case Formula::mutual_exclusive: return "mutual-exclusive";
        case Formula::half_coverage: return "half-coverage";
        case Formula::redundancy: return "redundancy";
    }
    return "unknown";
}

BoundReport bound_unidirectional(Tick omega, const Rational& beta, const Rational& gamma) {
    require_unit_interval(beta, "beta");
    require_unit_interval(gamma, "gamma");
    BoundReport r;
    r.formula = Formula::unidirectional;
    r.latency = Rational(omega) / (beta * gamma);
    r.inputs = {{"omega", std::to_string(omega)}, {"beta", beta.str()}, {"gamma", gamma.str()}};
    return r;
}

BoundReport bound_unidirectional_overheads(Tick omega, const Rational& beta, const Rational& gamma,
                                           const RadioOverheads& overheads, std::span<const Tick> windows) {
    require_unit_interval(beta, "beta");
    require_unit_interval(gamma, "gamma");
    const Tick total = sum_windows(windows);
    const auto n = static_cast<Tick>(windows.size());
    BoundReport r;
    r.formula = Formula::unidirectional_overheads;
    r.latency = gamma.reciprocal() * (Rational{1} + Rational(n * overheads.rx, total)) *
                (Rational(omega + overheads.tx) / beta);
    r.inputs = {{"omega", std::to_string(omega)}, {"beta", beta.str()},        {"gamma", gamma.str()},
                {"d_oTx", std::to_string(overheads.tx)}, {"d_oRx", std::to_string(overheads.rx)},
                {"windows", join(windows)}};
    return r;
}

BoundReport bound_mutual_exclusive(Tick omega, const Rational& alpha, const Rational& eta) {
    require_unit_interval(eta, "eta");
    if (alpha <= Rational{0}) throw DomainError("alpha must be positive");
    const Rational inv = eta.reciprocal();
    const Rational half{1, 2};

    const auto branch = [&](std::int64_t k) -> std::optional<Rational> {
        if (k <= 0) return std::nullopt;
        const Rational denom = eta * Rational(k) - half;
        if (denom <= Rational{0}) return std::nullopt;
        return Rational(k) * Rational(k) * Rational(omega) * alpha / denom;
    };
    const auto up = branch(inv.ceil());
    const auto down = branch(inv.floor());
    if (!up && !down) throw DomainError("both branches have a non-positive denominator for eta=" + eta.str());

    BoundReport r;
    r.formula = Formula::mutual_exclusive;
    r.inputs = {{"omega", std::to_string(omega)}, {"alpha", alpha.str()}, {"eta", eta.str()}};
    if (up && down && *up == *down) {
        r.latency = *up;
        r.branch = "both";
    } else if (up && (!down || *up < *down)) {
        r.latency = *up;
        r.branch = "ceil";
    } else {
        r.latency = *down;
        r.branch = "floor";
    }
    return r;
}

BoundReport bound_half_coverage(Tick period, std::span<const Tick> windows, Tick omega, const Rational& beta) {
    const Tick total = sum_windows(windows);
    if (period <= 0) throw DomainError("period must be positive");
    require_unit_interval(beta, "beta");
    BoundReport r;
    r.formula = Formula::half_coverage;
    r.slots = Rational(period, 2 * total).ceil();
    r.full_slots = Rational(period, total).ceil();
    r.latency = Rational(r.slots) * Rational(omega) / beta;
    r.inputs = {{"T_C", std::to_string(period)}, {"windows", join(windows)}, {"omega", std::to_string(omega)},
                {"beta", beta.str()}};
    return r;
}

BoundReport latency_with_redundancy(std::int64_t redundancy, Tick period, std::span<const Tick> windows, Tick omega,
                                    const Rational& beta) {
    if (redundancy < 1) throw DomainError("redundancy Q must be at least 1");
    const Tick total = sum_windows(windows);
    if (period <= 0) throw DomainError("period must be positive");
    require_unit_interval(beta, "beta");
    BoundReport r;
    r.formula = Formula::redundancy;
    r.slots = Rational(redundancy * period, total).ceil();
    r.latency = Rational(r.slots) * Rational(omega) / beta;
    r.inputs = {{"Q", std::to_string(redundancy)}, {"T_C", std::to_string(period)}, {"windows", join(windows)},
                {"omega", std::to_string(omega)}, {"beta", beta.str()}};
    return r;
}

double collision_probability(double beta, std::int64_t devices) {
    if (devices < 2) throw DomainError("at least two devices are required");
    // -expm1 keeps full precision for small exponents.
    return -std::expm1(-2.0 * static_cast<double>(devices - 2) * beta);
}

double failure_rate(double beta, const RedundancyParams& params) {
    if (params.S < 2) throw DomainError("S must be at least 2");
    if (params.Q < 0) throw DomainError("Q must be non-negative");
    if (params.q < 0.0 || params.q > 1.0) throw DomainError("q must lie in [0, 1]");
    if (beta < 0.0 || beta > 1.0) throw DomainError("beta must lie in [0, 1]");
    const double pc = collision_probability(beta, params.S);
    const double base = std::pow(pc, static_cast<double>(params.Q));
    return (1.0 - params.q) * base + params.q * base * pc;
}

BetaSolution beta_for_failure_rate(double P_f, std::int64_t Q, std::int64_t S, double beta_cap) {
    if (S <= 2) throw DomainError("with S <= 2 there are no interferers and beta is unconstrained");
    if (Q < 1) throw DomainError("Q must be at least 1");
    if (!(P_f > 0.0) || P_f >= 1.0) throw DomainError("P_f must lie in (0, 1)");
    BetaSolution s;
    s.P_c = std::pow(P_f, 1.0 / static_cast<double>(Q));
    s.beta = -std::log1p(-s.P_c) / (2.0 * static_cast<double>(S - 2));
    if (!(s.beta <= beta_cap)) {
        throw DomainError("required beta " + fmt(s.beta) + " exceeds the cap " + fmt(beta_cap));
    }
    return s;
}

BetaSolution beta_for_failure_rate_bisect(double P_f, std::int64_t Q, double q, std::int64_t S) {
    if (S <= 2) throw DomainError("with S <= 2 there are no interferers and beta is unconstrained");
    if (Q < 1) throw DomainError("Q must be at least 1");
    if (!(P_f > 0.0) || P_f >= 1.0) throw DomainError("P_f must lie in (0, 1)");
    const RedundancyParams params{Q, q, S, P_f, 0.0};
    double lo = 0.0;
    double hi = 1.0;
    if (failure_rate(hi, params) < P_f) throw DomainError("P_f not reachable with beta <= 1");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (failure_rate(mid, params) < P_f ? lo : hi) = mid;
    }
    BetaSolution s;
    s.beta = 0.5 * (lo + hi);
    s.P_c = collision_probability(s.beta, S);
    return s;
}

RedundancyPlan optimize_redundancy(Tick omega, const Rational& alpha, const Rational& eta, double P_f,
                                   std::int64_t S, std::int64_t Q_max) {
    if (S < 3) throw DomainError("the optimiser needs S >= 3");
    if (eta <= Rational{0} || eta >= Rational{1}) throw DomainError("eta must lie in (0, 1)");
    if (Q_max < 1) throw DomainError("Q_max must be at least 1");
    if (alpha <= Rational{0}) throw DomainError("alpha must be positive");

    const double a = alpha.to_double();
    const double e = eta.to_double();
    RedundancyPlan plan;
    std::vector<std::string> reasons;
    for (std::int64_t Q = 1; Q <= Q_max; ++Q) {
        RedundancyRow row;
        row.Q = Q;
        try {
            const auto sol = beta_for_failure_rate(P_f, Q, S);
            row.beta = sol.beta;
            row.P_c = sol.P_c;
        } catch (const DomainError& err) {
            row.reason = err.what();
            reasons.push_back("Q=" + std::to_string(Q) + ": " + row.reason);
            plan.table.push_back(row);
            continue;
        }
        if (!(a * row.beta < e)) {
            row.reason = "alpha*beta=" + fmt(a * row.beta) + " >= eta=" + fmt(e);
            reasons.push_back("Q=" + std::to_string(Q) + ": " + row.reason);
            plan.table.push_back(row);
            continue;
        }
        row.feasible = true;
        row.gamma = e - a * row.beta;
        row.slots = static_cast<std::int64_t>(std::ceil(static_cast<double>(Q) / row.gamma));
        row.latency = static_cast<double>(row.slots) * static_cast<double>(omega) / row.beta;
        if (plan.Q == 0 || row.latency < plan.latency) {
            plan.Q = Q;
            plan.beta = row.beta;
            plan.gamma = row.gamma;
            plan.latency = row.latency;
        }
        plan.table.push_back(row);
    }
    if (plan.Q == 0) throw InfeasibleError("no redundancy level fits the duty-cycle budget", reasons);
    return plan;
}

}  // namespace ndkit
