#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ndkit/schedule.hpp"

namespace ndkit {

enum class Formula {
    unidirectional,           // L = w / (beta gamma)
    unidirectional_overheads, // L = 1/gamma (1 + n_C d_oRx / sum d) (w + d_oTx) / beta
    mutual_exclusive,         // min over ceil/floor of 1/eta
    half_coverage,            // L = ceil(T_C / (2 sum d)) w / beta
    redundancy,               // L = ceil(Q T_C / sum d) w / beta
};

std::string_view formula_id(Formula f);

/// A closed-form latency with the inputs that produced it.
struct BoundReport {
    Formula formula{Formula::unidirectional};
    /// Latency in ticks, exact.
    Rational latency;
    std::vector<std::pair<std::string, std::string>> inputs;
    /// Beacon-slot count used by the counting formulas (0 when not applicable).
    std::int64_t slots{0};
    /// half_coverage: the full-coverage count ceil(T_C / sum d) for comparison.
    std::int64_t full_slots{0};
    /// mutual_exclusive: "ceil", "floor" or "both".
    std::string branch;

    [[nodiscard]] double seconds(const Rational& tick_us = Rational{1}) const {
        return (latency * tick_us).to_double() * 1e-6;
    }
};

BoundReport bound_unidirectional(Tick omega, const Rational& beta, const Rational& gamma);

BoundReport bound_unidirectional_overheads(Tick omega, const Rational& beta, const Rational& gamma,
                                           const RadioOverheads& overheads, std::span<const Tick> windows);

BoundReport bound_mutual_exclusive(Tick omega, const Rational& alpha, const Rational& eta);

BoundReport bound_half_coverage(Tick period, std::span<const Tick> windows, Tick omega, const Rational& beta);

BoundReport latency_with_redundancy(std::int64_t redundancy, Tick period, std::span<const Tick> windows, Tick omega,
                                    const Rational& beta);

/// Collision model parameters. P_c is filled in by the solvers.
struct RedundancyParams {
    std::int64_t Q{1};
    double q{0.0};
    std::int64_t S{2};
    double P_f{0.0};
    double P_c{0.0};
};

/// 1 - exp(-2 (S - 2) beta).
double collision_probability(double beta, std::int64_t devices);

/// P_f = (1 - q) P_c^Q + q P_c^(Q + 1).
double failure_rate(double beta, const RedundancyParams& params);

struct BetaSolution {
    double beta{0.0};
    double P_c{0.0};
};

inline constexpr double kDefaultBetaCap = 1.0;

/// Closed-form inversion for q = 0: P_c = P_f^(1/Q), beta = -ln(1 - P_c) / (2 (S - 2)).
BetaSolution beta_for_failure_rate(double P_f, std::int64_t Q, std::int64_t S, double beta_cap = kDefaultBetaCap);

/// Bisection on beta in [0, 1] for any q, to 1e-12.
BetaSolution beta_for_failure_rate_bisect(double P_f, std::int64_t Q, double q, std::int64_t S);

struct RedundancyRow {
    std::int64_t Q{0};
    double P_c{0.0};
    double beta{0.0};
    bool feasible{false};
    double gamma{0.0};
    std::int64_t slots{0};
    /// Ticks.
    double latency{0.0};
    std::string reason;
};

struct RedundancyPlan {
    std::int64_t Q{0};
    double beta{0.0};
    double gamma{0.0};
    double latency{0.0};
    std::vector<RedundancyRow> table;
};

/// For Q = 1..Q_max: beta_Q from the q = 0 inversion, feasible iff
/// alpha beta_Q < eta, gamma_Q = eta - alpha beta_Q and
/// L_Q = ceil(Q / gamma_Q) w / beta_Q. Returns the feasible minimum (smaller Q
/// wins ties) together with the whole table.
RedundancyPlan optimize_redundancy(Tick omega, const Rational& alpha, const Rational& eta, double P_f,
                                   std::int64_t S, std::int64_t Q_max);

}  // namespace ndkit
