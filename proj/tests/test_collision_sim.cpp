#include <doctest.h>

#include "fixtures.hpp"
#include "ndkit/bounds.hpp"
#include "ndkit/collision_sim.hpp"
#include "ndkit/errors.hpp"

using namespace ndkit;

namespace {

/// omega = 20 every 1000 ticks against a 1000-tick window in T_C = 5000.
ProtocolSpec sparse() { return fixtures::spec({20}, {1000}, 5000, {{0, 1000}}); }

SimConfig config(std::int64_t S, std::uint64_t trials, std::uint64_t seed = 42) {
    SimConfig c;
    c.specs = {sparse()};
    c.devices = S;
    c.trials = trials;
    c.horizon = 6000;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("pairwise discovery at a fixed phase") {
    const auto s = fixtures::tiling();
    const auto ev = simulate_pairwise(s, s, 0, 100);
    REQUIRE(ev.has_value());
    CHECK(ev->beacon == 0);
    CHECK(ev->time == 0);

    const auto later = simulate_pairwise(s, s, 4, 100);
    REQUIRE(later.has_value());
    // Starts 4, 6, 8, 10: the fourth beacon is the first inside [10, 12).
    CHECK(later->beacon == 3);
    CHECK(later->time == 10);

    const auto gappy = fixtures::spec({0, 0, 0}, {2, 2, 16}, 10, {{0, 2}});
    CHECK_FALSE(simulate_pairwise(gappy, gappy, 2, 1000).has_value());

    const auto always = fixtures::spec({3}, {17}, 10, {{0, 10}});
    for (Tick phase = 0; phase < 20; ++phase) {
        const auto e = simulate_pairwise(always, always, phase, 100);
        REQUIRE(e.has_value());
        CHECK(e->beacon == 0);
        CHECK(e->time - phase <= 17 + 3);
    }
    CHECK_THROWS_AS(simulate_pairwise(s, s, 0, 5), DomainError);
}

TEST_CASE("pairwise discovery at a random phase") {
    const auto s = fixtures::tiling();
    auto a = SplitMix64::stream(3, 0);
    auto b = SplitMix64::stream(3, 0);
    for (int i = 0; i < 50; ++i) {
        const auto x = simulate_pairwise(s, s, a, 100);
        const auto y = simulate_pairwise(s, s, b, 100);
        REQUIRE(x.has_value());
        CHECK(x == y);
        CHECK(x->phase >= 0);
        CHECK(x->phase < 10);
    }
}

TEST_CASE("rng streams") {
    auto r = SplitMix64::stream(1, 2);
    auto same = SplitMix64::stream(1, 2);
    auto other = SplitMix64::stream(1, 3);
    CHECK(r.next() == same.next());
    CHECK(r.next() != other.next());
    std::vector<int> hist(7, 0);
    auto g = SplitMix64(9);
    for (int i = 0; i < 70000; ++i) ++hist[g.below(7)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("two devices never collide") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 12345ULL}) {
        const auto r = simulate_network(config(2, 10000, seed));
        CHECK(r.collided_beacons == 0);
        CHECK(r.empirical_collision_rate == 0.0);
        CHECK(r.empirical_failure_rate == 0.0);
        CHECK(r.discovered_within_horizon == 1.0);
        CHECK(r.analytic_P_c == 0.0);
    }
}

TEST_CASE("results do not depend on the worker count") {
    auto c = config(4, 3000, 7);
    c.workers = 1;
    const auto a = simulate_network(c);
    c.workers = 5;
    const auto b = simulate_network(c);
    CHECK(a.collided_beacons == b.collided_beacons);
    CHECK(a.focus_beacons == b.focus_beacons);
    CHECK(a.sorted_latencies == b.sorted_latencies);
    CHECK(a.latency_quantiles == b.latency_quantiles);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].phases == b.trials[i].phases);
        CHECK(a.trials[i].latency == b.trials[i].latency);
    }
}

TEST_CASE("collision rate tracks the analytic model") {
    const auto r = simulate_network(config(3, 20000, 42));
    CHECK(r.analytic_P_c == doctest::Approx(collision_probability(0.02, 3)));
    CHECK(std::abs(r.empirical_collision_rate - r.analytic_P_c) / r.analytic_P_c < 0.15);
}

TEST_CASE("failures never exceed trials with Q destroyed covering beacons") {
    // Coverage multiplicity 1 everywhere, and the target equals the worst case,
    // so each trial has at least one in-time hit.
    auto c = config(6, 5000, 3);
    c.specs = {fixtures::spec({100}, {1000}, 5000, {{0, 1000}})};
    c.latency_target = 5100;
    const auto r = simulate_network(c);
    CHECK(r.empirical_failure_rate > 0.0);
    CHECK(r.empirical_failure_rate <= r.fraction_with_destroyed_hits(1));
}

TEST_CASE("latency quantiles") {
    const auto s = fixtures::tiling();
    SimConfig c;
    c.specs = {s};
    c.devices = 2;
    c.trials = 2000;
    c.horizon = 100;
    c.quantiles = {0.25, 0.5, 1.0};
    const auto r = simulate_network(c);
    const auto sweep = worst_case_latency(s, s);
    CHECK(latency_quantile(r, 1.0) <= sweep.worst);
    CHECK(r.latency_quantiles.size() == 3);
    CHECK(r.latency_quantiles[0].second <= r.latency_quantiles[1].second);
    CHECK(r.latency_quantiles[1].second <= r.latency_quantiles[2].second);
    CHECK_THROWS_AS(latency_quantile(r, 0.0), DomainError);
    CHECK_THROWS_AS(latency_quantile(r, 1.5), DomainError);

    SimResult flat;
    flat.sorted_latencies = std::vector<Tick>(10, 77);
    CHECK(latency_quantile(flat, 0.3) == 77);
    CHECK(latency_quantile(flat, 1.0) == 77);

    SimResult partial;
    partial.sorted_latencies = {5, 6, 7, kInfiniteTick};
    CHECK(latency_quantile(partial, 0.75) == 7);
    CHECK(latency_quantile(partial, 0.8) == kInfiniteTick);
}

TEST_CASE("network configuration errors") {
    auto c = config(1, 10);
    CHECK_THROWS_AS(simulate_network(c), DomainError);
    c = config(3, 10);
    c.horizon = 100;
    CHECK_THROWS_AS(simulate_network(c), DomainError);
    c = config(3, 10);
    c.sender = 0;
    CHECK_THROWS_AS(simulate_network(c), DomainError);
    c = config(3, 10);
    c.specs = {sparse(), sparse()};
    CHECK_THROWS_AS(simulate_network(c), DomainError);
}
