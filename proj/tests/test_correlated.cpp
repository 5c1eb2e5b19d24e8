#include <doctest.h>

#include <random>
#include <sstream>

#include "ndkit/bounds.hpp"
#include "ndkit/correlated.hpp"
#include "ndkit/errors.hpp"
#include "oracle.hpp"

using namespace ndkit;

namespace {

ReceptionSchedule small_template() { return ReceptionSchedule::make_periodic(8, {{0, 2}}); }

oracle::Pair pair_of(const CorrelatedQuadruple& q) {
    std::vector<oracle::Win> ws;
    for (const auto& w : q.reception.windows) ws.push_back({w.offset, w.duration});
    return {q.period(), ws, q.beacon_offsets, q.anchor() + q.zeta};
}

/// Worst direct discovery latency from the half-tick oracle, rounded up.
Tick oracle_latency(const CorrelatedQuadruple& q) {
    const auto p = pair_of(q);
    double worst = 0.0;
    for (Tick n = 0; n < q.period(); ++n) {
        for (Tick c = 0; c < q.period(); ++c) {
            const double end = p.first_discovery(n, static_cast<double>(c), q.omega);
            REQUIRE(end >= 0.0);
            worst = std::max(worst, end - static_cast<double>(c));
        }
    }
    return static_cast<Tick>(std::ceil(worst));
}

}  // namespace

TEST_CASE("mirror offset") {
    CHECK(mirror_offset(10, 4, 100) == 16);
    CHECK(mirror_offset(37, 37, 100) == 37);
    CHECK(mirror_offset(10, 30, 25) == 15);
    CHECK_THROWS_AS(mirror_offset(1, 1, 0), DomainError);

    std::mt19937_64 gen(77);
    for (int i = 0; i < 10000; ++i) {
        const Tick T = static_cast<Tick>(gen() % 100000) + 1;
        const Tick zeta = static_cast<Tick>(gen() % static_cast<std::uint64_t>(T));
        const Tick phi = static_cast<Tick>(gen() % static_cast<std::uint64_t>(T));
        CHECK(mirror_offset(zeta, mirror_offset(zeta, phi, T), T) == phi);
    }
}

TEST_CASE("small quadruple halves the beacon count") {
    const auto q = build_correlated_quadruple(small_template(), 4);
    CHECK(q.beacon_offsets == std::vector<Tick>{0, 4});
    const auto v = verify_mutual_exclusive(q);
    CHECK(v.covered);
    CHECK(v.uncovered.empty());
    CHECK(v.beacons_per_device == 2);
    CHECK(v.disjoint);
    CHECK(v.covered_by_f == 4);
    CHECK(v.covered_by_e == 4);
    CHECK(v.covered_by_f + v.covered_by_e == 8);

    const auto p = pair_of(q);
    for (Tick n = 0; n < 8; ++n) CHECK(static_cast<int>(v.cells[static_cast<std::size_t>(n)]) == p.cell(n));

    CHECK(direct_quadruple(small_template(), 4).beacon_offsets.size() == 4);
    CHECK(min_beacons(reception_duty_cycle(small_template())) == 4);
}

TEST_CASE("removing a beacon leaves a residual") {
    auto q = build_correlated_quadruple(small_template(), 4);
    q.beacon_offsets = {4};  // keep the correlated beacon only
    const auto v = verify_mutual_exclusive(q);
    CHECK_FALSE(v.covered);
    CHECK(v.beacons_per_device == 1);
    // Derived from the oracle's cell classification.
    const auto p = pair_of(q);
    std::vector<TickRange> expected;
    for (Tick n = 0; n < 8; ++n) {
        if (p.cell(n) != 0) continue;
        if (!expected.empty() && expected.back().end == n) {
            ++expected.back().end;
        } else {
            expected.push_back({n, n + 1});
        }
    }
    CHECK(v.uncovered == expected);
    CHECK(v.uncovered == std::vector<TickRange>{{2, 6}});
    CHECK_THROWS_AS(one_way_latency_correlated(q), DomainError);
}

TEST_CASE("always listening needs one beacon") {
    const auto r = ReceptionSchedule::make_periodic(8, {{0, 8}});
    for (Tick zeta = 0; zeta < 8; ++zeta) {
        const auto q = build_correlated_quadruple(r, zeta, ReceptionPredicate::point, 1);
        CHECK(q.beacon_offsets.size() == 1);
        CHECK(verify_mutual_exclusive(q).covered);
        CHECK(one_way_latency_correlated(q) <= 8 + 1);
    }
}

TEST_CASE("odd zeta has no plan on the small template") {
    const auto zetas = feasible_zetas(small_template());
    CHECK(zetas == std::vector<Tick>{0, 2, 4, 6});
    try {
        build_correlated_quadruple(small_template(), 3);
        FAIL("expected ConstructionError");
    } catch (const ConstructionError& e) {
        CHECK_FALSE(e.residual.empty());
    }
    CHECK_THROWS_AS(build_correlated_quadruple(small_template(), 8), DomainError);
    CHECK_THROWS_AS(build_correlated_quadruple(ReceptionSchedule::make_periodic(10, {{0, 3}}), 0), DomainError);
}

TEST_CASE("one-way latency of the small quadruple") {
    const auto q = build_correlated_quadruple(small_template(), 4, ReceptionPredicate::point, 1);
    const Tick measured = one_way_latency_correlated(q);
    CHECK(measured == oracle_latency(q));
    const std::vector<Tick> d{2};
    const auto bound = bound_half_coverage(8, d, 1, q.beta());
    CHECK(bound.latency == Rational(8));
    CHECK(Rational(measured) - bound.latency <= Rational(2));
    CHECK(bound.latency - Rational(measured) <= Rational(2));

    const auto direct = direct_quadruple(small_template(), 4, ReceptionPredicate::point, 1);
    CHECK(verify_mutual_exclusive(direct).covered);
    CHECK(one_way_latency_correlated(direct) <= measured);
}

TEST_CASE("halving on even tilings") {
    for (Tick M : {2, 4, 6, 8}) {
        for (Tick d : {1, 2, 3}) {
            const auto r = ReceptionSchedule::make_periodic(M * d, {{0, d}});
            const auto zetas = feasible_zetas(r);
            CHECK_FALSE(zetas.empty());
            for (Tick zeta : zetas) {
                const auto q = build_correlated_quadruple(r, zeta);
                CHECK(static_cast<Tick>(q.beacon_offsets.size()) == M / 2);
                const auto v = verify_mutual_exclusive(q);
                CHECK(v.covered);
                CHECK(v.disjoint);
                CHECK(v.covered_by_f + v.covered_by_e - v.covered_by_both == M * d);
                const auto p = pair_of(q);
                for (Tick n = 0; n < r.period; ++n) {
                    CHECK(static_cast<int>(v.cells[static_cast<std::size_t>(n)]) == p.cell(n));
                }
            }
        }
    }
}

TEST_CASE("mutual assistance") {
    SUBCASE("penalty stays within one period on the small quadruple") {
        const auto q = build_correlated_quadruple(small_template(), 4, ReceptionPredicate::point, 1);
        Rational best{100};
        for (Tick phi = 0; phi < 8; ++phi) {
            for (Tick contact = 0; contact < 8; ++contact) {
                const auto out = simulate_mutual_assistance(q, phi, contact);
                CHECK(out.two_way >= out.one_way);
                CHECK(out.penalty() <= Rational(8));
                best = std::min(best, out.penalty());
            }
        }
        CHECK(best <= Rational(1));
    }
    SUBCASE("two windows per period shorten the worst penalty") {
        const auto r = ReceptionSchedule::make_periodic(8, {{0, 1}, {4, 1}});
        const auto zetas = feasible_zetas(r, ReceptionPredicate::point, 1);
        REQUIRE_FALSE(zetas.empty());
        const auto q = build_correlated_quadruple(r, zetas.front(), ReceptionPredicate::point, 1);
        Rational worst{0};
        for (Tick phi = 0; phi < 8; ++phi) {
            worst = std::max(worst, simulate_mutual_assistance(q, phi).penalty());
        }
        CHECK(worst < Rational(8));
    }
    SUBCASE("direction and values on a traced phase") {
        const auto q = build_correlated_quadruple(small_template(), 4, ReceptionPredicate::point, 1);
        const auto v = verify_mutual_exclusive(q);
        for (Tick phi = 0; phi < 8; ++phi) {
            const auto out = simulate_mutual_assistance(q, phi);
            if (v.cells[static_cast<std::size_t>(phi)] == kByF) CHECK(out.first != Direction::e_to_f);
            if (v.cells[static_cast<std::size_t>(phi)] == kByE) CHECK(out.first != Direction::f_to_e);
        }
    }
}

TEST_CASE("coverage union csv") {
    const auto q = build_correlated_quadruple(small_template(), 4);
    std::ostringstream os;
    write_coverage_union_csv(os, verify_mutual_exclusive(q));
    CHECK(os.str().find("tick,covered_by\n0,F\n1,F\n2,E\n3,E\n4,F\n") != std::string::npos);
}
