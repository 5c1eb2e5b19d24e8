#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ndkit/cli.hpp"
#include "ndkit/spec_io.hpp"

namespace {

std::string data(const char* name) { return std::string(NDKIT_TEST_DATA) + "/" + name; }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = ndkit::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("verify reports a tiling schedule") {
    const auto r = run({"verify", data("tiling5.json")});
    CHECK(r.code == 0);
    CHECK(has(r.out, "deterministic, disjoint, M=5"));
    CHECK(has(r.out, "worst case     10 ticks"));
}

TEST_CASE("verify lists the offsets a truncated sequence misses") {
    const auto r = run({"verify", data("tiling3.json")});
    CHECK(r.code == 2);
    CHECK(has(r.out, "NOT deterministic"));
    CHECK(has(r.out, "[2,6)"));
    CHECK(has(r.out, "uncovered ticks 2 3 4 5"));
}

TEST_CASE("verify on an aperiodic generator") {
    CHECK(run({"verify", data("alternating.json")}).code == 1);
    const auto r = run({"verify", data("alternating.json"), "--horizon", "1600"});
    CHECK(r.code == 0);
    CHECK(has(r.out, "deterministic, aperiodic, M=4"));
    CHECK(run({"verify", data("alternating.json"), "--horizon", "1600", "-M", "3"}).code == 2);
}

TEST_CASE("verify compares the sweep with the closed form") {
    const auto r = run({"verify", data("optimal5.json"), "--csv"});
    CHECK(r.code == 0);
    CHECK(has(r.out, "worst_ticks,101\n"));
    CHECK(has(r.out, "bound_ticks,100\n"));
    CHECK(has(r.out, "within_omega_plus_one,true\n"));
    const auto coarse = run({"verify", data("sparse.json"), "--resolution", "50", "--csv"});
    CHECK(coarse.code == 0);
    CHECK(has(coarse.out, "sweep_resolution,50\n"));
}

TEST_CASE("bounds formulas") {
    const auto me = run({"bounds", "--formula", "mutual-exclusive", "--omega", "36", "--eta", "1/20", "--csv"});
    CHECK(me.code == 0);
    CHECK(has(me.out, ",28800,0.0288"));

    const auto uni = run({"bounds", "--formula", "unidirectional", "--omega", "36", "--beta", "1/50", "--gamma", "1/50"});
    CHECK(uni.code == 0);
    CHECK(has(uni.out, "90000 ticks = 0.09 s"));

    const auto ov = run({"bounds", "--formula", "unidirectional-overheads", "--omega", "1000", "--beta", "1/25",
                         "--gamma", "3/25", "--d-otx", "1000", "--d-orx", "2000", "--windows", "10000"});
    CHECK(ov.code == 0);
    CHECK(has(ov.out, "L        500000 ticks"));

    const auto half = run({"bounds", "--formula", "half-coverage", "--period", "1000", "--windows", "10", "--omega",
                           "1", "--beta", "1/100"});
    CHECK(half.code == 0);
    CHECK(has(half.out, "slots=50;full_slots=100"));

    const auto pf = run({"bounds", "--formula", "beta-for-pf", "--pf", "0.0001", "-Q", "3", "-S", "3", "--csv"});
    CHECK(pf.code == 0);
    CHECK(has(pf.out, "beta-for-pf"));

    CHECK(run({"bounds", "--formula", "unidirectional", "--omega", "36"}).code == 1);
    CHECK(run({"bounds", "--formula", "nope"}).code == 1);
    CHECK(run({"bounds", "--formula", "unidirectional", "--omega", "1", "--beta", "0", "--gamma", "1/2"}).code == 1);
}

TEST_CASE("bounds reads parameters from a spec") {
    const auto r = run({"bounds", "--spec", data("optimal5.json"), "--formula", "unidirectional"});
    CHECK(r.code == 0);
    CHECK(has(r.out, "L        100 ticks"));
}

TEST_CASE("usage and input errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"verify", data("tiling5.json"), "--bogus"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    const auto overlap = run({"verify", data("overlap.json")});
    CHECK(overlap.code == 1);
    CHECK(has(overlap.err, "invalid schedule"));
    const auto bad = run({"coverage", data("malformed.json")});
    CHECK(bad.code == 1);
    CHECK(has(bad.err, "malformed.json:4:1: malformed document"));
    CHECK(run({"verify", data("missing.json")}).code == 1);
    CHECK(run({"--help"}).code == 0);
    const auto version = run({"--version"});
    CHECK(version.code == 0);
    CHECK(has(version.out, "0.1.0"));
}

TEST_CASE("every verb runs") {
    const std::vector<std::vector<std::string>> cmds{
        {"coverage", data("tiling5.json")},
        {"coverage", data("alternating.json"), "--horizon", "1600"},
        {"simulate", data("sparse.json"), "-S", "3", "--trials", "200", "--seed", "1"},
        {"simulate", data("tiling5.json"), "--phase", "4"},
        {"simulate", data("tiling5.json"), "--phase", "random", "--seed", "3"},
        {"optimize-q", "--omega", "36", "--eta", "0.05", "--pf", "0.0001"},
        {"correlated", "zetas", data("quadruple.json")},
        {"correlated", "build", data("quadruple.json"), "--zeta", "4"},
        {"correlated", "verify", data("quadruple.json"), "--zeta", "4"},
        {"correlated", "latency", data("quadruple.json"), "--zeta", "4"},
        {"correlated", "assist", data("quadruple.json"), "--zeta", "4"},
        {"correlated", "mirror", data("quadruple.json"), "--zeta", "4", "--phase", "1"},
        {"lpl-dual", data("optimal5.json")},
    };
    for (const auto& c : cmds) {
        CAPTURE(c[0]);
        CAPTURE(c[1]);
        const auto r = run(c);
        CHECK(r.code == 0);
        CHECK_FALSE(r.out.empty());
        CHECK(r.err.empty());
    }
}

TEST_CASE("correlated verb outcomes") {
    const auto build = run({"correlated", "build", data("quadruple.json"), "--zeta", "4", "--csv"});
    CHECK(has(build.out, "offset\n0\n4\n"));
    const auto zetas = run({"correlated", "zetas", data("quadruple.json"), "--csv"});
    CHECK(has(zetas.out, "zeta\n0\n2\n4\n6\n"));
    const auto fail = run({"correlated", "build", data("quadruple.json"), "--zeta", "3"});
    CHECK(fail.code == 2);
    const auto partial = run({"correlated", "verify", data("quadruple.json"), "--zeta", "4", "--beacons", "4"});
    CHECK(partial.code == 2);
    CHECK(has(partial.out, "[2,6)"));
    CHECK(run({"correlated", "build", data("quadruple.json")}).code == 1);
    const auto mirror = run({"correlated", "mirror", data("quadruple.json"), "--zeta", "4", "--phase", "1", "--csv"});
    CHECK(has(mirror.out, "4,1,8,7\n"));
}

TEST_CASE("pairwise simulation without discovery exits 2") {
    const auto gappy = run({"simulate", data("tiling3.json"), "--phase", "2"});
    CHECK(gappy.code == 2);
    CHECK(has(gappy.out, "no beacon received"));
    const auto ok = run({"simulate", data("tiling5.json"), "--phase", "4", "--csv"});
    CHECK(has(ok.out, "4,true,3,10,"));
    CHECK(run({"simulate", data("sparse.json"), "--phase", "4000", "--horizon", "500"}).code == 1);
}

TEST_CASE("optimize-q reports an empty budget") {
    const auto r = run({"optimize-q", "--omega", "36", "--eta", "1/100000", "--pf", "0.0001"});
    CHECK(r.code == 2);
    CHECK(has(r.out, "no feasible Q"));
}

TEST_CASE("lpl-dual emits a parseable involution") {
    const auto once = run({"lpl-dual", data("optimal5.json"), "--csv"});
    REQUIRE(once.code == 0);
    const auto dual = ndkit::parse_spec_text(once.out);
    const auto original = ndkit::parse_spec(data("optimal5.json"));
    CHECK(ndkit::lpl_dualize(dual) == original);
}

TEST_CASE("machine output carries provenance and is reproducible") {
    const auto tmp = std::filesystem::temp_directory_path() / "ndkit_cli_out.csv";
    const std::vector<std::string> base{"simulate", data("sparse.json"), "-S", "4", "--trials", "300", "--seed", "42"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return run(args);
    };
    const auto a = with({"--csv", "--workers", "1"});
    const auto b = with({"--csv", "--workers", "4"});
    const auto c = with({"--csv", "--workers", "4"});
    CHECK(a.out == b.out);
    CHECK(b.out == c.out);
    CHECK(a.out.rfind("# ndkit 0.1.0\n# verb: simulate\n# seed: 42\n# input: ", 0) == 0);
    CHECK(has(a.out, "fnv1a64=" + ndkit::fnv1a_hex(ndkit::read_file(data("sparse.json")))));
    CHECK_FALSE(has(a.out, "workers"));

    const auto d = with({"--out", tmp.string()});
    CHECK(d.code == 0);
    CHECK(ndkit::read_file(tmp.string()) == a.out);
    std::filesystem::remove(tmp);

    const auto v1 = run({"verify", data("optimal5.json"), "--csv", "--workers", "1"});
    const auto v3 = run({"verify", data("optimal5.json"), "--csv", "--workers", "3"});
    CHECK(v1.out == v3.out);
}

TEST_CASE("verb registry reaches the public operations") {
    std::set<std::string> reached;
    for (const auto& [verb, ops] : ndkit::cli::verb_operations()) reached.insert(ops.begin(), ops.end());
    for (const char* op :
         {"parse_spec", "emit_spec", "validate_schedule", "transmit_duty_cycle", "reception_duty_cycle",
          "combined_duty_cycle", "period_duty_cycle", "lpl_dualize", "coverage_map", "check_deterministic",
          "check_disjoint", "min_beacons", "worst_case_latency", "aperiodic_coverage_check", "write_coverage_csv",
          "bound_unidirectional", "bound_unidirectional_overheads", "bound_mutual_exclusive", "bound_half_coverage",
          "latency_with_redundancy", "collision_probability", "failure_rate", "beta_for_failure_rate",
          "beta_for_failure_rate_bisect", "optimize_redundancy", "simulate_pairwise", "simulate_network",
          "latency_quantile", "mirror_offset", "feasible_zetas", "build_correlated_quadruple",
          "verify_mutual_exclusive", "one_way_latency_correlated", "simulate_mutual_assistance",
          "write_coverage_union_csv"}) {
        CAPTURE(op);
        CHECK(reached.count(op) == 1);
    }
    const std::set<std::string> verbs{"bounds", "coverage", "verify", "simulate", "optimize-q", "correlated", "lpl-dual"};
    for (const auto& [verb, _] : ndkit::cli::verb_operations()) CHECK(verbs.count(verb) == 1);
}
