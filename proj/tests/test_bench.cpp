#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "httplib.h"

#include "accel/bench.hpp"
#include "accel/fuzz.hpp"
#include "accel/loadgen.hpp"
#include "accel/mock.hpp"

using namespace accel;

TEST_CASE("the mock serves its fixtures") {
    bench::MockServer mock(bench::MockConfig{0, 0});
    mock.start();
    httplib::Client client(mock.base_url());

    auto passwords = client.Get("/passwords.json");
    REQUIRE(passwords);
    CHECK(interp::Json::parse(passwords->body)["alice"] == "correct-horse");

    auto upload = client.Post("/upload", "0123456789", "application/json");
    REQUIRE(upload);
    auto parsed = interp::Json::parse(upload->body);
    CHECK(parsed["ok"] == true);
    CHECK(parsed["length"] == 10);

    auto missing = client.Get("/nothing-here");
    REQUIRE(missing);
    CHECK(missing->status == 404);
}

TEST_CASE("replaying a banking transaction leaves the store unchanged") {
    bench::MockServer mock(bench::MockConfig{0, 0});
    mock.start();
    httplib::Client client(mock.base_url());

    interp::Json commit = {{"account", "checking"}, {"balance", 1100},
                           {"baseVersion", 0},      {"txn", "t-1"}};
    auto first = client.Post("/datastore/commit", commit.dump(), "application/json");
    REQUIRE(first);
    auto r1 = interp::Json::parse(first->body);
    CHECK(r1["committed"] == true);
    CHECK(mock.banking_account("checking")["balance"] == 1100);
    CHECK(mock.banking_account("checking")["version"] == 1);

    // Same transaction id again: same response, no further effect.
    auto second = client.Post("/datastore/commit", commit.dump(), "application/json");
    REQUIRE(second);
    CHECK(interp::Json::parse(second->body) == r1);
    CHECK(mock.banking_account("checking")["balance"] == 1100);
    CHECK(mock.banking_account("checking")["version"] == 1);

    // A conflicting commit with a fresh txn is rejected by the version check.
    interp::Json stale = {{"account", "checking"}, {"balance", 2000},
                          {"baseVersion", 0},      {"txn", "t-2"}};
    auto third = client.Post("/datastore/commit", stale.dump(), "application/json");
    REQUIRE(third);
    CHECK(interp::Json::parse(third->body)["committed"] == false);
    CHECK(mock.banking_account("checking")["balance"] == 1100);
}

TEST_CASE("request generators are deterministic per seed") {
    for (const auto& def : bench::benchmarks()) {
        CAPTURE(def.name);
        std::mt19937_64 a(42), b(42), c2(43);
        bool all_same = true, any_diff = false;
        for (int i = 0; i < 20; i++) {
            auto x = def.generate(a), y = def.generate(b), z = def.generate(c2);
            if (x != y) all_same = false;
            if (x != z) any_diff = true;
        }
        CHECK(all_same);
        CHECK(any_diff);
    }
}

TEST_CASE("the maze BFS oracle is symmetric and grounded") {
    auto oracle = bench::benchmark("maze").make_oracle();
    interp::Json fwd = {{"sr", 1}, {"sc", 1}, {"tr", 1}, {"tc", 1}};
    CHECK(oracle->expect(fwd) == "{\"dist\":0}");
    interp::Json one = {{"sr", 1}, {"sc", 1}, {"tr", 1}, {"tc", 2}};
    CHECK(oracle->expect(one) == "{\"dist\":1}");
    // Distance is symmetric under swapping start and goal.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10; i++) {
        interp::Json req = bench::benchmark("maze").generate(rng);
        interp::Json rev = {{"sr", req["tr"]}, {"sc", req["tc"]},
                            {"tr", req["sr"]}, {"tc", req["sc"]}};
        CHECK(oracle->expect(req) == oracle->expect(rev));
    }
}

TEST_CASE("the autocomplete oracle agrees with a hand check") {
    auto oracle = bench::benchmark("autocomplete").make_oracle();
    interp::Json req = {{"prefix", "band"}, {"limit", 10}};
    auto expected = interp::Json::parse(oracle->expect(req));
    CHECK(expected["count"] == 2);  // band, bandage
    CHECK(expected["matches"][0] == "band");
    CHECK(expected["matches"][1] == "bandage");
}

TEST_CASE("equivalence fuzz: authorize and maze at small scale") {
    invoker::InvokerConfig cfg;
    cfg.trace_after = 15;
    for (const char* name : {"authorize", "maze"}) {
        CAPTURE(name);
        auto result = bench::equivalence_fuzz(bench::benchmark(name), 40, 17, cfg);
        INFO(result.first_divergence);
        CHECK(result.ok);
        CHECK(result.requests == 40);
        CHECK(result.reached_containerless);
        CHECK(result.executor_runs > 0);
    }
}

TEST_CASE("closed-loop load generator produces a sane report") {
    bench::MockServer mock(bench::MockConfig{0, 0});
    mock.start();
    HttpUpstream upstream(mock.base_url());
    invoker::InvokerConfig cfg;
    cfg.trace_after = 5;
    invoker::Invoker inv(cfg, upstream);
    const auto& def = bench::benchmark("authorize");
    inv.register_function(def.name, def.source);

    bench::LoadConfig load;
    load.streams = 2;
    load.duration_s = 2;
    load.seed = 5;
    auto report = bench::run_load(inv, def, load);
    CHECK(report.total > 0);
    CHECK(report.errors == 0);
    CHECK(report.throughput_per_s > 0);
    CHECK(report.containerless_switch_ms >= 0);
    CHECK(!report.buckets.empty());
    uint64_t counted = 0;
    for (const auto& b : report.buckets) counted += b.count;
    CHECK(counted == report.total);

    auto j = report.to_json();
    CHECK(j["benchmark"] == "authorize");
    CHECK(j["totalRequests"] == report.total);
    CHECK(!report.table().empty());
}
