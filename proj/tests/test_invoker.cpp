#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "httplib.h"

#include "accel/bench.hpp"
#include "accel/fuzz.hpp"
#include "accel/invoker.hpp"
#include "accel/mock.hpp"
#include "accel/service.hpp"

using namespace accel;
using invoker::Invoker;
using invoker::InvokerConfig;
using invoker::Mode;

namespace {

struct Rig {
    bench::MockServer mock;
    std::unique_ptr<HttpUpstream> upstream;
    std::unique_ptr<Invoker> inv;

    explicit Rig(InvokerConfig cfg = {}, int mock_delay = 0)
        : mock(bench::MockConfig{0, mock_delay}) {
        mock.start();
        upstream = std::make_unique<HttpUpstream>(mock.base_url());
        inv = std::make_unique<Invoker>(cfg, *upstream);
    }
};

interp::Request request_with(interp::Json body) {
    interp::Request req;
    req.body = std::move(body);
    return req;
}

InvokerConfig quick_config(int trace_after = 3, int max_bounces = 3) {
    InvokerConfig cfg;
    cfg.trace_after = trace_after;
    cfg.max_bounces = max_bounces;
    return cfg;
}

}  // namespace

TEST_CASE("registration starts in tracing mode with zero counters") {
    Rig rig(quick_config());
    rig.inv->register_function("authorize", bench::benchmark("authorize").source);
    auto status = rig.inv->status("authorize");
    CHECK(status["mode"] == "tracing");
    CHECK(status["tracedEventCount"] == 0);
    CHECK(status["bounceCount"] == 0);
}

TEST_CASE("dispatching an unknown function reports not-found") {
    Rig rig;
    CHECK_THROWS_AS(rig.inv->dispatch("ghost", interp::Request{}), invoker::NotFound);
}

TEST_CASE("registration rejects syntax errors but keeps eval as container-only") {
    Rig rig;
    CHECK_THROWS_AS(rig.inv->register_function("bad", "let x = ;"),
                    invoker::RegistrationError);
    CHECK_THROWS_AS(rig.inv->register_function("unbound", "let x = y + 1;"),
                    invoker::RegistrationError);

    rig.inv->register_function("evaluator", "let x = eval('1');");
    CHECK(rig.inv->mode_of("evaluator") == Mode::ContainerOnly);
    interp::Response res = rig.inv->dispatch("evaluator", interp::Request{});
    CHECK(res.status == 500);
    CHECK(res.body.find("eval") != std::string::npos);
}

TEST_CASE("the function goes containerless after traceAfter requests") {
    Rig rig(quick_config(3));
    const auto& def = bench::benchmark("authorize");
    rig.inv->register_function(def.name, def.source);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 3; i++) {
        interp::Response res = rig.inv->dispatch(def.name, request_with(def.generate(rng)));
        CHECK(res.status == 200);
    }
    CHECK(rig.inv->mode_of(def.name) == Mode::Containerless);

    // Served by the executor now, still correct.
    interp::Response res = rig.inv->dispatch(
        def.name, request_with({{"username", "alice"}, {"password", "correct-horse"}}));
    CHECK(res.status == 200);
    CHECK(res.body == "ok");
}

TEST_CASE("responses are byte-equal across the mode lifecycle") {
    const auto& def = bench::benchmark("status");
    Rig fast_rig(quick_config(4));
    InvokerConfig slow_cfg;
    slow_cfg.force_container_only = true;
    Rig slow_rig(slow_cfg);
    fast_rig.inv->register_function(def.name, def.source);
    slow_rig.inv->register_function(def.name, def.source);
    CHECK(slow_rig.inv->mode_of(def.name) == Mode::ContainerOnly);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; i++) {
        interp::Request req = request_with(def.generate(rng));
        interp::Response a = fast_rig.inv->dispatch(def.name, req);
        interp::Response b = slow_rig.inv->dispatch(def.name, req);
        CHECK(a.status == b.status);
        CHECK(a.body == b.body);
    }
    CHECK(fast_rig.inv->mode_of(def.name) == Mode::Containerless);
}

TEST_CASE("an off-trace request bounces, re-executes, and re-extracts") {
    Rig rig(quick_config(2, /*max_bounces=*/5));
    const auto& def = bench::benchmark("authorize");
    rig.inv->register_function(def.name, def.source);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 2; i++)
        rig.inv->dispatch(def.name, request_with(def.generate(rng)));
    REQUIRE(rig.inv->mode_of(def.name) == Mode::Containerless);

    // The admin branch was never traced: the executor aborts, the interpreter
    // serves the correct answer, and the bounce is counted.
    interp::Response res = rig.inv->dispatch(
        def.name, request_with({{"username", "admin"}, {"password", "x"}}));
    CHECK(res.status == 200);
    CHECK(res.body == "admin-blocked");
    auto status = rig.inv->status(def.name);
    CHECK(status["bounceCount"] == 1);
    // The bounced request was re-traced, so extraction happens again at once.
    CHECK(rig.inv->mode_of(def.name) == Mode::Containerless);

    // The same input is now on-trace and served by the executor.
    interp::Response again = rig.inv->dispatch(
        def.name, request_with({{"username", "admin"}, {"password", "x"}}));
    CHECK(again.body == "admin-blocked");
    CHECK(rig.inv->status(def.name)["bounceCount"] == 1);
}

TEST_CASE("exceeding maxBounces parks the function in container-only forever") {
    Rig rig(quick_config(2, /*max_bounces=*/1));
    const auto& def = bench::benchmark("authorize");
    rig.inv->register_function(def.name, def.source);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 2; i++)
        rig.inv->dispatch(def.name, request_with(def.generate(rng)));
    REQUIRE(rig.inv->mode_of(def.name) == Mode::Containerless);

    // First adversarial input: bounce 1 <= maxBounces, back to tracing and
    // then containerless again.
    interp::Response r1 = rig.inv->dispatch(
        def.name, request_with({{"username", "admin"}, {"password", "x"}}));
    CHECK(r1.body == "admin-blocked");
    REQUIRE(rig.inv->mode_of(def.name) == Mode::Containerless);

    // Second adversarial input flips a different untraced branch: bounce 2 >
    // maxBounces, container-only.
    interp::Response r2 = rig.inv->dispatch(
        def.name, request_with({{"username", "root"}, {"password", "x"}}));
    CHECK(r2.body == "root-blocked");
    CHECK(rig.inv->mode_of(def.name) == Mode::ContainerOnly);
    CHECK(rig.inv->status(def.name)["bounceCount"] == 2);

    // Container-only is absorbing.
    for (int i = 0; i < 5; i++)
        rig.inv->dispatch(def.name, request_with(def.generate(rng)));
    CHECK(rig.inv->mode_of(def.name) == Mode::ContainerOnly);
}

TEST_CASE("trace endpoint serves the handler table and is idempotent under re-trace") {
    Rig rig(quick_config(100));
    const auto& def = bench::benchmark("authorize");
    rig.inv->register_function(def.name, def.source);

    interp::Request req =
        request_with({{"username", "alice"}, {"password", "correct-horse"}});
    rig.inv->dispatch(def.name, req);
    auto t1 = rig.inv->trace_json(def.name);
    rig.inv->dispatch(def.name, req);
    auto t2 = rig.inv->trace_json(def.name);
    CHECK(t1 == t2);
    CHECK(t1.contains("handlers"));
    CHECK(t1["handlers"].size() >= 2);  // main body plus the listen handler
}

TEST_CASE("the HTTP service exposes register, invoke, status, and trace") {
    Rig rig(quick_config(2));
    invoker::InvokerService service(*rig.inv);
    service.start(0);

    httplib::Client client(service.base_url());
    auto reg = client.Put("/function/authorize", bench::benchmark("authorize").source,
                          "text/plain");
    REQUIRE(reg);
    CHECK(reg->status == 200);

    auto bad = client.Put("/function/broken", "let x = ;", "text/plain");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    interp::Json body = {{"username", "alice"}, {"password", "correct-horse"}};
    for (int i = 0; i < 3; i++) {
        auto res = client.Post("/function/authorize", body.dump(), "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(res->body == "ok");
    }

    auto status = client.Get("/function/authorize/status");
    REQUIRE(status);
    auto parsed = interp::Json::parse(status->body);
    CHECK(parsed["mode"] == "containerless");
    CHECK(parsed["latency"]["count"] == 3);

    auto trace_res = client.Get("/function/authorize/trace");
    REQUIRE(trace_res);
    CHECK(interp::Json::parse(trace_res->body).contains("handlers"));

    auto missing = client.Post("/function/nope", "{}", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto not_json = client.Post("/function/authorize", "{oops", "application/json");
    REQUIRE(not_json);
    CHECK(not_json->status == 400);
}

TEST_CASE("concurrent dispatch stays correct across mode transitions") {
    Rig rig(quick_config(/*trace_after=*/10, /*max_bounces=*/50));
    const auto& def = bench::benchmark("authorize");
    rig.inv->register_function(def.name, def.source);
    auto oracle = def.make_oracle();

    std::atomic<int> mismatches{0};
    std::atomic<int> served{0};
    auto worker = [&](uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto local_oracle = bench::benchmark("authorize").make_oracle();
        for (int i = 0; i < 50; i++) {
            interp::Json body;
            if (i % 17 == 9) {
                // Occasionally off-trace, forcing bounces mid-flight.
                body = {{"username", "admin"}, {"password", "x"}};
            } else {
                body = def.generate(rng);
            }
            interp::Response res = rig.inv->dispatch(def.name, request_with(body));
            served++;
            if (res.status != 200 || res.body != local_oracle->expect(body)) mismatches++;
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; t++) threads.emplace_back(worker, 100 + t);
    for (auto& t : threads) t.join();

    CHECK(served.load() == 200);
    CHECK(mismatches.load() == 0);
    // The function settled in a valid mode and the counters are coherent.
    auto status = rig.inv->status(def.name);
    CHECK(status["latency"]["count"] == 200);
}

TEST_CASE("executor stats are appended as JSON lines when configured") {
    std::string path = "/tmp/accel_stats_test.jsonl";
    std::remove(path.c_str());
    InvokerConfig cfg = quick_config(1);
    cfg.stats_path = path;
    Rig rig(cfg);
    rig.inv->register_function("authorize", bench::benchmark("authorize").source);
    interp::Request req =
        request_with({{"username", "alice"}, {"password", "correct-horse"}});
    rig.inv->dispatch("authorize", req);  // traced
    rig.inv->dispatch("authorize", req);  // executor, logged
    rig.inv->dispatch("authorize", req);  // executor, logged

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = interp::Json::parse(line);
        CHECK(j["function"] == "authorize");
        CHECK(j["outcome"] == "responded");
        CHECK(j["instructions"].get<uint64_t>() > 0);
        CHECK(j.contains("peakBytes"));
        CHECK(j.contains("latencyUs"));
        CHECK(j.contains("requestId"));
        lines++;
    }
    CHECK(lines == 2);
    std::remove(path.c_str());
}

TEST_CASE("executor stats flow through the observer hook") {
    Rig rig(quick_config(1));
    rig.inv->register_function("authorize", bench::benchmark("authorize").source);
    std::vector<exec::ExecResult> results;
    rig.inv->on_exec_result = [&](const std::string&, const exec::ExecResult& r) {
        results.push_back(r);
    };
    interp::Request req =
        request_with({{"username", "alice"}, {"password", "correct-horse"}});
    rig.inv->dispatch("authorize", req);   // traced
    rig.inv->dispatch("authorize", req);   // executor
    REQUIRE(results.size() == 1);
    CHECK(results[0].outcome == exec::Outcome::Responded);
    CHECK(results[0].stats.instructions > 0);
    CHECK(results[0].stats.live_cells_after == 0);
}
