// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Run with --skip-perf to leave
// out the long performance-shape run, or --perf-only for just that one.

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "accel/bench.hpp"
#include "accel/fuzz.hpp"
#include "accel/invoker.hpp"
#include "accel/loadgen.hpp"
#include "accel/mock.hpp"

#include "golden.hpp"
#include "zipper_fuzz.hpp"

using namespace accel;
using namespace accel::testing;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run;  // empty string = pass
};

interp::Request request_with(interp::Json body) {
    interp::Request req;
    req.body = std::move(body);
    return req;
}

// --- criterion bodies ---------------------------------------------------------

std::string zipper_invariants() {
    auto report = run_zipper_fuzz(/*seeds=*/24, /*requests_per_program=*/4);
    if (!report.ok) return report.failure;
    if (report.steps < 10'000)
        return "only " + std::to_string(report.steps) + " operation steps exercised";
    return "";
}

std::string transparency_equivalence() {
    std::string failures;
    for (const auto& def : bench::benchmarks()) {
        invoker::InvokerConfig cfg;
        cfg.trace_after = 100;
        auto result = bench::equivalence_fuzz(def, 500, 2024, cfg);
        if (!result.ok)
            failures += def.name + ": " + std::to_string(result.divergences) +
                        " divergences; " + result.first_divergence + "\n";
        else if (!result.reached_containerless)
            failures += def.name + ": never reached containerless mode\n";
        if (result.arena_leaks > 0)
            failures += def.name + ": " + std::to_string(result.arena_leaks) +
                        " requests left live arena cells\n";
    }
    return failures;
}

std::string fallback_correctness() {
    std::string failures;
    for (const auto& def : bench::benchmarks()) {
        bench::MockServer mock(bench::MockConfig{0, 0});
        mock.start();
        HttpUpstream upstream(mock.base_url());
        invoker::InvokerConfig cfg;
        cfg.trace_after = 25;
        cfg.max_bounces = 1;
        invoker::Invoker inv(cfg, upstream);

        std::vector<exec::ExecResult> exec_results;
        inv.on_exec_result = [&](const std::string&, const exec::ExecResult& r) {
            exec_results.push_back(r);
        };
        inv.register_function(def.name, def.source);

        auto oracle = def.make_oracle();
        std::mt19937_64 rng(99);
        for (int i = 0; i < 25; i++) {
            interp::Json body = def.generate(rng);
            interp::Response res = inv.dispatch(def.name, request_with(body));
            std::string expected = oracle->expect(body);
            if (res.body != expected) {
                failures += def.name + ": warmup request diverged from the oracle\n";
                break;
            }
        }
        if (inv.mode_of(def.name) != invoker::Mode::Containerless) {
            failures += def.name + ": did not reach containerless during warmup\n";
            continue;
        }

        uint64_t bounces_before =
            inv.status(def.name)["bounceCount"].get<uint64_t>();
        for (size_t k = 0; k < def.adversarial.size(); k++) {
            const interp::Json& body = def.adversarial[k];
            size_t execs_before = exec_results.size();
            interp::Response res = inv.dispatch(def.name, request_with(body));
            std::string expected = oracle->expect(body);
            if (res.status != 200 || res.body != expected) {
                failures += def.name + ": adversarial input " + std::to_string(k) +
                            " got '" + res.body + "' expected '" + expected + "'\n";
                continue;
            }
            // The executor must have seen the request and aborted on unknown.
            if (k == 0) {
                if (exec_results.size() <= execs_before ||
                    exec_results.back().outcome != exec::Outcome::AbortUnknown)
                    failures += def.name + ": adversarial input did not abort the executor\n";
                uint64_t bounces =
                    inv.status(def.name)["bounceCount"].get<uint64_t>();
                if (bounces != bounces_before + 1)
                    failures += def.name + ": bounce count did not increment\n";
                if (inv.mode_of(def.name) != invoker::Mode::Containerless)
                    failures += def.name + ": did not re-extract after the first bounce\n";
            }
        }
        // maxBounces = 1 and two distinct adversarial inputs: container-only.
        if (inv.mode_of(def.name) != invoker::Mode::ContainerOnly) {
            failures += def.name + ": not container-only after maxBounces+1 aborts\n";
            continue;
        }
        std::mt19937_64 rng2(7);
        for (int i = 0; i < 5; i++)
            inv.dispatch(def.name, request_with(def.generate(rng2)));
        if (inv.mode_of(def.name) != invoker::Mode::ContainerOnly)
            failures += def.name + ": container-only mode was not absorbing\n";
    }
    return failures;
}

std::string retrace_idempotence() {
    std::string failures;
    for (const auto& def : bench::benchmarks()) {
        bench::MockServer mock(bench::MockConfig{0, 0});
        mock.start();
        HttpUpstream upstream(mock.base_url());
        ast::Program inst = instrumented(def.source);
        trace::Builder builder;
        std::mt19937_64 rng(31);
        // A couple of warmup requests, then a fixed request twice.
        for (int i = 0; i < 3; i++)
            interp::run_request(inst, builder, request_with(def.generate(rng)), upstream);
        interp::Request fixed = request_with(def.generate(rng));
        interp::run_request(inst, builder, fixed, upstream);
        trace::TraceP c1 = builder.current();
        trace::HandlerTable t1 = builder.handlers();
        interp::run_request(inst, builder, fixed, upstream);
        if (!trace::trace_equal(c1, builder.current()))
            failures += def.name + ": current trace changed on re-trace\n";
        if (!trace::handler_tables_equal(t1, builder.handlers()))
            failures += def.name + ": handler table changed on re-trace\n";
    }
    return failures;
}

std::string resource_bounds() {
    std::string failures;
    MapUpstream upstream;

    {  // while-true: instruction limit within the configured bound
        trace::TraceP body = trace::t_block(
            {trace::t_let("i", trace::t_integer(0)),
             trace::t_while(trace::t_boolean(true),
                            trace::t_block({trace::t_set(
                                trace::t_var("i"),
                                trace::t_binop("+", trace::t_var("i"), trace::t_integer(1)))}))});
        trace::HandlerTable table;
        table[0] = trace::Handler{"x$0", "env", body, nullptr};
        exec::CompiledProgram prog = exec::CompiledProgram::from_table(table);
        exec::ResourceLimits limits;
        limits.max_instructions = 10'000;
        exec::TraceExecutor executor(prog, upstream, limits);
        auto result = executor.run(interp::Request{});
        if (result.outcome != exec::Outcome::AbortInstructionLimit)
            failures += "while-true was not stopped by the instruction limit\n";
        if (result.stats.instructions > 10'001)
            failures += "instruction counter exceeded the configured bound\n";
    }
    {  // allocation bomb: memory limit
        trace::TraceP body = trace::t_block(
            {trace::t_let("i", trace::t_integer(0)),
             trace::t_while(
                 trace::t_boolean(true),
                 trace::t_block({trace::t_let(
                     "a", trace::t_array({trace::t_var("i"), trace::t_var("i"),
                                          trace::t_var("i"), trace::t_var("i")}))}))});
        trace::HandlerTable table;
        table[0] = trace::Handler{"x$0", "env", body, nullptr};
        exec::CompiledProgram prog = exec::CompiledProgram::from_table(table);
        exec::ResourceLimits limits;
        limits.max_instructions = 1'000'000'000;
        limits.max_bytes = 1024 * 1024;
        exec::TraceExecutor executor(prog, upstream, limits);
        auto result = executor.run(interp::Request{});
        if (result.outcome != exec::Outcome::AbortMemoryLimit)
            failures += "the allocation bomb was not stopped by the memory limit\n";
        if (result.stats.live_cells_after != 0)
            failures += "arena not empty after the aborted request\n";
    }
    {  // arena liveness across a fuzz mini-run
        invoker::InvokerConfig cfg;
        cfg.trace_after = 10;
        auto result = bench::equivalence_fuzz(bench::benchmark("autocomplete"), 60, 5, cfg);
        if (result.arena_leaks != 0)
            failures += "fuzz run left live arena cells after a request\n";
        if (result.executor_runs == 0) failures += "fuzz run never reached the executor\n";
    }
    return failures;
}

std::string dyn_semantics() {
    std::string failures;
    auto one_plus_true =
        exec::dyn_op("+", exec::DynValue::integer(1), exec::DynValue::boolean(true));
    if (!one_plus_true.ok || one_plus_true.value.tag != exec::DynValue::Tag::Int ||
        one_plus_true.value.i != 2)
        failures += "1 + true did not evaluate to 2\n";

    // Representative row of the documented coercion table; the exhaustive
    // tag-pair table runs in test_dyn.
    struct Case {
        const char* op;
        exec::DynValue a, b;
        bool ok;
        Scalar expect;
    };
    std::vector<Case> cases = {
        {"+", exec::DynValue::str("a"), exec::DynValue::str("b"), true, Scalar::str("ab")},
        {"+", exec::DynValue::str("n="), exec::DynValue::integer(2), true, Scalar::str("n=2")},
        {"-", exec::DynValue::str("9"), exec::DynValue::boolean(true), true, Scalar::number(8)},
        {"*", exec::DynValue::undefined(), exec::DynValue::integer(2), true,
         Scalar::number(std::nan(""))},
        {"*", exec::DynValue::object_ref(0), exec::DynValue::integer(2), false, Scalar()},
        {"<", exec::DynValue::str("a"), exec::DynValue::str("b"), true, Scalar::boolean(true)},
        {"===", exec::DynValue::integer(1), exec::DynValue::str("1"), true,
         Scalar::boolean(false)},
    };
    for (size_t i = 0; i < cases.size(); i++) {
        auto r = exec::dyn_op(cases[i].op, cases[i].a, cases[i].b);
        if (r.ok != cases[i].ok) {
            failures += "coercion case " + std::to_string(i) + " ok-mismatch\n";
            continue;
        }
        if (!r.ok) continue;
        Scalar got = r.value.tag == exec::DynValue::Tag::Int ? Scalar::integer(r.value.i)
                     : r.value.tag == exec::DynValue::Tag::Float ? Scalar::number(r.value.f)
                     : r.value.tag == exec::DynValue::Tag::Str  ? Scalar::str(r.value.s)
                     : r.value.tag == exec::DynValue::Tag::Bool ? Scalar::boolean(r.value.b)
                                                                : Scalar();
        if (!(got == cases[i].expect))
            failures += "coercion case " + std::to_string(i) + " value mismatch\n";
    }
    return failures;
}

std::string performance_shape() {
    // authorize, 10 closed-loop streams, 60 s: the post-switch median latency
    // must be strictly lower than the pre-switch (interpreter) median.
    bench::MockServer mock(bench::MockConfig{0, 1});
    mock.start();
    HttpUpstream upstream(mock.base_url());
    invoker::InvokerConfig cfg;
    cfg.trace_after = 100;
    cfg.pool_size = 6;
    invoker::Invoker inv(cfg, upstream);
    const auto& def = bench::benchmark("authorize");
    inv.register_function(def.name, def.source);

    bench::LoadConfig load;
    load.streams = 10;
    load.duration_s = 60;
    load.seed = 42;
    auto report = bench::run_load(inv, def, load);
    std::cout << report.table();

    if (report.errors != 0)
        return std::to_string(report.errors) + " failed requests during the run";
    if (report.containerless_switch_ms < 0) return "never switched to containerless mode";
    if (report.pre_switch_median_us == 0 || report.post_switch_median_us == 0)
        return "not enough samples on one side of the switch";
    if (report.post_switch_median_us >= report.pre_switch_median_us)
        return "post-switch median " + std::to_string(report.post_switch_median_us) +
               "us is not lower than pre-switch median " +
               std::to_string(report.pre_switch_median_us) + "us";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    bool skip_perf = false, perf_only = false;
    for (int i = 1; i < argc; i++) {
        std::string arg = argv[i];
        if (arg == "--skip-perf") skip_perf = true;
        if (arg == "--perf-only") perf_only = true;
    }

    std::vector<Criterion> criteria;
    if (!perf_only) {
        criteria.push_back({"golden-if-example", golden_if_example});
        criteria.push_back({"golden-fun-example", golden_fun_example});
        criteria.push_back({"golden-get-example", golden_get_example});
        criteria.push_back({"zipper-invariants", zipper_invariants});
        criteria.push_back({"transparency-equivalence", transparency_equivalence});
        criteria.push_back({"fallback-correctness", fallback_correctness});
        criteria.push_back({"retrace-idempotence", retrace_idempotence});
        criteria.push_back({"resource-bounds", resource_bounds});
        criteria.push_back({"dyn-semantics", dyn_semantics});
    }
    if (!skip_perf) criteria.push_back({"performance-shape", performance_shape});

    int failed = 0;
    for (const auto& c : criteria) {
        std::string failure;
        try {
            failure = c.run();
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        if (failure.empty()) {
            std::cout << "PASS " << c.name << "\n";
        } else {
            failed++;
            std::cout << "FAIL " << c.name << "\n" << failure << "\n";
        }
        std::cout.flush();
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
              << "\n";
    return failed == 0 ? 0 : 1;
}
