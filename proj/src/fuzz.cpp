#include "accel/fuzz.hpp"

#include <random>

#include "accel/mock.hpp"

namespace accel::bench {

FuzzResult equivalence_fuzz(const BenchmarkDef& def, int n, uint64_t seed,
                            invoker::InvokerConfig base_config,
                            const std::function<void(const std::string&)>& log) {
    FuzzResult result;

    // Each invoker gets a private mock so that stateful benchmarks see the
    // same store evolution on both sides.
    MockConfig mock_config;
    mock_config.delay_ms = 0;
    MockServer mock_fast(mock_config), mock_slow(mock_config);
    mock_fast.start();
    mock_slow.start();
    HttpUpstream up_fast(mock_fast.base_url());
    HttpUpstream up_slow(mock_slow.base_url());

    invoker::InvokerConfig fast_cfg = base_config;
    invoker::InvokerConfig slow_cfg = base_config;
    slow_cfg.force_container_only = true;

    invoker::Invoker fast(fast_cfg, up_fast);
    invoker::Invoker slow(slow_cfg, up_slow);
    fast.on_exec_result = [&](const std::string&, const exec::ExecResult& r) {
        result.executor_runs++;
        if (r.stats.live_cells_after != 0) result.arena_leaks++;
    };
    fast.register_function(def.name, def.source);
    slow.register_function(def.name, def.source);

    auto oracle = def.make_oracle ? def.make_oracle() : nullptr;
    std::mt19937_64 rng(seed);

    for (int i = 0; i < n; i++) {
        interp::Request req;
        req.body = def.generate(rng);
        interp::Response a = fast.dispatch(def.name, req);
        interp::Response b = slow.dispatch(def.name, req);
        result.requests++;
        auto report = [&](const std::string& what, const std::string& lhs,
                          const std::string& rhs) {
            result.divergences++;
            if (result.first_divergence.empty()) {
                result.first_divergence = def.name + " request " + std::to_string(i) +
                                          " (seed " + std::to_string(seed) + "): " + what +
                                          "\n  request: " + req.body.dump() +
                                          "\n  lhs: " + lhs + "\n  rhs: " + rhs;
            }
        };
        if (a.body != b.body || a.status != b.status)
            report("accelerated vs container-only", a.body, b.body);
        if (oracle) {
            std::string expected = oracle->expect(req.body);
            if (a.body != expected) report("accelerated vs oracle", a.body, expected);
        }
        if (log && (i + 1) % 100 == 0)
            log(def.name + ": " + std::to_string(i + 1) + "/" + std::to_string(n));
    }

    result.reached_containerless =
        fast.mode_of(def.name) == invoker::Mode::Containerless;
    result.ok = result.divergences == 0 && result.arena_leaks == 0;
    return result;
}

}  // namespace accel::bench
