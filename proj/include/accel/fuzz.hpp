#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "accel/bench.hpp"
#include "accel/invoker.hpp"

namespace accel::bench {

struct FuzzResult {
    bool ok = true;
    uint64_t requests = 0;
    uint64_t divergences = 0;
    std::string first_divergence;  // reproducer detail
    bool reached_containerless = false;
    uint64_t executor_runs = 0;
    uint64_t arena_leaks = 0;  // runs whose arena was not empty afterwards
};

// Sends n seeded requests through a full accelerating invoker and through a
// container-only invoker (each with its own mock upstream) and byte-compares
// the response bodies; responses are also checked against the benchmark's
// independent oracle when it has one.
FuzzResult equivalence_fuzz(const BenchmarkDef& def, int n, uint64_t seed,
                            invoker::InvokerConfig base_config = {},
                            const std::function<void(const std::string&)>& log = nullptr);

}  // namespace accel::bench
