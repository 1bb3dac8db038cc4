#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "accel/bench.hpp"
#include "accel/invoker.hpp"

namespace accel::bench {

struct LoadConfig {
    int streams = 10;
    int duration_s = 60;
    uint64_t seed = 1;
};

struct LoadBucket {
    int second = 0;
    uint64_t count = 0;
    double mean_us = 0;
    double ci95_us = 0;  // 95% confidence interval half-width of the mean
    uint64_t max_us = 0;
};

struct LoadReport {
    std::string benchmark;
    int streams = 0;
    int duration_s = 0;
    uint64_t seed = 0;
    uint64_t total = 0;
    uint64_t errors = 0;
    double throughput_per_s = 0;
    // Phase markers, milliseconds since the run started; -1 when never seen.
    int64_t warm_ms = -1;                 // first completed request
    int64_t containerless_switch_ms = -1; // mode first reported containerless
    uint64_t pre_switch_median_us = 0;
    uint64_t post_switch_median_us = 0;
    std::vector<LoadBucket> buckets;

    Json to_json() const;
    std::string table() const;
    std::string csv() const;  // per-second buckets for plotting
};

// Closed-loop load: `streams` clients that each issue the next request the
// moment the previous response arrives.
LoadReport run_load(invoker::Invoker& inv, const BenchmarkDef& def, const LoadConfig& config);

}  // namespace accel::bench
