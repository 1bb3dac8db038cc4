#include "accel/loadgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace accel::bench {

namespace {

struct Sample {
    int64_t at_ms;
    uint32_t latency_us;
    bool ok;
};

uint64_t median_of(std::vector<uint32_t> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

LoadReport run_load(invoker::Invoker& inv, const BenchmarkDef& def, const LoadConfig& config) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto deadline = start + std::chrono::seconds(config.duration_s);

    std::mutex samples_mu;
    std::vector<Sample> samples;
    std::atomic<bool> done{false};

    // Phase sampler: polls the mode until the function goes containerless.
    std::atomic<int64_t> switch_ms{-1};
    std::thread sampler([&] {
        while (!done.load()) {
            try {
                if (inv.mode_of(def.name) == invoker::Mode::Containerless) {
                    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  clock::now() - start)
                                  .count();
                    switch_ms.store(ms);
                    return;
                }
            } catch (const std::exception&) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    });

    std::vector<std::thread> streams;
    for (int s = 0; s < config.streams; s++) {
        streams.emplace_back([&, s] {
            std::mt19937_64 rng(config.seed * 7919 + static_cast<uint64_t>(s));
            std::vector<Sample> local;
            while (clock::now() < deadline) {
                Json body = def.generate(rng);
                interp::Request req;
                req.body = std::move(body);
                auto t0 = clock::now();
                bool ok = true;
                try {
                    interp::Response res = inv.dispatch(def.name, req);
                    ok = res.status == 200;
                } catch (const std::exception&) {
                    ok = false;
                }
                auto t1 = clock::now();
                local.push_back(Sample{
                    std::chrono::duration_cast<std::chrono::milliseconds>(t0 - start).count(),
                    static_cast<uint32_t>(
                        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count()),
                    ok});
            }
            std::lock_guard lock(samples_mu);
            samples.insert(samples.end(), local.begin(), local.end());
        });
    }
    for (auto& t : streams) t.join();
    done.store(true);
    sampler.join();

    LoadReport report;
    report.benchmark = def.name;
    report.streams = config.streams;
    report.duration_s = config.duration_s;
    report.seed = config.seed;
    report.containerless_switch_ms = switch_ms.load();
    report.total = samples.size();

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.at_ms < b.at_ms; });
    if (!samples.empty()) report.warm_ms = samples.front().at_ms;

    std::vector<uint32_t> pre, post;
    std::vector<std::vector<uint32_t>> per_second(static_cast<size_t>(config.duration_s) + 1);
    for (const auto& s : samples) {
        if (!s.ok) report.errors++;
        size_t second = static_cast<size_t>(s.at_ms / 1000);
        if (second < per_second.size()) per_second[second].push_back(s.latency_us);
        if (report.containerless_switch_ms >= 0 && s.at_ms >= report.containerless_switch_ms)
            post.push_back(s.latency_us);
        else
            pre.push_back(s.latency_us);
    }
    report.throughput_per_s =
        config.duration_s > 0 ? static_cast<double>(report.total) / config.duration_s : 0;
    report.pre_switch_median_us = median_of(pre);
    report.post_switch_median_us = median_of(post);

    for (size_t sec = 0; sec < per_second.size(); sec++) {
        const auto& v = per_second[sec];
        if (v.empty()) continue;
        LoadBucket b;
        b.second = static_cast<int>(sec);
        b.count = v.size();
        double sum = 0;
        for (uint32_t x : v) {
            sum += x;
            b.max_us = std::max<uint64_t>(b.max_us, x);
        }
        b.mean_us = sum / static_cast<double>(v.size());
        double var = 0;
        for (uint32_t x : v) var += (x - b.mean_us) * (x - b.mean_us);
        if (v.size() > 1) {
            double sd = std::sqrt(var / static_cast<double>(v.size() - 1));
            b.ci95_us = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
        }
        report.buckets.push_back(b);
    }
    return report;
}

Json LoadReport::to_json() const {
    Json j;
    j["benchmark"] = benchmark;
    j["streams"] = streams;
    j["durationSeconds"] = duration_s;
    j["seed"] = seed;
    j["totalRequests"] = total;
    j["errors"] = errors;
    j["throughputPerSecond"] = throughput_per_s;
    Json phases;
    phases["firstRequestMs"] = warm_ms;
    phases["containerlessSwitchMs"] = containerless_switch_ms;
    j["phases"] = std::move(phases);
    j["preSwitchMedianUs"] = pre_switch_median_us;
    j["postSwitchMedianUs"] = post_switch_median_us;
    Json buckets_json = Json::array();
    for (const auto& b : buckets) {
        Json e;
        e["second"] = b.second;
        e["count"] = b.count;
        e["meanUs"] = b.mean_us;
        e["ci95Us"] = b.ci95_us;
        e["maxUs"] = b.max_us;
        buckets_json.push_back(std::move(e));
    }
    j["buckets"] = std::move(buckets_json);
    return j;
}

std::string LoadReport::csv() const {
    std::ostringstream out;
    out << "second,count,mean_us,ci95_us,max_us\n";
    for (const auto& b : buckets)
        out << b.second << "," << b.count << "," << b.mean_us << "," << b.ci95_us << ","
            << b.max_us << "\n";
    return out.str();
}

std::string LoadReport::table() const {
    std::ostringstream out;
    out << "benchmark: " << benchmark << "  streams: " << streams << "  duration: "
        << duration_s << "s  seed: " << seed << "\n";
    out << "requests: " << total << "  errors: " << errors
        << "  throughput: " << throughput_per_s << "/s\n";
    out << "containerless switch: ";
    if (containerless_switch_ms >= 0)
        out << containerless_switch_ms << " ms";
    else
        out << "never";
    out << "  median before: " << pre_switch_median_us
        << " us  after: " << post_switch_median_us << " us\n";
    out << "  sec   count     mean(us)    ci95(us)      max(us)\n";
    for (const auto& b : buckets) {
        char line[128];
        std::snprintf(line, sizeof(line), "%5d %7llu %12.1f %11.1f %12llu\n", b.second,
                      static_cast<unsigned long long>(b.count), b.mean_us, b.ci95_us,
                      static_cast<unsigned long long>(b.max_us));
        out << line;
    }
    return out.str();
}

}  // namespace accel::bench
