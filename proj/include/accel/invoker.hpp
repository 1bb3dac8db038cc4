#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "accel/builder.hpp"
#include "accel/executor.hpp"
#include "accel/instrument.hpp"
#include "accel/interpreter.hpp"
#include "accel/upstream.hpp"

namespace accel::invoker {

enum class Mode { Tracing, Containerless, ContainerOnly };
const char* mode_name(Mode m);

struct InvokerConfig {
    int trace_after = 100;   // traced events before extraction
    int max_bounces = 3;     // aborts tolerated before container-only
    exec::ResourceLimits limits;
    int pool_size = 6;       // concurrent interpreter instances per function
    int timeout_ms = 5000;
    bool force_container_only = false;
    std::string stats_path;  // per-request executor stats (JSON lines), optional
};

struct NotFound : std::runtime_error {
    explicit NotFound(const std::string& name)
        : std::runtime_error("no function named '" + name + "'") {}
};

struct RegistrationError : std::runtime_error {
    explicit RegistrationError(const std::string& msg) : std::runtime_error(msg) {}
};

using Json = nlohmann::ordered_json;

// The invoker: owns one record per registered function and drives the
// tracing / containerless / container-only state machine.
class Invoker {
  public:
    Invoker(InvokerConfig config, UpstreamClient& upstream);

    // Parses, desugars, and instruments the source. Syntax and compile errors
    // throw RegistrationError; unsupported features (eval, getters, proxies)
    // register the function as container-only from birth.
    void register_function(const std::string& name, const std::string& source);

    interp::Response dispatch(const std::string& name, const interp::Request& req);

    Json status(const std::string& name);
    Json trace_json(const std::string& name);
    std::vector<std::string> function_names();
    Mode mode_of(const std::string& name);

    // Observes every trace-executor run; used by tests to check arena stats.
    std::function<void(const std::string&, const exec::ExecResult&)> on_exec_result;

    const InvokerConfig& config() const { return config_; }

  private:
    struct Pool {
        explicit Pool(int size) : available(size) {}
        std::mutex mu;
        std::condition_variable cv;
        int available;

        void acquire() {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return available > 0; });
            available--;
        }
        void release() {
            {
                std::lock_guard lock(mu);
                available++;
            }
            cv.notify_one();
        }
    };

    struct PoolSlot {
        Pool& pool;
        explicit PoolSlot(Pool& p) : pool(p) { pool.acquire(); }
        ~PoolSlot() { pool.release(); }
    };

    struct FunctionRecord {
        std::string name;
        std::string source;
        bool runnable = true;
        std::string disable_reason;  // set for container-only-from-birth

        ast::Program plain;         // desugared program (the slow-path oracle)
        ast::Program instrumented;  // with tracing runtime calls

        std::mutex mu;  // guards everything below
        Mode mode = Mode::Tracing;
        uint64_t traced_events = 0;
        uint64_t bounce_count = 0;
        std::shared_ptr<const exec::CompiledProgram> compiled;
        trace::HandlerTable compiled_table;  // snapshot backing `compiled`
        std::vector<uint32_t> latencies_us;

        std::mutex tracer_mu;  // at most one tracing execution at a time
        trace::Builder builder;

        std::unique_ptr<Pool> pool;
    };

    std::shared_ptr<FunctionRecord> find(const std::string& name);

    interp::Response run_traced(FunctionRecord& rec, const interp::Request& req);
    interp::Response run_traced_locked(FunctionRecord& rec, const interp::Request& req);
    interp::Response run_plain_pooled(FunctionRecord& rec, const interp::Request& req);
    interp::Response run_compiled(FunctionRecord& rec,
                                  std::shared_ptr<const exec::CompiledProgram> snapshot,
                                  const interp::Request& req);
    void maybe_extract(FunctionRecord& rec);
    void emit_stats(const FunctionRecord& rec, const exec::ExecResult& result,
                    uint32_t latency_us);

    InvokerConfig config_;
    UpstreamClient& upstream_;
    std::mutex map_mu_;
    std::map<std::string, std::shared_ptr<FunctionRecord>> records_;
    std::mutex stats_mu_;
    uint64_t request_counter_ = 0;
};

}  // namespace accel::invoker
