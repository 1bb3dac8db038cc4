#include "accel/invoker.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "accel/desugar.hpp"
#include "accel/parser.hpp"
#include "accel/trace_json.hpp"

namespace accel::invoker {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Tracing: return "tracing";
        case Mode::Containerless: return "containerless";
        case Mode::ContainerOnly: return "container-only";
    }
    return "?";
}

Invoker::Invoker(InvokerConfig config, UpstreamClient& upstream)
    : config_(std::move(config)), upstream_(upstream) {}

void Invoker::register_function(const std::string& name, const std::string& source) {
    auto rec = std::make_shared<FunctionRecord>();
    rec->name = name;
    rec->source = source;
    rec->pool = std::make_unique<Pool>(std::max(1, config_.pool_size));

    try {
        ast::Program parsed = ast::parse(source);
        rec->plain = ast::desugar(parsed);
        ast::validate_core(rec->plain);
        rec->instrumented = compile::instrument(rec->plain);
        rec->mode = config_.force_container_only ? Mode::ContainerOnly : Mode::Tracing;
    } catch (const ast::ParseError& e) {
        if (e.kind == ast::ParseError::Kind::UnsupportedFeature) {
            // These features would need a full OS-sandboxed JavaScript
            // runtime; the function is registered but every invocation
            // reports the unsupported construct.
            rec->runnable = false;
            rec->disable_reason = e.what();
            rec->mode = Mode::ContainerOnly;
        } else {
            throw RegistrationError(e.what());
        }
    } catch (const ast::DesugarError& e) {
        throw RegistrationError(e.what());
    } catch (const compile::CompileError& e) {
        throw RegistrationError(e.what());
    }

    std::lock_guard lock(map_mu_);
    records_[name] = std::move(rec);
}

std::shared_ptr<Invoker::FunctionRecord> Invoker::find(const std::string& name) {
    std::lock_guard lock(map_mu_);
    auto it = records_.find(name);
    if (it == records_.end()) throw NotFound(name);
    return it->second;
}

std::vector<std::string> Invoker::function_names() {
    std::lock_guard lock(map_mu_);
    std::vector<std::string> names;
    for (const auto& [k, _] : records_) names.push_back(k);
    return names;
}

Mode Invoker::mode_of(const std::string& name) {
    auto rec = find(name);
    std::lock_guard lock(rec->mu);
    return rec->mode;
}

void Invoker::maybe_extract(FunctionRecord& rec) {
    // Caller holds tracer_mu; take mu for the mode flip. Extraction happens
    // only at a request boundary with an empty context and no pending work,
    // which run_request guarantees on return.
    std::lock_guard lock(rec.mu);
    if (rec.mode != Mode::Tracing) return;
    if (rec.traced_events < static_cast<uint64_t>(config_.trace_after)) return;
    if (!rec.builder.context_empty() || !rec.builder.args_empty()) return;
    rec.compiled_table = rec.builder.handlers();
    rec.compiled = std::make_shared<const exec::CompiledProgram>(
        exec::CompiledProgram::from_table(rec.compiled_table));
    rec.mode = Mode::Containerless;
}

interp::Response Invoker::run_traced(FunctionRecord& rec, const interp::Request& req) {
    std::unique_lock tracer(rec.tracer_mu);
    return run_traced_locked(rec, req);
}

interp::Response Invoker::run_traced_locked(FunctionRecord& rec, const interp::Request& req) {
    PoolSlot slot(*rec.pool);
    interp::InterpreterOptions opts;
    opts.timeout_ms = config_.timeout_ms;
    interp::Response res;
    try {
        res = interp::run_request(rec.instrumented, rec.builder, req, upstream_, opts);
    } catch (const trace::TraceDivergence&) {
        // Same program point, different trace: give up on this run's trace and
        // serve the request from the plain interpreter.
        rec.builder.reset_transient();
        {
            std::lock_guard lock(rec.mu);
            rec.bounce_count++;
            if (rec.bounce_count > static_cast<uint64_t>(config_.max_bounces))
                rec.mode = Mode::ContainerOnly;
        }
        return run_plain_pooled(rec, req);
    } catch (const trace::TraceCorruption&) {
        rec.builder.reset_transient();
        {
            std::lock_guard lock(rec.mu);
            rec.mode = Mode::ContainerOnly;
        }
        return run_plain_pooled(rec, req);
    }
    {
        std::lock_guard lock(rec.mu);
        rec.traced_events++;
    }
    maybe_extract(rec);
    return res;
}

interp::Response Invoker::run_plain_pooled(FunctionRecord& rec, const interp::Request& req) {
    PoolSlot slot(*rec.pool);
    interp::InterpreterOptions opts;
    opts.timeout_ms = config_.timeout_ms;
    return interp::run_plain(rec.plain, req, upstream_, opts);
}

void Invoker::emit_stats(const FunctionRecord& rec, const exec::ExecResult& result,
                         uint32_t latency_us) {
    if (on_exec_result) on_exec_result(rec.name, result);
    if (config_.stats_path.empty()) return;
    Json line;
    {
        std::lock_guard lock(stats_mu_);
        line["requestId"] = ++request_counter_;
    }
    line["function"] = rec.name;
    line["outcome"] = exec::outcome_name(result.outcome);
    line["instructions"] = result.stats.instructions;
    line["peakBytes"] = result.stats.peak_bytes;
    line["latencyUs"] = latency_us;
    std::lock_guard lock(stats_mu_);
    std::ofstream out(config_.stats_path, std::ios::app);
    out << line.dump() << "\n";
}

interp::Response Invoker::run_compiled(FunctionRecord& rec,
                                       std::shared_ptr<const exec::CompiledProgram> snapshot,
                                       const interp::Request& req) {
    auto start = std::chrono::steady_clock::now();
    exec::TraceExecutor executor(*snapshot, upstream_, config_.limits);
    exec::ExecResult result = executor.run(req);
    auto latency = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    emit_stats(rec, result, static_cast<uint32_t>(latency));

    if (result.outcome == exec::Outcome::Responded) {
        interp::Response res;
        res.status = 200;
        res.body = interp::response_body_of_json(result.response);
        res.content_type = result.response.is_string() ? "text/plain" : "application/json";
        return res;
    }

    // Off-trace or failed: the function may bounce back to tracing mode, and
    // the request is re-executed in the slow sandbox exactly once.
    bool bounced = exec::outcome_is_bounce(result.outcome);
    Mode next;
    {
        std::lock_guard lock(rec.mu);
        if (bounced) {
            rec.bounce_count++;
            rec.mode = rec.bounce_count > static_cast<uint64_t>(config_.max_bounces)
                           ? Mode::ContainerOnly
                           : Mode::Tracing;
        }
        next = rec.mode;
    }
    if (bounced && next == Mode::Tracing) return run_traced(rec, req);
    return run_plain_pooled(rec, req);
}

interp::Response Invoker::dispatch(const std::string& name, const interp::Request& req) {
    auto rec = find(name);
    if (!rec->runnable) {
        Json err;
        err["error"] = rec->disable_reason;
        return interp::Response{500, err.dump(), "application/json"};
    }

    auto start = std::chrono::steady_clock::now();
    interp::Response res;

    Mode mode;
    std::shared_ptr<const exec::CompiledProgram> snapshot;
    {
        std::lock_guard lock(rec->mu);
        mode = rec->mode;
        snapshot = rec->compiled;
    }

    switch (mode) {
        case Mode::ContainerOnly: res = run_plain_pooled(*rec, req); break;
        case Mode::Containerless: res = run_compiled(*rec, snapshot, req); break;
        case Mode::Tracing: {
            // Prefer the tracing instance; fall back to the pool when busy.
            std::unique_lock tracer(rec->tracer_mu, std::try_to_lock);
            if (tracer.owns_lock()) {
                res = run_traced_locked(*rec, req);
            } else {
                res = run_plain_pooled(*rec, req);
            }
            break;
        }
    }

    auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    {
        std::lock_guard lock(rec->mu);
        if (rec->latencies_us.size() < 1'000'000)
            rec->latencies_us.push_back(static_cast<uint32_t>(us));
    }
    return res;
}

namespace {
uint32_t percentile(std::vector<uint32_t> v, double p) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    size_t idx = static_cast<size_t>(p * static_cast<double>(v.size() - 1));
    return v[idx];
}
}  // namespace

Json Invoker::status(const std::string& name) {
    auto rec = find(name);
    std::lock_guard lock(rec->mu);
    Json j;
    j["name"] = rec->name;
    j["mode"] = mode_name(rec->mode);
    j["tracedEventCount"] = rec->traced_events;
    j["bounceCount"] = rec->bounce_count;
    Json lat;
    lat["count"] = rec->latencies_us.size();
    lat["p50Us"] = percentile(rec->latencies_us, 0.50);
    lat["p95Us"] = percentile(rec->latencies_us, 0.95);
    lat["maxUs"] = rec->latencies_us.empty()
                       ? 0u
                       : *std::max_element(rec->latencies_us.begin(), rec->latencies_us.end());
    j["latency"] = std::move(lat);
    if (!rec->runnable) j["disabled"] = rec->disable_reason;
    return j;
}

Json Invoker::trace_json(const std::string& name) {
    auto rec = find(name);
    Mode mode;
    {
        std::lock_guard lock(rec->mu);
        mode = rec->mode;
        if (mode == Mode::Containerless)
            return trace::handler_table_to_json(rec->compiled_table);
    }
    if (mode == Mode::Tracing) {
        // The builder is only safe to read between tracer runs; lock order is
        // always tracer_mu before mu.
        std::lock_guard tracer(rec->tracer_mu);
        return trace::handler_table_to_json(rec->builder.handlers());
    }
    throw NotFound(name + " has no trace (container-only)");
}

}  // namespace accel::invoker
