#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "accel/arena.hpp"
#include "accel/builder.hpp"
#include "accel/dyn.hpp"
#include "accel/interpreter.hpp"
#include "accel/trace.hpp"
#include "accel/upstream.hpp"

namespace accel::exec {

using Json = nlohmann::ordered_json;

// Immutable snapshot of a traced program; shareable across concurrent
// requests. Per-request state (stored environments, the arena) lives in the
// executor, never here.
struct CompiledHandler {
    std::string arg_id;
    std::string env_id;
    trace::TraceP body;
};

struct CompiledProgram {
    std::map<int, CompiledHandler> handlers;

    static CompiledProgram from_table(const trace::HandlerTable& table);
};

enum class Outcome {
    Responded,
    NoResponse,
    AbortUnknown,
    AbortDynType,
    AbortInstructionLimit,
    AbortMemoryLimit,
    AbortError,  // unbound variables, malformed traces, upstream misuse
};

const char* outcome_name(Outcome o);

// An abort re-executes the request in the slow sandbox; only unknown
// behavior and divergence count as bounces for the mode machine.
bool outcome_is_bounce(Outcome o);

struct ExecResult {
    Outcome outcome = Outcome::NoResponse;
    Json response;      // valid when Responded
    std::string error;  // human-readable abort reason
    ArenaStats stats;
};

// Executes events against a compiled trace tree with a per-request arena and
// instruction bound. One executor serves one request; make a new one per
// request (the CompiledProgram is shared).
class TraceExecutor {
  public:
    TraceExecutor(const CompiledProgram& program, UpstreamClient& upstream,
                  ResourceLimits limits = {});

    // Full request lifecycle: run handler 0, fire the listen handler with the
    // request, drain async completions.
    ExecResult run(const interp::Request& req);

    // Fires one handler directly; used by tests and the event loop.
    void execute_event(int handler, const DynValue& arg);

    RequestArena& arena() { return arena_; }
    const std::optional<Json>& response() const { return response_; }

  private:
    struct Ev {
        DynValue value;
        bool is_break = false;
        std::string label;
    };

    struct ScopeFrame {
        std::string name;
        Addr addr;
    };

    struct PendingOp {
        bool is_post = false;
        std::string url;
        std::string body;
        int handler = -1;
    };

    Ev eval(const trace::TraceP& t);
    void eval_scoped_block(const trace::TraceP& block, Ev& out);
    DynValue eval_value(const trace::TraceP& t);
    Addr resolve_env_entry(const std::string& entry_name, const trace::TraceP& addr_expr);
    Addr lookup(const std::string& name) const;

    DynValue dyn_of_json(const Json& j);
    Json json_of_dyn(const DynValue& v, int depth = 0);

    const CompiledProgram& program_;
    UpstreamClient& upstream_;
    RequestArena arena_;

    std::vector<ScopeFrame> scope_;
    std::vector<ScopeFrame> globals_;      // names created by undeclared assignment
    std::map<int, DynValue> handler_env_;  // per-request stored environments
    std::optional<DynValue> current_env_;  // stored env of the running handler
    std::deque<PendingOp> queue_;
    std::optional<Json> response_;
    int listen_handler_ = -1;
};

}  // namespace accel::exec
