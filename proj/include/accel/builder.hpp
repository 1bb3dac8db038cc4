#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "accel/trace.hpp"

namespace accel::trace {

// Raised when the instrumentation stream and the trace tree disagree in a way
// that indicates a bug in the compiler or runtime (wrong node shape, pop on an
// empty context, unbalanced argument stack). The invoker treats it like any
// other abort and re-executes in the slow sandbox.
struct TraceCorruption : std::runtime_error {
    explicit TraceCorruption(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a re-execution produced a different trace at the same program
// point (for example an event of a different kind). Handled like unknown
// behavior: bounce the function back to the slow sandbox.
struct TraceDivergence : std::runtime_error {
    explicit TraceDivergence(const std::string& msg) : std::runtime_error(msg) {}
};

// One traced event handler. `arg_id` and `env_id` are the variable names the
// body uses for the event payload and captured environment; `env_trace` is
// the environment expression recorded at the callback's definition site and
// is what loading the handler pushes for the body's leading `let env = ...`.
struct Handler {
    std::string arg_id;
    std::string env_id;
    TraceP body;
    TraceP env_trace;  // may be null until the first event fires

    bool operator==(const Handler& o) const;
};

using HandlerTable = std::map<int, Handler>;

// The stateful tracing runtime: the current trace (c), its context (kappa),
// the argument-trace stack (alpha), and the handler table (T). Exactly one
// execution mutates a Builder at a time.
class Builder {
  public:
    Builder();

    // --- leaves -----------------------------------------------------------
    void record_let(const std::string& name, TraceP value);
    void record_set(TraceP target, TraceP value);
    void record_break(const std::string& label, TraceP value);
    void record_respond(TraceP value);
    // Empty source blocks have no slots to enter; they record as a leaf.
    void record_empty_block();

    // --- interior nodes ----------------------------------------------------
    void enter_seq(size_t n);
    void seq_next();
    void enter_if_true(TraceP cond);
    void enter_if_false(TraceP cond);
    void enter_while(TraceP cond);
    void enter_label(const std::string& label);
    void enter_named(const std::string& name);

    // --- moving to the parent ----------------------------------------------
    void pop();
    void pop_to(const std::string& label);

    // --- argument stack ------------------------------------------------------
    void push_arg(TraceP t);
    TraceP pop_arg();

    // --- event handlers -----------------------------------------------------
    // Returns a fresh handler index, or the index already recorded when the
    // current trace is the same event expression from a previous run.
    int new_handler(const std::string& event_kind, TraceP arg, TraceP env);
    void set_handler_env_trace(int n, TraceP env_trace);
    void load_handler(int n);
    void save_handler(int n);
    // Begin a run of the main body: focus handler 0 without touching alpha.
    void begin_main();

    // Discards in-flight tracing state after a failed request. Saved handler
    // bodies are kept; the context and argument stack are cleared.
    void reset_transient();

    // --- state ---------------------------------------------------------------
    const TraceP& current() const { return cur_; }
    const Context& context() const { return ctx_; }
    const std::vector<TraceP>& args() const { return args_; }  // back() is the top
    const HandlerTable& handlers() const { return table_; }
    bool context_empty() const { return ctx_.empty(); }
    bool args_empty() const { return args_.empty(); }

    std::string state_text() const;

  private:
    TraceP cur_;
    Context ctx_;
    std::vector<TraceP> args_;
    HandlerTable table_;
    int next_handler_ = 1;
};

bool handler_tables_equal(const HandlerTable& a, const HandlerTable& b);

// Snapshot of (c, kappa, alpha, T) for golden tests and diagnostics.
struct BuilderState {
    TraceP current;
    Context context;
    std::vector<TraceP> args;
    HandlerTable table;

    static BuilderState of(const Builder& b) {
        return BuilderState{b.current(), b.context(), b.args(), b.handlers()};
    }
    bool operator==(const BuilderState& o) const;
    std::string text() const;
};

}  // namespace accel::trace
