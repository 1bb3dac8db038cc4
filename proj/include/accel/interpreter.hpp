#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "accel/ast.hpp"
#include "accel/builder.hpp"
#include "accel/upstream.hpp"
#include "accel/value.hpp"

namespace accel::interp {

struct Request {
    std::string method = "POST";
    std::string path = "/";
    Json body = Json::object();
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct GuestError : std::runtime_error {
    explicit GuestError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RequestTimeout : std::runtime_error {
    RequestTimeout() : std::runtime_error("request timed out") {}
};

struct InterpreterOptions {
    int timeout_ms = 5000;
    // Called after every tracing-runtime operation with its name; drives the
    // golden-state tests and the zipper invariant suite.
    std::function<void(const char*, const trace::Builder&)> observer;
};

// Tree-walking evaluator for guest programs with the event loop and builtin
// API. With a Builder attached it runs instrumented programs and grows the
// trace; without one it is the plain oracle executor.
class Interpreter {
  public:
    Interpreter(const ast::Program& program, UpstreamClient& upstream,
                trace::Builder* builder, InterpreterOptions options = {});

    // Evaluates one request to completion: (re)runs the top level, fires the
    // listen handler, then drains the event loop.
    Response run_request(const Request& req);

    // Test hook: evaluates statements against pre-bound variables.
    void run_fragment(const std::vector<ast::StmtP>& stmts,
                      std::vector<std::pair<std::string, GuestValue>> vars);

  private:
    struct Flow {
        enum class Kind { Normal, Break, Return };
        Kind kind = Kind::Normal;
        std::string label;
        GuestValue value;
        static Flow normal() { return Flow{}; }
    };

    struct PendingOp {
        enum class Kind { HttpGet, HttpPost, Fire };
        Kind kind;
        std::string url;
        std::string post_body;
        GuestValue callback;
        GuestValue payload;  // Fire
        int handler = -1;    // tracing handler index, -1 when plain
    };

    void check_deadline();
    void observe(const char* op);

    // Scopes and closures reference each other; tearing down every scope at
    // request end breaks the cycles (nothing outlives its request).
    ScopeP new_scope(ScopeP parent);
    void teardown_scopes();

    GuestValue eval_expr(const ast::ExprP& e, const ScopeP& scope);
    GuestValue eval_binding(const ast::Binding& b, const ScopeP& scope);
    Flow eval_stmt(const ast::StmtP& s, const ScopeP& scope);
    Flow eval_stmts(const std::vector<ast::StmtP>& stmts, const ScopeP& scope);
    void exec_runtime_call(const ast::StmtP& s);

    GuestValue call_closure(const GuestValue& fn, std::vector<GuestValue> args);
    GuestValue call_builtin(BuiltinFn which, std::vector<GuestValue> args);
    void assign(const ast::ExprP& lval, GuestValue v, const ScopeP& scope);

    void run_callback(const GuestValue& cb, const GuestValue& payload, int handler);
    void drain_events();

    const ast::Program& program_;
    UpstreamClient& upstream_;
    trace::Builder* builder_;
    InterpreterOptions options_;

    ScopeP root_;
    std::vector<ScopeP> scopes_;
    std::deque<PendingOp> queue_;
    std::optional<GuestValue> response_;
    std::optional<std::pair<GuestValue, int>> listen_;  // callback + handler
    std::chrono::steady_clock::time_point deadline_;
    uint64_t step_count_ = 0;
};

// Convenience wrappers matching the module operations.
Response run_request(const ast::Program& instrumented, trace::Builder& builder,
                     const Request& req, UpstreamClient& upstream,
                     InterpreterOptions options = {});
Response run_plain(const ast::Program& desugared, const Request& req,
                   UpstreamClient& upstream, InterpreterOptions options = {});

}  // namespace accel::interp
