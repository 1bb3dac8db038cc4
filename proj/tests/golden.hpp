#pragma once

#include <sstream>
#include <string>

#include "accel/instrument.hpp"
#include "accel/interpreter.hpp"
#include "accel/upstream.hpp"

#include "helpers.hpp"

// The three worked tracing examples, checked as exact state sequences: the
// conditional, the function application, and the event handler. Each returns
// an empty string on success and a diagnostic otherwise.

namespace accel::testing {

struct GoldenCheck {
    std::ostringstream log;
    bool ok = true;

    void expect(const trace::BuilderState& got, const ExpectState& want,
                const std::string& where) {
        std::string why;
        if (!want.matches(got, why)) {
            ok = false;
            log << where << ": " << why << "\n";
        }
    }
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << what << "\n";
        }
    }
    std::string result() const { return ok ? "" : log.str(); }
};

// ---------------------------------------------------------------------------
// Conditional example: if (x < 0) y = x * -1; else y = x;
// First run with x < 0, second with x >= 0; four states per run.
// ---------------------------------------------------------------------------

inline std::string golden_if_example() {
    GoldenCheck g;

    ast::Program fragment = ast::parse("if (x < 0) y = x * -1; else y = x;");
    compile::CompileEnv env = compile::CompileEnv::with_builtins();
    compile::Place px;
    px.name = "x";
    env.bind("x", px);
    compile::Place py;
    py.name = "y";
    env.bind("y", py);
    std::vector<ast::StmtP> stmts = compile::compile_stmt(fragment.body[0], env);

    trace::TraceP cond = trace::t_binop("<", t::v("x"), t::n(0));
    trace::TraceP set_neg = trace::t_set(t::v("y"), trace::t_binop("*", t::v("x"), t::n(-1)));
    trace::TraceP set_id = trace::t_set(t::v("y"), t::v("x"));

    trace::Builder builder;
    MapUpstream upstream;

    // First execution: x = -5.
    StateRecorder rec1;
    {
        interp::Interpreter interp({}, upstream, &builder, rec1.options());
        interp.run_fragment(stmts, {{"x", interp::GuestValue::integer(-5)},
                                    {"y", interp::GuestValue::integer(0)}});
    }
    g.require(rec1.ops() == std::vector<std::string>{"ifTrue", "set", "pop"},
              "first run executed ops: ifTrue, set, pop");
    if (!g.ok) return g.result();

    g.expect(rec1.after("ifTrue"), ExpectState{t::u(), trace::Context{t::if_true(cond, t::u())}, {}},
             "run 1 after ifTrue");
    g.expect(rec1.after("set"), ExpectState{set_neg, trace::Context{t::if_true(cond, t::u())}, {}},
             "run 1 after set");
    g.expect(rec1.after("pop"),
             ExpectState{trace::t_if(cond, set_neg, t::u()), trace::Context{}, {}},
             "run 1 after pop");

    // Second execution: x = 7; tracing resumes from the previous trace.
    StateRecorder rec2;
    {
        interp::Interpreter interp({}, upstream, &builder, rec2.options());
        interp.run_fragment(stmts, {{"x", interp::GuestValue::integer(7)},
                                    {"y", interp::GuestValue::integer(0)}});
    }
    g.require(rec2.ops() == std::vector<std::string>{"ifFalse", "set", "pop"},
              "second run executed ops: ifFalse, set, pop");
    if (!g.ok) return g.result();

    g.expect(rec2.after("ifFalse"),
             ExpectState{t::u(), trace::Context{t::if_false(cond, set_neg)}, {}},
             "run 2 after ifFalse");
    g.expect(rec2.after("set"),
             ExpectState{set_id, trace::Context{t::if_false(cond, set_neg)}, {}},
             "run 2 after set");
    trace::TraceP complete = trace::t_if(cond, set_neg, set_id);
    g.expect(rec2.after("pop"), ExpectState{complete, trace::Context{}, {}}, "run 2 after pop");
    g.require(!trace::contains_unknown(rec2.after("pop").current),
              "final trace is free of unknown");
    return g.result();
}

// ---------------------------------------------------------------------------
// Function application example:
//   let x = 10;  let F = function(y) { return x + y; };  let foo = F(3);
// Eleven states.
// ---------------------------------------------------------------------------

inline std::string golden_fun_example() {
    GoldenCheck g;

    const char* src = R"JS(
let x = 10;
let F = function(y) {
  return x + y;
};
let foo = F(3);
)JS";
    ast::Program prog = instrumented(src);

    trace::Builder builder;
    MapUpstream upstream;
    StateRecorder rec;
    interp::Interpreter interp(prog, upstream, &builder, rec.options());
    interp.run_request(interp::Request{});

    std::vector<std::string> expected_ops = {
        "beginMain", "enterSeq", "let",  "seqNext", "let",  "seqNext", "pushArg",
        "pushArg",   "named",    "label", "enterSeq", "let", "seqNext", "let",
        "seqNext",   "break",    "popTo", "pop",      "pop", "saveHandler"};
    g.require(rec.ops() == expected_ops, "operation sequence matches the worked example");
    if (!g.ok) {
        g.log << "  got:";
        for (const auto& op : rec.ops()) g.log << " " << op;
        g.log << "\n";
        return g.result();
    }

    trace::TraceP let_x = trace::t_let("x", t::n(10));
    trace::TraceP env_x = trace::t_env({{"x", trace::t_var_addr("x")}});
    trace::TraceP let_f = trace::t_let("F", env_x);
    trace::TraceP let_env = trace::t_let("env", t::v("F"));
    trace::TraceP let_y = trace::t_let("y", t::n(3));
    trace::TraceP brk = trace::t_break(
        "$return", trace::t_binop("+", trace::t_env_read(t::v("env"), "x"), t::v("y")));

    // Row 1: the initial state.
    g.expect(rec.after("beginMain"), ExpectState{t::u(), trace::Context{}, {{}}}, "row 1");
    // Row 2: after recording let x = 10.
    g.expect(rec.after("let", 1),
             ExpectState{let_x, trace::Context{t::seq({}, {t::u(), t::u()})}, {{}}}, "row 2");
    // Row 3: F is bound to its environment.
    g.expect(rec.after("let", 2),
             ExpectState{let_f, trace::Context{t::seq({let_x}, {t::u()})}, {{}}}, "row 3");
    // Row 4: both argument traces pushed (top of stack is F).
    g.expect(rec.after("pushArg", 2),
             ExpectState{t::u(), trace::Context{t::seq({let_x, let_f}, {})},
                         {{t::n(3), t::v("F")}}},
             "row 4");
    // Row 5: inside the call, under label($return) and named(foo).
    g.expect(rec.after("label"),
             ExpectState{t::u(),
                         trace::Context{t::seq({let_x, let_f}, {}), t::named("foo"),
                                        t::label("$return")},
                         {{t::n(3), t::v("F")}}},
             "row 5");
    // Row 6: the body popped the environment trace.
    g.expect(rec.after("let", 3),
             ExpectState{let_env,
                         trace::Context{t::seq({let_x, let_f}, {}), t::named("foo"),
                                        t::label("$return"), t::seq({}, {t::u(), t::u()})},
                         {{t::n(3)}}},
             "row 6");
    // Row 7: the body popped the argument trace.
    g.expect(rec.after("let", 4),
             ExpectState{let_y,
                         trace::Context{t::seq({let_x, let_f}, {}), t::named("foo"),
                                        t::label("$return"), t::seq({let_env}, {t::u()})},
                         {{}}},
             "row 7");
    // Row 8: the return recorded a break carrying *env.x + y.
    g.expect(rec.after("break"),
             ExpectState{brk,
                         trace::Context{t::seq({let_x, let_f}, {}), t::named("foo"),
                                        t::label("$return"), t::seq({let_env, let_y}, {})},
                         {{}}},
             "row 8");
    // Row 9: popTo($return) folded the body into a labeled block.
    trace::TraceP body = trace::t_label("$return", trace::t_block({let_env, let_y, brk}));
    g.expect(rec.after("popTo"),
             ExpectState{body, trace::Context{t::seq({let_x, let_f}, {}), t::named("foo")},
                         {{}}},
             "row 9");
    // Row 10: the call folded into let foo = ...
    trace::TraceP let_foo = trace::t_let("foo", body);
    g.expect(rec.after("pop", 1),
             ExpectState{let_foo, trace::Context{t::seq({let_x, let_f}, {})}, {{}}}, "row 10");
    // Row 11: the whole program.
    trace::TraceP whole = trace::t_block({let_x, let_f, let_foo});
    g.expect(rec.after("pop", 2), ExpectState{whole, trace::Context{}, {{}}}, "row 11");
    return g.result();
}

// ---------------------------------------------------------------------------
// Event handler example:
//   let F = function(resp) { out = resp; };
//   let r = get('example.com', F);
// Six states, ending with the traced callback stored in handler 1.
// ---------------------------------------------------------------------------

inline std::string golden_get_example() {
    GoldenCheck g;

    const char* src = R"JS(
let F = function(resp) {
  out = resp;
};
let r = get('example.com', F);
)JS";
    ast::Program prog = instrumented(src);

    trace::Builder builder;
    MapUpstream upstream;
    upstream.route("example.com", "{\"body\":\"data\"}");
    StateRecorder rec;
    interp::Interpreter interp(prog, upstream, &builder, rec.options());
    interp.run_request(interp::Request{});

    std::vector<std::string> expected_ops = {
        "beginMain", "enterSeq", "let",        "seqNext", "pushArg", "pushArg",
        "pushArg",   "named",    "newHandler", "pop",     "pop",     "saveHandler",
        "loadHandler", "label",  "enterSeq",   "let",     "seqNext", "let",
        "seqNext",   "set",      "pop",        "pop",     "saveHandler"};
    g.require(rec.ops() == expected_ops, "operation sequence matches the worked example");
    if (!g.ok) {
        g.log << "  got:";
        for (const auto& op : rec.ops()) g.log << " " << op;
        g.log << "\n";
        return g.result();
    }

    trace::TraceP empty_env = trace::t_env({});
    trace::TraceP let_f = trace::t_let("F", empty_env);
    trace::TraceP event = trace::t_event("get", t::s("example.com"), t::v("F"), 1);

    // Row 1: before the call executes, all three argument traces are pushed.
    g.expect(rec.after("named"),
             ExpectState{t::u(), trace::Context{t::seq({let_f}, {}), t::named("r")},
                         {{t::v("F"), t::s("example.com"), t::v("get")}}},
             "row 1");
    // Row 2: the builtin registered handler 1 and recorded the event.
    {
        const auto& state = rec.after("newHandler");
        g.expect(state,
                 ExpectState{event, trace::Context{t::seq({let_f}, {}), t::named("r")}, {{}}},
                 "row 2");
        auto it = state.table.find(1);
        g.require(it != state.table.end(), "row 2: handler 1 exists");
        if (it != state.table.end()) {
            g.require(it->second.body->kind == trace::Kind::Unknown,
                      "row 2: handler 1 body is unknown");
            g.require(it->second.env_trace && trace::trace_equal(it->second.env_trace, empty_env),
                      "row 2: handler 1 environment trace is env()");
            g.require(it->second.arg_id == "x$1", "row 2: handler 1 argument id");
        }
    }
    // Row 3: the main body is saved with the event in place.
    trace::TraceP let_r = trace::t_let("r", event);
    trace::TraceP main_body = trace::t_block({let_f, let_r});
    {
        const auto& state = rec.after("saveHandler", 1);
        g.expect(state, ExpectState{main_body, trace::Context{}, {{}}}, "row 3");
        auto it = state.table.find(0);
        g.require(it != state.table.end() &&
                      trace::trace_equal(it->second.body, main_body),
                  "row 3: handler 0 holds the main body");
    }
    // Row 4: loading handler 1 pushes the argument id, then the env trace on
    // top for the prologue to pop first.
    g.expect(rec.after("loadHandler"),
             ExpectState{t::u(), trace::Context{}, {{t::v("x$1"), empty_env}}}, "row 4");
    // Row 5: after the callback returns, before saving.
    trace::TraceP cb_body = trace::t_label(
        "$return",
        trace::t_block({trace::t_let("env", empty_env), trace::t_let("resp", t::v("x$1")),
                        trace::t_set(t::v("out"), t::v("resp"))}));
    // Pops 1 and 2 close the call site; pops 3 and 4 close the callback body.
    g.expect(rec.after("pop", 4), ExpectState{cb_body, trace::Context{}, {{}}}, "row 5");
    {
        const auto& state = rec.after("pop", 4);
        auto it = state.table.find(1);
        g.require(it != state.table.end() && it->second.body->kind == trace::Kind::Unknown,
                  "row 5: handler 1 body is still unknown before saving");
    }
    // Row 6: the callback trace is stored in handler 1.
    {
        const auto& state = rec.after("saveHandler", 2);
        auto it = state.table.find(1);
        g.require(it != state.table.end() && trace::trace_equal(it->second.body, cb_body),
                  "row 6: handler 1 body is the labeled callback trace");
    }
    return g.result();
}

}  // namespace accel::testing
