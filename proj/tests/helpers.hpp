#pragma once

#include <string>
#include <utility>
#include <vector>

#include "accel/builder.hpp"
#include "accel/desugar.hpp"
#include "accel/instrument.hpp"
#include "accel/interpreter.hpp"
#include "accel/parser.hpp"
#include "accel/upstream.hpp"

namespace accel::testing {

inline ast::Program frontend(const std::string& src) {
    return ast::desugar(ast::parse(src));
}

inline ast::Program instrumented(const std::string& src) {
    return compile::instrument(frontend(src));
}

// Records (operation, builder state) after every tracing-runtime call.
struct StateRecorder {
    std::vector<std::pair<std::string, trace::BuilderState>> steps;

    interp::InterpreterOptions options() {
        interp::InterpreterOptions opts;
        opts.observer = [this](const char* op, const trace::Builder& b) {
            steps.emplace_back(op, trace::BuilderState::of(b));
        };
        return opts;
    }

    std::vector<std::string> ops() const {
        std::vector<std::string> names;
        names.reserve(steps.size());
        for (const auto& [op, _] : steps) names.push_back(op);
        return names;
    }

    // State after the k-th occurrence (1-based) of `op`.
    const trace::BuilderState& after(const std::string& op, int k = 1) const {
        int seen = 0;
        for (const auto& [name, state] : steps) {
            if (name == op && ++seen == k) return state;
        }
        throw std::runtime_error("no occurrence " + std::to_string(k) + " of op '" + op + "'");
    }
};

// Builds trace fragments tersely in expected-state constructions.
namespace t {
using namespace accel::trace;

inline TraceP v(const std::string& name) { return t_var(name); }
inline TraceP n(int64_t value) { return t_integer(value); }
inline TraceP s(const std::string& value) { return t_string(value); }
inline TraceP u() { return t_unknown(); }

inline Frame seq(std::vector<TraceP> done, std::vector<TraceP> todo) {
    Frame f;
    f.kind = Frame::Kind::Seq;
    f.done = std::move(done);
    f.todo = std::move(todo);
    return f;
}
inline Frame if_true(TraceP cond, TraceP other) {
    Frame f;
    f.kind = Frame::Kind::IfTrue;
    f.cond = std::move(cond);
    f.other = std::move(other);
    return f;
}
inline Frame if_false(TraceP cond, TraceP other) {
    Frame f;
    f.kind = Frame::Kind::IfFalse;
    f.cond = std::move(cond);
    f.other = std::move(other);
    return f;
}
inline Frame while_frame(TraceP cond) {
    Frame f;
    f.kind = Frame::Kind::While;
    f.cond = std::move(cond);
    return f;
}
inline Frame label(const std::string& name) {
    Frame f;
    f.kind = Frame::Kind::Label;
    f.name = name;
    return f;
}
inline Frame named(const std::string& name) {
    Frame f;
    f.kind = Frame::Kind::Named;
    f.name = name;
    return f;
}
}  // namespace t

// Compares a recorded state against expectations, with readable failures.
struct ExpectState {
    trace::TraceP current;
    std::optional<trace::Context> context;
    std::optional<std::vector<trace::TraceP>> args;  // bottom to top

    bool matches(const trace::BuilderState& got, std::string& why) const {
        if (current && !trace::trace_equal(got.current, current)) {
            why = "current trace mismatch:\n  expected: " + trace::to_text(current) +
                  "\n  got:      " + trace::to_text(got.current);
            return false;
        }
        if (context) {
            if (!(got.context == *context)) {
                why = "context mismatch:\n  expected: " + trace::to_text(*context) +
                      "\n  got:      " + trace::to_text(got.context);
                return false;
            }
        }
        if (args) {
            bool equal = got.args.size() == args->size();
            if (equal)
                for (size_t i = 0; i < args->size(); i++)
                    if (!trace::trace_equal(got.args[i], (*args)[i])) equal = false;
            if (!equal) {
                std::string expected, actual;
                for (const auto& a : *args) expected += trace::to_text(a) + " ";
                for (const auto& a : got.args) actual += trace::to_text(a) + " ";
                why = "argument stack mismatch:\n  expected (bottom..top): " + expected +
                      "\n  got:      " + actual;
                return false;
            }
        }
        return true;
    }
};

}  // namespace accel::testing
