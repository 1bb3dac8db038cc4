#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accel/builder.hpp"
#include "accel/instrument.hpp"
#include "accel/interpreter.hpp"
#include "accel/upstream.hpp"

#include "helpers.hpp"

namespace accel::testing {

// Checks that a trace refines another: unknown subtrees may be replaced, but
// no known subtree ever changes into a different known subtree.
inline bool refines(const trace::TraceP& before, const trace::TraceP& after,
                    std::string& why) {
    using trace::Kind;
    if (before->kind == Kind::Unknown) return true;
    if (after->kind == Kind::Unknown) {
        why = "known subtree became unknown: " + trace::to_text(before);
        return false;
    }
    if (before->kind != after->kind || before->name != after->name ||
        before->op != after->op || before->handler != after->handler ||
        !(before->value == after->value) || before->kids.size() != after->kids.size() ||
        before->fields.size() != after->fields.size()) {
        why = "subtree changed shape:\n  before: " + trace::to_text(before) +
              "\n  after:  " + trace::to_text(after);
        return false;
    }
    for (size_t i = 0; i < before->kids.size(); i++)
        if (!refines(before->kids[i], after->kids[i], why)) return false;
    for (size_t i = 0; i < before->fields.size(); i++) {
        if (before->fields[i].first != after->fields[i].first) {
            why = "environment entry renamed";
            return false;
        }
        if (!refines(before->fields[i].second, after->fields[i].second, why)) return false;
    }
    return true;
}

// Structural sanity of a trace tree: child counts per kind, no null children.
inline bool well_formed(const trace::TraceP& t, std::string& why) {
    using trace::Kind;
    if (!t) {
        why = "null node";
        return false;
    }
    size_t want = SIZE_MAX;
    switch (t->kind) {
        case Kind::Unknown:
        case Kind::Constant:
        case Kind::Var:
        case Kind::VarAddr: want = 0; break;
        case Kind::Let:
        case Kind::Label:
        case Kind::Break:
        case Kind::Respond:
        case Kind::EnvRead:
        case Kind::EnvAddr:
        case Kind::Member: want = 1; break;
        case Kind::Binop:
        case Kind::While:
        case Kind::Set:
        case Kind::Event:
        case Kind::Index: want = 2; break;
        case Kind::If: want = 3; break;
        case Kind::Block:
        case Kind::ArrayLit:
        case Kind::Env:
        case Kind::ObjectLit: want = SIZE_MAX; break;
    }
    if (want != SIZE_MAX && t->kids.size() != want) {
        why = "bad child count on " + trace::to_text(t);
        return false;
    }
    for (const auto& k : t->kids)
        if (!well_formed(k, why)) return false;
    for (const auto& [_, v] : t->fields)
        if (!well_formed(v, why)) return false;
    return true;
}

// Folds the context by repeated popping on a scratch builder-like state; the
// independent oracle that plug() must agree with.
inline trace::TraceP fold_by_popping(trace::TraceP c, trace::Context ctx) {
    using trace::Frame;
    while (!ctx.empty()) {
        Frame f = std::move(ctx.back());
        ctx.pop_back();
        switch (f.kind) {
            case Frame::Kind::Seq: {
                std::vector<trace::TraceP> body = std::move(f.done);
                body.push_back(c);
                body.insert(body.end(), f.todo.begin(), f.todo.end());
                c = trace::t_block(std::move(body));
                break;
            }
            case Frame::Kind::IfTrue: c = trace::t_if(f.cond, c, f.other); break;
            case Frame::Kind::IfFalse: c = trace::t_if(f.cond, f.other, c); break;
            case Frame::Kind::While: c = trace::t_while(f.cond, c); break;
            case Frame::Kind::Label: c = trace::t_label(f.name, c); break;
            case Frame::Kind::Named: c = trace::t_let(f.name, c); break;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Random guest programs: branches, bounded loops, labeled breaks, and nested
// functions whose conditions read request fields, so repeated requests take
// different paths through the same trace tree.
// ---------------------------------------------------------------------------

class GuestProgramGenerator {
  public:
    explicit GuestProgramGenerator(uint64_t seed) : rng_(seed) {}

    std::string generate() {
        out_.str("");
        var_counter_ = 0;
        label_counter_ = 0;
        fn_counter_ = 0;
        out_ << "function main(req) {\n";
        vars_ = {"a", "b"};
        labels_.clear();
        emit("  let a = req.body.a;\n");
        emit("  let b = req.body.b;\n");
        emit("  let acc = 0;\n");
        vars_.push_back("acc");
        gen_stmts(2, pick(2, 5));
        emit("  respond(acc);\n");
        out_ << "}\n";
        return out_.str();
    }

  private:
    std::mt19937_64 rng_;
    std::ostringstream out_;
    std::vector<std::string> vars_;
    std::vector<std::string> counters_;  // loop counters: readable, never assigned
    std::vector<std::string> labels_;
    int var_counter_ = 0, label_counter_ = 0, fn_counter_ = 0;
    int indent_ = 1;

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    void emit(const std::string& s) { out_ << s; }
    void line(const std::string& s) { out_ << std::string(indent_ * 2, ' ') << s << "\n"; }

    std::string var() { return vars_[static_cast<size_t>(pick(0, static_cast<int>(vars_.size()) - 1))]; }

    std::string assignable() {
        for (int tries = 0; tries < 8; tries++) {
            std::string v = var();
            bool is_counter = false;
            for (const auto& c : counters_)
                if (c == v) is_counter = true;
            if (!is_counter) return v;
        }
        return "acc";
    }

    std::string expr(int depth = 0) {
        int k = pick(0, depth > 1 ? 1 : 4);
        switch (k) {
            case 0: return std::to_string(pick(-3, 9));
            case 1: return var();
            case 2: return var() + " + " + std::to_string(pick(0, 5));
            case 3: return var() + " * " + std::to_string(pick(1, 3));
            default: return var() + " - " + var();
        }
    }

    std::string cond() {
        int k = pick(0, 2);
        if (k == 0) return var() + " < " + std::to_string(pick(-2, 8));
        if (k == 1) return var() + " > " + var();
        return var() + " === " + std::to_string(pick(0, 4));
    }

    void gen_stmt(int depth) {
        int k = pick(0, depth > 0 ? 6 : 2);
        switch (k) {
            case 0: {
                std::string name = "v" + std::to_string(var_counter_++);
                line("let " + name + " = " + expr() + ";");
                vars_.push_back(name);
                return;
            }
            case 1: line(assignable() + " = " + expr() + ";"); return;
            case 2: line("acc = acc + " + var() + ";"); return;
            case 3: {
                line("if (" + cond() + ") {");
                size_t fence = vars_.size();
                indent_++;
                gen_stmts(depth - 1, pick(1, 3));
                indent_--;
                vars_.resize(fence);
                if (pick(0, 1) == 0) {
                    line("} else {");
                    indent_++;
                    gen_stmts(depth - 1, pick(1, 2));
                    indent_--;
                    vars_.resize(fence);
                }
                line("}");
                return;
            }
            case 4: {
                std::string i = "i" + std::to_string(var_counter_++);
                line("let " + i + " = 0;");
                vars_.push_back(i);
                counters_.push_back(i);
                line("while (" + i + " < " + std::to_string(pick(1, 4)) + ") {");
                size_t fence = vars_.size();
                indent_++;
                gen_stmts(depth - 1, pick(1, 2));
                line(i + " = " + i + " + 1;");
                indent_--;
                vars_.resize(fence);
                line("}");
                counters_.pop_back();
                return;
            }
            case 5: {
                std::string lbl = "exit" + std::to_string(label_counter_++);
                line(lbl + ": {");
                labels_.push_back(lbl);
                size_t fence = vars_.size();
                indent_++;
                gen_stmts(depth - 1, pick(1, 2));
                line("if (" + cond() + ") {");
                indent_++;
                line("break " + lbl + ";");
                indent_--;
                line("}");
                line("acc = acc + 1;");
                indent_--;
                vars_.resize(fence);
                labels_.pop_back();
                line("}");
                return;
            }
            default: {
                std::string fn = "fn" + std::to_string(fn_counter_++);
                std::string r = "r" + std::to_string(var_counter_++);
                size_t fence = vars_.size();
                size_t counter_fence = counters_.size();
                line("let " + fn + " = function(p) {");
                indent_++;
                vars_.push_back("p");
                gen_stmts(depth - 1, pick(1, 2));
                line("return p + " + std::to_string(pick(0, 3)) + ";");
                vars_.resize(fence);
                counters_.resize(counter_fence);
                indent_--;
                line("};");
                line("let " + r + " = " + fn + "(" + expr() + ");");
                vars_.push_back(r);
                return;
            }
        }
    }

    void gen_stmts(int depth, int n) {
        for (int i = 0; i < n; i++) gen_stmt(depth);
    }
};

struct ZipperFuzzReport {
    uint64_t programs = 0;
    uint64_t requests = 0;
    uint64_t steps = 0;
    bool ok = true;
    std::string failure;
};

// Runs randomly generated guest programs through the tracing interpreter and
// checks, after every runtime operation, that plugging the zipper agrees with
// iterated popping and yields a structurally sound tree; across requests the
// handler table may only refine.
inline ZipperFuzzReport run_zipper_fuzz(uint64_t seeds, int requests_per_program,
                                        uint64_t base_seed = 7) {
    ZipperFuzzReport report;
    for (uint64_t s = 0; s < seeds && report.ok; s++) {
        GuestProgramGenerator gen(base_seed + s);
        std::string src = gen.generate();
        ast::Program prog;
        try {
            prog = compile::instrument(frontend(src));
        } catch (const std::exception& e) {
            report.ok = false;
            report.failure = std::string("generated program failed the frontend: ") + e.what() +
                             "\n" + src;
            break;
        }
        report.programs++;

        trace::Builder builder;
        MapUpstream upstream;
        interp::InterpreterOptions opts;
        opts.observer = [&](const char* op, const trace::Builder& b) {
            report.steps++;
            if (!report.ok) return;
            std::string why;
            trace::TraceP plugged = trace::plug(b.current(), b.context());
            if (!well_formed(plugged, why)) {
                report.ok = false;
                report.failure = "after op '" + std::string(op) + "': " + why + "\n" + src;
                return;
            }
            trace::TraceP popped = fold_by_popping(b.current(), b.context());
            if (!trace::trace_equal(plugged, popped)) {
                report.ok = false;
                report.failure = "plug() and iterated pop disagree after '" + std::string(op) +
                                 "':\n  plug: " + trace::to_text(plugged) +
                                 "\n  pop:  " + trace::to_text(popped);
            }
        };

        std::mt19937_64 req_rng(base_seed * 31 + s);
        trace::HandlerTable previous = builder.handlers();
        interp::Json first_body;
        for (int r = 0; r < requests_per_program && report.ok; r++) {
            interp::Request req;
            req.body["a"] = std::uniform_int_distribution<int>(-3, 9)(req_rng);
            req.body["b"] = std::uniform_int_distribution<int>(-3, 9)(req_rng);
            if (r == 0) first_body = req.body;
            interp::Interpreter interp(prog, upstream, &builder, opts);
            interp::Response res = interp.run_request(req);
            report.requests++;
            if (res.status != 200) {
                report.ok = false;
                report.failure = "traced request failed (" + std::to_string(res.status) +
                                 "): " + res.body + "\n" + src;
                break;
            }
            if (!builder.context_empty() || !builder.args_empty()) {
                report.ok = false;
                report.failure = "context or argument stack not empty at request boundary";
                break;
            }
            std::string why;
            for (const auto& [n, h] : previous) {
                auto it = builder.handlers().find(n);
                if (it == builder.handlers().end()) {
                    report.ok = false;
                    report.failure = "handler " + std::to_string(n) + " disappeared";
                    break;
                }
                if (!refines(h.body, it->second.body, why)) {
                    report.ok = false;
                    report.failure = "monotonic refinement violated: " + why;
                    break;
                }
            }
            previous = builder.handlers();
        }

        if (report.ok) {
            // Re-trace idempotence: replaying one request twice leaves the
            // saved trace state identical after the second run.
            interp::Request req;
            req.body = first_body;
            interp::Interpreter once(prog, upstream, &builder, opts);
            once.run_request(req);
            trace::TraceP c_first = builder.current();
            trace::HandlerTable t_first = builder.handlers();
            interp::Interpreter twice(prog, upstream, &builder, opts);
            twice.run_request(req);
            if (!trace::trace_equal(c_first, builder.current()) ||
                !trace::handler_tables_equal(t_first, builder.handlers())) {
                report.ok = false;
                report.failure = "re-trace of an identical request changed (c, T)";
            }
        }
    }
    return report;
}

}  // namespace accel::testing
