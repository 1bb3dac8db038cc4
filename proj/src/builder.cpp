#include "accel/builder.hpp"

#include <sstream>

namespace accel::trace {

namespace {

std::string describe(const TraceP& t) { return to_text(t); }

[[noreturn]] void corrupt(const std::string& what, const TraceP& c) {
    throw TraceCorruption(what + " (current trace: " + describe(c) + ")");
}

[[noreturn]] void diverge(const std::string& what, const TraceP& c) {
    throw TraceDivergence(what + " (current trace: " + describe(c) + ")");
}

}  // namespace

bool Handler::operator==(const Handler& o) const {
    if (arg_id != o.arg_id || env_id != o.env_id) return false;
    if (!trace_equal(body, o.body)) return false;
    if (static_cast<bool>(env_trace) != static_cast<bool>(o.env_trace)) return false;
    if (env_trace && !trace_equal(env_trace, o.env_trace)) return false;
    return true;
}

bool handler_tables_equal(const HandlerTable& a, const HandlerTable& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [n, h] : a) {
        auto it = b.find(n);
        if (it == b.end() || !(it->second == h)) return false;
    }
    return true;
}

Builder::Builder() : cur_(t_unknown()) {
    // Handler 0 holds the trace for the program's main body.
    table_[0] = Handler{"x$0", "env", t_unknown(), nullptr};
}

void Builder::record_let(const std::string& name, TraceP value) {
    cur_ = t_let(name, std::move(value));
}

void Builder::record_set(TraceP target, TraceP value) {
    cur_ = t_set(std::move(target), std::move(value));
}

void Builder::record_break(const std::string& label, TraceP value) {
    cur_ = t_break(label, std::move(value));
}

void Builder::record_respond(TraceP value) {
    if (cur_->kind != Kind::Unknown && cur_->kind != Kind::Respond)
        diverge("respond recorded where the trace has a different shape", cur_);
    cur_ = t_respond(std::move(value));
}

void Builder::record_empty_block() { cur_ = t_block({}); }

void Builder::enter_seq(size_t n) {
    if (n == 0) corrupt("enterSeq(0): empty blocks record as leaves", cur_);
    if (cur_->kind == Kind::Unknown) {
        Frame f;
        f.kind = Frame::Kind::Seq;
        f.todo.assign(n - 1, t_unknown());
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::Block) corrupt("enterSeq: current trace is not a block", cur_);
    if (cur_->kids.size() != n)
        diverge("enterSeq: block arity changed between runs", cur_);
    Frame f;
    f.kind = Frame::Kind::Seq;
    f.todo.assign(cur_->kids.begin() + 1, cur_->kids.end());
    TraceP first = cur_->kids.front();
    ctx_.push_back(std::move(f));
    cur_ = std::move(first);
}

void Builder::seq_next() {
    if (ctx_.empty() || ctx_.back().kind != Frame::Kind::Seq)
        corrupt("seqNext: innermost frame is not a sequence", cur_);
    Frame& f = ctx_.back();
    if (f.todo.empty()) corrupt("seqNext: no statements left in the sequence", cur_);
    f.done.push_back(cur_);
    cur_ = f.todo.front();
    f.todo.erase(f.todo.begin());
}

void Builder::enter_if_true(TraceP cond) {
    Frame f;
    f.kind = Frame::Kind::IfTrue;
    if (cur_->kind == Kind::Unknown) {
        f.cond = std::move(cond);
        f.other = t_unknown();
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::If) corrupt("ifTrue: current trace is not a conditional", cur_);
    if (!trace_equal(cur_->kids[0], cond))
        diverge("ifTrue: condition trace changed between runs", cur_);
    f.cond = cur_->kids[0];
    f.other = cur_->kids[2];
    TraceP then_part = cur_->kids[1];
    ctx_.push_back(std::move(f));
    cur_ = std::move(then_part);
}

void Builder::enter_if_false(TraceP cond) {
    Frame f;
    f.kind = Frame::Kind::IfFalse;
    if (cur_->kind == Kind::Unknown) {
        f.cond = std::move(cond);
        f.other = t_unknown();
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::If) corrupt("ifFalse: current trace is not a conditional", cur_);
    if (!trace_equal(cur_->kids[0], cond))
        diverge("ifFalse: condition trace changed between runs", cur_);
    f.cond = cur_->kids[0];
    f.other = cur_->kids[1];
    TraceP else_part = cur_->kids[2];
    ctx_.push_back(std::move(f));
    cur_ = std::move(else_part);
}

void Builder::enter_while(TraceP cond) {
    Frame f;
    f.kind = Frame::Kind::While;
    if (cur_->kind == Kind::Unknown) {
        f.cond = std::move(cond);
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::While) corrupt("while: current trace is not a loop", cur_);
    if (!trace_equal(cur_->kids[0], cond))
        diverge("while: loop guard trace changed between runs", cur_);
    f.cond = cur_->kids[0];
    TraceP body = cur_->kids[1];
    ctx_.push_back(std::move(f));
    cur_ = std::move(body);
}

void Builder::enter_label(const std::string& label) {
    Frame f;
    f.kind = Frame::Kind::Label;
    f.name = label;
    if (cur_->kind == Kind::Unknown) {
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::Label) corrupt("label: current trace is not labeled", cur_);
    if (cur_->name != label) diverge("label: label changed between runs", cur_);
    TraceP body = cur_->kids[0];
    ctx_.push_back(std::move(f));
    cur_ = std::move(body);
}

void Builder::enter_named(const std::string& name) {
    Frame f;
    f.kind = Frame::Kind::Named;
    f.name = name;
    if (cur_->kind == Kind::Unknown) {
        ctx_.push_back(std::move(f));
        cur_ = t_unknown();
        return;
    }
    if (cur_->kind != Kind::Let) corrupt("named: current trace is not a let", cur_);
    if (cur_->name != name) diverge("named: bound name changed between runs", cur_);
    TraceP value = cur_->kids[0];
    ctx_.push_back(std::move(f));
    cur_ = std::move(value);
}

void Builder::pop() {
    if (ctx_.empty()) corrupt("pop on an empty trace context", cur_);
    Frame f = std::move(ctx_.back());
    ctx_.pop_back();
    switch (f.kind) {
        case Frame::Kind::Seq: {
            std::vector<TraceP> body = std::move(f.done);
            body.push_back(cur_);
            body.insert(body.end(), f.todo.begin(), f.todo.end());
            cur_ = t_block(std::move(body));
            break;
        }
        case Frame::Kind::IfTrue: cur_ = t_if(f.cond, cur_, f.other); break;
        case Frame::Kind::IfFalse: cur_ = t_if(f.cond, f.other, cur_); break;
        case Frame::Kind::While: cur_ = t_while(f.cond, cur_); break;
        case Frame::Kind::Label: cur_ = t_label(f.name, cur_); break;
        case Frame::Kind::Named: cur_ = t_let(f.name, cur_); break;
    }
}

void Builder::pop_to(const std::string& label) {
    while (true) {
        if (ctx_.empty()) corrupt("popTo: label '" + label + "' is not in the context", cur_);
        const Frame& top = ctx_.back();
        if (top.kind == Frame::Kind::Label && top.name == label) {
            pop();
            return;
        }
        pop();
    }
}

void Builder::push_arg(TraceP t) { args_.push_back(std::move(t)); }

TraceP Builder::pop_arg() {
    if (args_.empty()) corrupt("popArg on an empty argument stack", cur_);
    TraceP t = std::move(args_.back());
    args_.pop_back();
    return t;
}

int Builder::new_handler(const std::string& event_kind, TraceP arg, TraceP env) {
    if (cur_->kind == Kind::Event) {
        if (cur_->name != event_kind)
            diverge("event kind changed between runs ('" + cur_->name + "' vs '" +
                        event_kind + "')",
                    cur_);
        if (!trace_equal(cur_->kids[0], arg) || !trace_equal(cur_->kids[1], env))
            diverge("event argument traces changed between runs", cur_);
        return cur_->handler;
    }
    if (cur_->kind != Kind::Unknown)
        diverge("event recorded where the trace has shape " + describe(cur_), cur_);
    int n = next_handler_++;
    cur_ = t_event(event_kind, std::move(arg), std::move(env), n);
    table_[n] = Handler{"x$" + std::to_string(n), "env", t_unknown(), nullptr};
    return n;
}

void Builder::set_handler_env_trace(int n, TraceP env_trace) {
    auto it = table_.find(n);
    if (it == table_.end()) corrupt("setHandlerEnv: no handler " + std::to_string(n), cur_);
    if (it->second.env_trace && !trace_equal(it->second.env_trace, env_trace))
        diverge("handler environment trace changed between runs", cur_);
    it->second.env_trace = std::move(env_trace);
}

void Builder::load_handler(int n) {
    auto it = table_.find(n);
    if (it == table_.end()) corrupt("loadHandler: no handler " + std::to_string(n), cur_);
    if (!ctx_.empty()) corrupt("loadHandler: trace context is not empty", cur_);
    if (n != 0) {
        // The body's prologue pops the environment first and then the event
        // argument, exactly like a direct application, so the environment
        // trace goes on top. Handler 0 is the main body and has neither.
        push_arg(t_var(it->second.arg_id));
        push_arg(it->second.env_trace ? it->second.env_trace : t_env({}));
    }
    cur_ = it->second.body;
}

void Builder::save_handler(int n) {
    auto it = table_.find(n);
    if (it == table_.end()) corrupt("saveHandler: no handler " + std::to_string(n), cur_);
    if (!ctx_.empty()) corrupt("saveHandler: trace context is not empty", cur_);
    it->second.body = cur_;
}

void Builder::begin_main() {
    if (!ctx_.empty()) corrupt("beginMain: trace context is not empty", cur_);
    if (!args_.empty()) corrupt("beginMain: argument stack is not empty", cur_);
    cur_ = table_.at(0).body;
}

void Builder::reset_transient() {
    ctx_.clear();
    args_.clear();
    cur_ = t_unknown();
}

std::string Builder::state_text() const { return BuilderState::of(*this).text(); }

bool BuilderState::operator==(const BuilderState& o) const {
    if (!trace_equal(current, o.current)) return false;
    if (context != o.context) return false;
    if (args.size() != o.args.size()) return false;
    for (size_t i = 0; i < args.size(); i++)
        if (!trace_equal(args[i], o.args[i])) return false;
    return handler_tables_equal(table, o.table);
}

std::string BuilderState::text() const {
    std::ostringstream out;
    out << "c = " << to_text(current) << "\n";
    out << "alpha = [";
    // Top of stack printed first.
    for (size_t i = 0; i < args.size(); i++) {
        if (i) out << ", ";
        out << to_text(args[args.size() - 1 - i]);
    }
    out << "]\n";
    out << "kappa = " << to_text(context) << "\n";
    out << "T = {";
    bool first = true;
    for (const auto& [n, h] : table) {
        if (!first) out << ", ";
        first = false;
        out << n << " -> handler(arg: " << h.arg_id << ", env: "
            << (h.env_trace ? to_text(h.env_trace) : std::string("_"))
            << ", body: " << to_text(h.body) << ")";
    }
    out << "}";
    return out.str();
}

}  // namespace accel::trace
