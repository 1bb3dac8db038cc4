#include "accel/trace.hpp"

#include <sstream>

namespace accel::trace {

namespace {
TraceP make(Node n) { return std::make_shared<const Node>(std::move(n)); }
}  // namespace

TraceP t_unknown() {
    static const TraceP unknown = make(Node{});
    return unknown;
}

TraceP t_const(Scalar v) {
    Node n;
    n.kind = Kind::Constant;
    n.value = std::move(v);
    return make(std::move(n));
}

TraceP t_number(double v) { return t_const(Scalar::number(v)); }
TraceP t_integer(int64_t v) { return t_const(Scalar::integer(v)); }
TraceP t_string(std::string v) { return t_const(Scalar::str(std::move(v))); }
TraceP t_boolean(bool v) { return t_const(Scalar::boolean(v)); }
TraceP t_undefined() { return t_const(Scalar::undefined()); }

TraceP t_var(std::string name) {
    Node n;
    n.kind = Kind::Var;
    n.name = std::move(name);
    return make(std::move(n));
}

TraceP t_binop(std::string op, TraceP left, TraceP right) {
    Node n;
    n.kind = Kind::Binop;
    n.op = std::move(op);
    n.kids = {std::move(left), std::move(right)};
    return make(std::move(n));
}

TraceP t_block(std::vector<TraceP> body) {
    Node n;
    n.kind = Kind::Block;
    n.kids = std::move(body);
    return make(std::move(n));
}

TraceP t_if(TraceP cond, TraceP then_part, TraceP else_part) {
    Node n;
    n.kind = Kind::If;
    n.kids = {std::move(cond), std::move(then_part), std::move(else_part)};
    return make(std::move(n));
}

TraceP t_while(TraceP cond, TraceP body) {
    Node n;
    n.kind = Kind::While;
    n.kids = {std::move(cond), std::move(body)};
    return make(std::move(n));
}

TraceP t_let(std::string name, TraceP value) {
    Node n;
    n.kind = Kind::Let;
    n.name = std::move(name);
    n.kids = {std::move(value)};
    return make(std::move(n));
}

TraceP t_set(TraceP target, TraceP value) {
    Node n;
    n.kind = Kind::Set;
    n.kids = {std::move(target), std::move(value)};
    return make(std::move(n));
}

TraceP t_label(std::string label, TraceP body) {
    Node n;
    n.kind = Kind::Label;
    n.name = std::move(label);
    n.kids = {std::move(body)};
    return make(std::move(n));
}

TraceP t_break(std::string label, TraceP value) {
    Node n;
    n.kind = Kind::Break;
    n.name = std::move(label);
    n.kids = {std::move(value)};
    return make(std::move(n));
}

TraceP t_event(std::string event_kind, TraceP arg, TraceP env, int handler) {
    Node n;
    n.kind = Kind::Event;
    n.name = std::move(event_kind);
    n.kids = {std::move(arg), std::move(env)};
    n.handler = handler;
    return make(std::move(n));
}

TraceP t_respond(TraceP value) {
    Node n;
    n.kind = Kind::Respond;
    n.kids = {std::move(value)};
    return make(std::move(n));
}

TraceP t_env(std::vector<std::pair<std::string, TraceP>> entries) {
    Node n;
    n.kind = Kind::Env;
    n.fields = std::move(entries);
    return make(std::move(n));
}

TraceP t_env_read(TraceP env, std::string name) {
    Node n;
    n.kind = Kind::EnvRead;
    n.name = std::move(name);
    n.kids = {std::move(env)};
    return make(std::move(n));
}

TraceP t_env_addr(TraceP env, std::string name) {
    Node n;
    n.kind = Kind::EnvAddr;
    n.name = std::move(name);
    n.kids = {std::move(env)};
    return make(std::move(n));
}

TraceP t_var_addr(std::string name) {
    Node n;
    n.kind = Kind::VarAddr;
    n.name = std::move(name);
    return make(std::move(n));
}

TraceP t_member(TraceP object, std::string name) {
    Node n;
    n.kind = Kind::Member;
    n.name = std::move(name);
    n.kids = {std::move(object)};
    return make(std::move(n));
}

TraceP t_index(TraceP object, TraceP index) {
    Node n;
    n.kind = Kind::Index;
    n.kids = {std::move(object), std::move(index)};
    return make(std::move(n));
}

TraceP t_object(std::vector<std::pair<std::string, TraceP>> entries) {
    Node n;
    n.kind = Kind::ObjectLit;
    n.fields = std::move(entries);
    return make(std::move(n));
}

TraceP t_array(std::vector<TraceP> items) {
    Node n;
    n.kind = Kind::ArrayLit;
    n.kids = std::move(items);
    return make(std::move(n));
}

bool trace_equal(const TraceP& a, const TraceP& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->name != b->name || a->op != b->op ||
        a->handler != b->handler || !(a->value == b->value))
        return false;
    if (a->kids.size() != b->kids.size() || a->fields.size() != b->fields.size()) return false;
    for (size_t i = 0; i < a->kids.size(); i++)
        if (!trace_equal(a->kids[i], b->kids[i])) return false;
    for (size_t i = 0; i < a->fields.size(); i++) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!trace_equal(a->fields[i].second, b->fields[i].second)) return false;
    }
    return true;
}

bool contains_unknown(const TraceP& t) {
    if (!t) return false;
    if (t->kind == Kind::Unknown) return true;
    for (const auto& k : t->kids)
        if (contains_unknown(k)) return true;
    for (const auto& [_, v] : t->fields)
        if (contains_unknown(v)) return true;
    return false;
}

namespace {

void print(std::ostringstream& out, const TraceP& t);

void print_list(std::ostringstream& out, const std::vector<TraceP>& items, const char* sep) {
    for (size_t i = 0; i < items.size(); i++) {
        if (i) out << sep;
        print(out, items[i]);
    }
}

void print(std::ostringstream& out, const TraceP& t) {
    if (!t) {
        out << "<null>";
        return;
    }
    switch (t->kind) {
        case Kind::Unknown: out << "unknown"; break;
        case Kind::Constant: out << scalar_to_source(t->value); break;
        case Kind::Var: out << t->name; break;
        case Kind::Binop:
            print(out, t->kids[0]);
            out << " " << t->op << " ";
            print(out, t->kids[1]);
            break;
        case Kind::Block:
            out << "{ ";
            print_list(out, t->kids, " ");
            out << " }";
            break;
        case Kind::If:
            out << "if (";
            print(out, t->kids[0]);
            out << ") ";
            print(out, t->kids[1]);
            out << " else ";
            print(out, t->kids[2]);
            break;
        case Kind::While:
            out << "while (";
            print(out, t->kids[0]);
            out << ") ";
            print(out, t->kids[1]);
            break;
        case Kind::Let:
            out << "let " << t->name << " = ";
            print(out, t->kids[0]);
            out << ";";
            break;
        case Kind::Set:
            print(out, t->kids[0]);
            out << " = ";
            print(out, t->kids[1]);
            out << ";";
            break;
        case Kind::Label:
            out << t->name << ": ";
            print(out, t->kids[0]);
            break;
        case Kind::Break:
            out << "break " << t->name << " (";
            print(out, t->kids[0]);
            out << ");";
            break;
        case Kind::Event:
            out << "event('" << t->name << "', ";
            print(out, t->kids[0]);
            out << ", ";
            print(out, t->kids[1]);
            out << ", " << t->handler << ")";
            break;
        case Kind::Respond:
            out << "respond(";
            print(out, t->kids[0]);
            out << ")";
            break;
        case Kind::Env: {
            out << "env(";
            bool first = true;
            for (const auto& [name, addr] : t->fields) {
                if (!first) out << ", ";
                first = false;
                out << name << ": ";
                print(out, addr);
            }
            out << ")";
            break;
        }
        case Kind::EnvRead:
            out << "*";
            print(out, t->kids[0]);
            out << "." << t->name;
            break;
        case Kind::EnvAddr:
            print(out, t->kids[0]);
            out << "." << t->name;
            break;
        case Kind::VarAddr: out << "&" << t->name; break;
        case Kind::Member:
            print(out, t->kids[0]);
            out << "." << t->name;
            break;
        case Kind::Index:
            print(out, t->kids[0]);
            out << "[";
            print(out, t->kids[1]);
            out << "]";
            break;
        case Kind::ObjectLit: {
            out << "{";
            bool first = true;
            for (const auto& [name, v] : t->fields) {
                if (!first) out << ", ";
                first = false;
                out << name << ": ";
                print(out, v);
            }
            out << "}";
            break;
        }
        case Kind::ArrayLit:
            out << "[";
            print_list(out, t->kids, ", ");
            out << "]";
            break;
    }
}

}  // namespace

std::string to_text(const TraceP& t) {
    std::ostringstream out;
    print(out, t);
    return out.str();
}

bool Frame::operator==(const Frame& o) const {
    if (kind != o.kind || name != o.name) return false;
    if (done.size() != o.done.size() || todo.size() != o.todo.size()) return false;
    for (size_t i = 0; i < done.size(); i++)
        if (!trace_equal(done[i], o.done[i])) return false;
    for (size_t i = 0; i < todo.size(); i++)
        if (!trace_equal(todo[i], o.todo[i])) return false;
    if (static_cast<bool>(cond) != static_cast<bool>(o.cond)) return false;
    if (cond && !trace_equal(cond, o.cond)) return false;
    if (static_cast<bool>(other) != static_cast<bool>(o.other)) return false;
    if (other && !trace_equal(other, o.other)) return false;
    return true;
}

std::string to_text(const Context& ctx) {
    std::ostringstream out;
    // Innermost frame first, matching how contexts read inside-out.
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
        const Frame& f = *it;
        switch (f.kind) {
            case Frame::Kind::Seq: {
                out << "seq([";
                for (size_t i = 0; i < f.done.size(); i++) {
                    if (i) out << " ";
                    out << to_text(f.done[i]);
                }
                out << "], [";
                for (size_t i = 0; i < f.todo.size(); i++) {
                    if (i) out << " ";
                    out << to_text(f.todo[i]);
                }
                out << "], ";
                break;
            }
            case Frame::Kind::IfTrue:
                out << "ifTrue(" << to_text(f.cond) << ", " << to_text(f.other) << ", ";
                break;
            case Frame::Kind::IfFalse:
                out << "ifFalse(" << to_text(f.cond) << ", " << to_text(f.other) << ", ";
                break;
            case Frame::Kind::While: out << "while(" << to_text(f.cond) << ", "; break;
            case Frame::Kind::Label: out << "label(" << f.name << ", "; break;
            case Frame::Kind::Named: out << "named(" << f.name << ", "; break;
        }
    }
    out << ".";
    for (size_t i = 0; i < ctx.size(); i++) out << ")";
    return out.str();
}

TraceP plug(TraceP focus, const Context& ctx) {
    TraceP c = std::move(focus);
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
        const Frame& f = *it;
        switch (f.kind) {
            case Frame::Kind::Seq: {
                std::vector<TraceP> body = f.done;
                body.push_back(c);
                body.insert(body.end(), f.todo.begin(), f.todo.end());
                c = t_block(std::move(body));
                break;
            }
            case Frame::Kind::IfTrue: c = t_if(f.cond, c, f.other); break;
            case Frame::Kind::IfFalse: c = t_if(f.cond, f.other, c); break;
            case Frame::Kind::While: c = t_while(f.cond, c); break;
            case Frame::Kind::Label: c = t_label(f.name, c); break;
            case Frame::Kind::Named: c = t_let(f.name, c); break;
        }
    }
    return c;
}

}  // namespace accel::trace
