#include "accel/ast.hpp"

#include <cctype>

#include <sstream>

namespace accel::ast {

namespace {
ExprP make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"get", "post", "respond", "listen"};
    return names;
}

bool is_builtin_name(const std::string& name) {
    for (const auto& b : builtin_names())
        if (b == name) return true;
    return false;
}

ExprP e_const(Scalar v, int line, int col) {
    Expr e;
    e.kind = ExprKind::Const;
    e.value = std::move(v);
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_var(std::string name, int line, int col) {
    Expr e;
    e.kind = ExprKind::Var;
    e.name = std::move(name);
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_binop(std::string op, ExprP l, ExprP r, int line, int col) {
    Expr e;
    e.kind = ExprKind::Binop;
    e.op = std::move(op);
    e.kids = {std::move(l), std::move(r)};
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_member(ExprP obj, std::string field, int line, int col) {
    Expr e;
    e.kind = ExprKind::Member;
    e.name = std::move(field);
    e.kids = {std::move(obj)};
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_index(ExprP obj, ExprP idx, int line, int col) {
    Expr e;
    e.kind = ExprKind::Index;
    e.kids = {std::move(obj), std::move(idx)};
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_object(std::vector<std::pair<std::string, ExprP>> fields, int line, int col) {
    Expr e;
    e.kind = ExprKind::ObjectLit;
    e.fields = std::move(fields);
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_array(std::vector<ExprP> items, int line, int col) {
    Expr e;
    e.kind = ExprKind::ArrayLit;
    e.kids = std::move(items);
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

ExprP e_func(FuncP f, int line, int col) {
    Expr e;
    e.kind = ExprKind::FuncExpr;
    e.func = std::move(f);
    e.line = line;
    e.col = col;
    return make(std::move(e));
}

bool expr_equal(const ExprP& a, const ExprP& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->name != b->name || a->op != b->op || !(a->value == b->value))
        return false;
    if (a->kids.size() != b->kids.size() || a->fields.size() != b->fields.size()) return false;
    for (size_t i = 0; i < a->kids.size(); i++)
        if (!expr_equal(a->kids[i], b->kids[i])) return false;
    for (size_t i = 0; i < a->fields.size(); i++)
        if (a->fields[i].first != b->fields[i].first ||
            !expr_equal(a->fields[i].second, b->fields[i].second))
            return false;
    if (a->kind == ExprKind::FuncExpr) {
        if (a->func->params != b->func->params) return false;
        if (a->func->body.size() != b->func->body.size()) return false;
        for (size_t i = 0; i < a->func->body.size(); i++)
            if (!stmt_equal(a->func->body[i], b->func->body[i])) return false;
    }
    return true;
}

namespace {

bool binding_equal(const Binding& a, const Binding& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case BindingKind::Expr: return expr_equal(a.expr, b.expr);
        case BindingKind::Func: {
            if (a.func->params != b.func->params) return false;
            if (a.func->body.size() != b.func->body.size()) return false;
            for (size_t i = 0; i < a.func->body.size(); i++)
                if (!stmt_equal(a.func->body[i], b.func->body[i])) return false;
            return true;
        }
        case BindingKind::Call: {
            if (!expr_equal(a.callee, b.callee)) return false;
            if (a.args.size() != b.args.size()) return false;
            for (size_t i = 0; i < a.args.size(); i++)
                if (!expr_equal(a.args[i], b.args[i])) return false;
            return true;
        }
    }
    return false;
}

bool rt_arg_equal(const RtArg& a, const RtArg& b) {
    if (a.is_pop_arg != b.is_pop_arg) return false;
    if (static_cast<bool>(a.lit) != static_cast<bool>(b.lit)) return false;
    return !a.lit || trace::trace_equal(a.lit, b.lit);
}

}  // namespace

bool stmt_equal(const StmtP& a, const StmtP& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->name != b->name) return false;
    switch (a->kind) {
        case StmtKind::Let:
        case StmtKind::ExprStmt:
        case StmtKind::FuncDecl: return binding_equal(a->binding, b->binding);
        case StmtKind::Assign:
            return expr_equal(a->lval, b->lval) && binding_equal(a->binding, b->binding);
        case StmtKind::Block: {
            if (a->block.size() != b->block.size()) return false;
            for (size_t i = 0; i < a->block.size(); i++)
                if (!stmt_equal(a->block[i], b->block[i])) return false;
            return true;
        }
        case StmtKind::If:
            return expr_equal(a->cond, b->cond) && stmt_equal(a->s1, b->s1) &&
                   stmt_equal(a->s2, b->s2);
        case StmtKind::While: return expr_equal(a->cond, b->cond) && stmt_equal(a->s1, b->s1);
        case StmtKind::Label: return stmt_equal(a->s1, b->s1);
        case StmtKind::Break: return true;
        case StmtKind::Return: return expr_equal(a->cond, b->cond);
        case StmtKind::For:
            return stmt_equal(a->init, b->init) && expr_equal(a->cond, b->cond) &&
                   stmt_equal(a->update, b->update) && stmt_equal(a->s1, b->s1);
        case StmtKind::RuntimeCall:
            return a->rt_op == b->rt_op && a->rt_n == b->rt_n && a->rt_name == b->rt_name &&
                   rt_arg_equal(a->rt_value, b->rt_value) &&
                   (static_cast<bool>(a->rt_lval) == static_cast<bool>(b->rt_lval)) &&
                   (!a->rt_lval || trace::trace_equal(a->rt_lval, b->rt_lval));
    }
    return false;
}

bool program_equal(const Program& a, const Program& b) {
    if (a.body.size() != b.body.size()) return false;
    for (size_t i = 0; i < a.body.size(); i++)
        if (!stmt_equal(a.body[i], b.body[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

void print_expr(std::ostringstream& out, const ExprP& e);

void print_func(std::ostringstream& out, const FuncP& f, int indent);

const char* rt_name(RtKind k) {
    switch (k) {
        case RtKind::EnterSeq: return "enterSeq";
        case RtKind::SeqNext: return "seqNext";
        case RtKind::IfTrue: return "ifTrue";
        case RtKind::IfFalse: return "ifFalse";
        case RtKind::While: return "while";
        case RtKind::Label: return "label";
        case RtKind::Named: return "named";
        case RtKind::Pop: return "pop";
        case RtKind::PopTo: return "popTo";
        case RtKind::TraceLet: return "let";
        case RtKind::TraceSet: return "set";
        case RtKind::TraceBreak: return "break";
        case RtKind::PushArg: return "pushArg";
        case RtKind::SaveHandler: return "saveHandler";
    }
    return "?";
}

std::string rt_arg_text(const RtArg& a) {
    if (a.is_pop_arg) return "popArg()";
    return trace::to_text(a.lit);
}

// Precedence climbing for faithful re-parsing: equality < relational <
// additive < multiplicative < postfix.
int prec(const std::string& op) {
    if (op == "===" || op == "!==") return 1;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 2;
    if (op == "+" || op == "-") return 3;
    return 4;
}

void print_expr_prec(std::ostringstream& out, const ExprP& e, int min_prec) {
    if (e->kind == ExprKind::Binop) {
        int p = prec(e->op);
        bool parens = p < min_prec;
        if (parens) out << "(";
        print_expr_prec(out, e->kids[0], p);
        out << " " << e->op << " ";
        print_expr_prec(out, e->kids[1], p + 1);
        if (parens) out << ")";
        return;
    }
    print_expr(out, e);
}

void print_expr(std::ostringstream& out, const ExprP& e) {
    switch (e->kind) {
        case ExprKind::Const: out << scalar_to_source(e->value); break;
        case ExprKind::Var: out << e->name; break;
        case ExprKind::Binop: print_expr_prec(out, e, 0); break;
        case ExprKind::Member:
            print_expr(out, e->kids[0]);
            out << "." << e->name;
            break;
        case ExprKind::Index:
            print_expr(out, e->kids[0]);
            out << "[";
            print_expr_prec(out, e->kids[1], 0);
            out << "]";
            break;
        case ExprKind::ObjectLit: {
            out << "{";
            bool first = true;
            for (const auto& [k, v] : e->fields) {
                if (!first) out << ", ";
                first = false;
                bool bare = !k.empty() && (std::isalpha(static_cast<unsigned char>(k[0])) ||
                                           k[0] == '_');
                for (char c : k)
                    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') bare = false;
                if (bare)
                    out << k;
                else
                    out << scalar_to_source(Scalar::str(k));
                out << ": ";
                print_expr_prec(out, v, 0);
            }
            out << "}";
            break;
        }
        case ExprKind::ArrayLit: {
            out << "[";
            for (size_t i = 0; i < e->kids.size(); i++) {
                if (i) out << ", ";
                print_expr_prec(out, e->kids[i], 0);
            }
            out << "]";
            break;
        }
        case ExprKind::FuncExpr: print_func(out, e->func, 0); break;
    }
}

std::string pad(int indent) { return std::string(static_cast<size_t>(indent) * 2, ' '); }

void print_stmt(std::ostringstream& out, const StmtP& s, int indent);

void print_binding(std::ostringstream& out, const Binding& b, int indent) {
    switch (b.kind) {
        case BindingKind::Expr: print_expr_prec(out, b.expr, 0); break;
        case BindingKind::Func: print_func(out, b.func, indent); break;
        case BindingKind::Call: {
            print_expr(out, b.callee);
            out << "(";
            for (size_t i = 0; i < b.args.size(); i++) {
                if (i) out << ", ";
                print_expr_prec(out, b.args[i], 0);
            }
            out << ")";
            break;
        }
    }
}

void print_func(std::ostringstream& out, const FuncP& f, int indent) {
    out << "function(";
    for (size_t i = 0; i < f->params.size(); i++) {
        if (i) out << ", ";
        out << f->params[i];
    }
    out << ") {\n";
    for (const auto& s : f->body) print_stmt(out, s, indent + 1);
    out << pad(indent) << "}";
}

void print_stmt(std::ostringstream& out, const StmtP& s, int indent) {
    out << pad(indent);
    switch (s->kind) {
        case StmtKind::Let:
            out << "let " << s->name << " = ";
            print_binding(out, s->binding, indent);
            out << ";\n";
            break;
        case StmtKind::FuncDecl:
            out << "function " << s->name << "(";
            for (size_t i = 0; i < s->binding.func->params.size(); i++) {
                if (i) out << ", ";
                out << s->binding.func->params[i];
            }
            out << ") {\n";
            for (const auto& inner : s->binding.func->body) print_stmt(out, inner, indent + 1);
            out << pad(indent) << "}\n";
            break;
        case StmtKind::Block:
            out << "{\n";
            for (const auto& inner : s->block) print_stmt(out, inner, indent + 1);
            out << pad(indent) << "}\n";
            break;
        case StmtKind::If:
            out << "if (";
            print_expr_prec(out, s->cond, 0);
            out << ")\n";
            print_stmt(out, s->s1, indent + 1);
            if (s->s2) {
                out << pad(indent) << "else\n";
                print_stmt(out, s->s2, indent + 1);
            }
            break;
        case StmtKind::While:
            out << "while (";
            print_expr_prec(out, s->cond, 0);
            out << ")\n";
            print_stmt(out, s->s1, indent + 1);
            break;
        case StmtKind::Assign:
            print_expr(out, s->lval);
            out << " = ";
            print_binding(out, s->binding, indent);
            out << ";\n";
            break;
        case StmtKind::Label:
            out << s->name << ":\n";
            print_stmt(out, s->s1, indent + 1);
            break;
        case StmtKind::Break: out << "break " << s->name << ";\n"; break;
        case StmtKind::Return:
            out << "return ";
            print_expr_prec(out, s->cond, 0);
            out << ";\n";
            break;
        case StmtKind::ExprStmt:
            print_binding(out, s->binding, indent);
            out << ";\n";
            break;
        case StmtKind::For:
            out << "for (";
            {
                std::ostringstream init;
                print_stmt(init, s->init, 0);
                std::string i = init.str();
                while (!i.empty() && (i.back() == '\n')) i.pop_back();
                out << i << " ";
            }
            print_expr_prec(out, s->cond, 0);
            out << "; ";
            {
                std::ostringstream upd;
                print_stmt(upd, s->update, 0);
                std::string u = upd.str();
                while (!u.empty() && (u.back() == '\n')) u.pop_back();
                if (!u.empty() && u.back() == ';') u.pop_back();
                out << u;
            }
            out << ")\n";
            print_stmt(out, s->s1, indent + 1);
            break;
        case StmtKind::RuntimeCall: {
            out << "@" << rt_name(s->rt_op) << "(";
            switch (s->rt_op) {
                case RtKind::EnterSeq:
                case RtKind::SaveHandler: out << s->rt_n; break;
                case RtKind::IfTrue:
                case RtKind::IfFalse:
                case RtKind::While:
                case RtKind::PushArg: out << rt_arg_text(s->rt_value); break;
                case RtKind::Label:
                case RtKind::PopTo:
                case RtKind::Named: out << s->rt_name; break;
                case RtKind::TraceLet:
                    out << s->rt_name << ", " << rt_arg_text(s->rt_value);
                    break;
                case RtKind::TraceSet:
                    out << trace::to_text(s->rt_lval) << ", " << rt_arg_text(s->rt_value);
                    break;
                case RtKind::TraceBreak:
                    out << s->rt_name << ", " << rt_arg_text(s->rt_value);
                    break;
                case RtKind::SeqNext:
                case RtKind::Pop: break;
            }
            out << ");\n";
            break;
        }
    }
}

}  // namespace

std::string to_source(const StmtP& s, int indent) {
    std::ostringstream out;
    print_stmt(out, s, indent);
    return out.str();
}

std::string to_source(const Program& p) {
    std::ostringstream out;
    for (const auto& s : p.body) print_stmt(out, s, 0);
    return out.str();
}

std::string to_instrumented_source(const Program& p) { return to_source(p); }

// ---------------------------------------------------------------------------
// JSON debug dump
// ---------------------------------------------------------------------------

namespace {

Json expr_json(const ExprP& e);

Json func_json(const FuncP& f);

Json scalar_json(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return nullptr;
        case Scalar::Tag::Bool: return v.b;
        case Scalar::Tag::Int: return v.i;
        case Scalar::Tag::Float: return v.f;
        case Scalar::Tag::Str: return v.s;
    }
    return nullptr;
}

Json stmt_json(const StmtP& s);

Json binding_json(const Binding& b) {
    Json j;
    switch (b.kind) {
        case BindingKind::Expr:
            j["kind"] = "expr";
            j["expr"] = expr_json(b.expr);
            break;
        case BindingKind::Func:
            j["kind"] = "function";
            j["function"] = func_json(b.func);
            break;
        case BindingKind::Call: {
            j["kind"] = "call";
            j["callee"] = expr_json(b.callee);
            Json args = Json::array();
            for (const auto& a : b.args) args.push_back(expr_json(a));
            j["args"] = std::move(args);
            break;
        }
    }
    return j;
}

Json func_json(const FuncP& f) {
    Json j;
    j["params"] = f->params;
    Json body = Json::array();
    for (const auto& s : f->body) body.push_back(stmt_json(s));
    j["body"] = std::move(body);
    return j;
}

Json expr_json(const ExprP& e) {
    Json j;
    switch (e->kind) {
        case ExprKind::Const:
            j["kind"] = "const";
            j["value"] = scalar_json(e->value);
            break;
        case ExprKind::Var:
            j["kind"] = "var";
            j["name"] = e->name;
            break;
        case ExprKind::Binop:
            j["kind"] = "binop";
            j["op"] = e->op;
            j["left"] = expr_json(e->kids[0]);
            j["right"] = expr_json(e->kids[1]);
            break;
        case ExprKind::Member:
            j["kind"] = "member";
            j["object"] = expr_json(e->kids[0]);
            j["name"] = e->name;
            break;
        case ExprKind::Index:
            j["kind"] = "index";
            j["object"] = expr_json(e->kids[0]);
            j["index"] = expr_json(e->kids[1]);
            break;
        case ExprKind::ObjectLit: {
            j["kind"] = "object";
            Json fields = Json::array();
            for (const auto& [k, v] : e->fields) {
                Json f;
                f["name"] = k;
                f["value"] = expr_json(v);
                fields.push_back(std::move(f));
            }
            j["fields"] = std::move(fields);
            break;
        }
        case ExprKind::ArrayLit: {
            j["kind"] = "array";
            Json items = Json::array();
            for (const auto& k : e->kids) items.push_back(expr_json(k));
            j["items"] = std::move(items);
            break;
        }
        case ExprKind::FuncExpr:
            j["kind"] = "function";
            j["function"] = func_json(e->func);
            break;
    }
    return j;
}

Json stmt_json(const StmtP& s) {
    Json j;
    switch (s->kind) {
        case StmtKind::Let:
            j["kind"] = "let";
            j["name"] = s->name;
            j["binding"] = binding_json(s->binding);
            break;
        case StmtKind::FuncDecl:
            j["kind"] = "functionDecl";
            j["name"] = s->name;
            j["function"] = func_json(s->binding.func);
            break;
        case StmtKind::Block: {
            j["kind"] = "block";
            Json body = Json::array();
            for (const auto& inner : s->block) body.push_back(stmt_json(inner));
            j["body"] = std::move(body);
            break;
        }
        case StmtKind::If:
            j["kind"] = "if";
            j["cond"] = expr_json(s->cond);
            j["then"] = stmt_json(s->s1);
            j["else"] = stmt_json(s->s2);
            break;
        case StmtKind::While:
            j["kind"] = "while";
            j["cond"] = expr_json(s->cond);
            j["body"] = stmt_json(s->s1);
            break;
        case StmtKind::Assign:
            j["kind"] = "assign";
            j["target"] = expr_json(s->lval);
            j["binding"] = binding_json(s->binding);
            break;
        case StmtKind::Label:
            j["kind"] = "label";
            j["name"] = s->name;
            j["body"] = stmt_json(s->s1);
            break;
        case StmtKind::Break:
            j["kind"] = "break";
            j["name"] = s->name;
            break;
        case StmtKind::Return:
            j["kind"] = "return";
            j["value"] = expr_json(s->cond);
            break;
        case StmtKind::ExprStmt:
            j["kind"] = "exprStmt";
            j["binding"] = binding_json(s->binding);
            break;
        case StmtKind::For:
            j["kind"] = "for";
            j["init"] = stmt_json(s->init);
            j["cond"] = expr_json(s->cond);
            j["update"] = stmt_json(s->update);
            j["body"] = stmt_json(s->s1);
            break;
        case StmtKind::RuntimeCall:
            j["kind"] = "runtimeCall";
            j["op"] = rt_name(s->rt_op);
            break;
    }
    return j;
}

StmtP strip_stmt(const StmtP& s);

// Strips a statement list: runtime calls vanish, synthetic grouping blocks
// splice their surviving children back into the list.
std::vector<StmtP> strip_list(const std::vector<StmtP>& stmts) {
    std::vector<StmtP> out;
    for (const auto& s : stmts) {
        if (s->kind == StmtKind::RuntimeCall) continue;
        if (s->kind == StmtKind::Block && s->synthetic) {
            auto inner = strip_list(s->block);
            out.insert(out.end(), inner.begin(), inner.end());
            continue;
        }
        out.push_back(strip_stmt(s));
    }
    return out;
}

// Strips a single-statement position (if arm, loop body): a synthetic group
// always collapses back to exactly one original statement.
StmtP strip_single(const StmtP& s) {
    if (s->kind == StmtKind::Block && s->synthetic) {
        auto inner = strip_list(s->block);
        if (inner.size() == 1) return inner.front();
        Stmt out = *s;
        out.synthetic = false;
        out.block = std::move(inner);
        return std::make_shared<const Stmt>(std::move(out));
    }
    return strip_stmt(s);
}

FuncP strip_func(const FuncP& f) {
    auto out = std::make_shared<FuncLit>();
    out->params = f->params;
    out->body = strip_list(f->body);
    return out;
}

Binding strip_binding(const Binding& b) {
    Binding out = b;
    if (b.kind == BindingKind::Func) out.func = strip_func(b.func);
    return out;
}

StmtP strip_stmt(const StmtP& s) {
    Stmt out = *s;
    switch (s->kind) {
        case StmtKind::Let:
        case StmtKind::ExprStmt:
        case StmtKind::FuncDecl:
        case StmtKind::Assign: out.binding = strip_binding(s->binding); break;
        case StmtKind::Block: out.block = strip_list(s->block); break;
        case StmtKind::If:
            out.s1 = strip_single(s->s1);
            out.s2 = strip_single(s->s2);
            break;
        case StmtKind::While:
        case StmtKind::Label: out.s1 = strip_single(s->s1); break;
        case StmtKind::For:
            out.init = strip_stmt(s->init);
            out.update = strip_stmt(s->update);
            out.s1 = strip_single(s->s1);
            break;
        default: break;
    }
    return std::make_shared<const Stmt>(std::move(out));
}

}  // namespace

Json ast_to_json(const Program& p) {
    Json body = Json::array();
    for (const auto& s : p.body) body.push_back(stmt_json(s));
    Json j;
    j["kind"] = "program";
    j["body"] = std::move(body);
    return j;
}

Program erase_instrumentation(const Program& p) {
    Program out;
    out.body = strip_list(p.body);
    return out;
}

}  // namespace accel::ast
