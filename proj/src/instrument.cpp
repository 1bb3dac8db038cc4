#include "accel/instrument.hpp"

#include <set>

namespace accel::compile {

using ast::Binding;
using ast::BindingKind;
using ast::ExprKind;
using ast::ExprP;
using ast::FuncLit;
using ast::FuncP;
using ast::Program;
using ast::RtArg;
using ast::RtKind;
using ast::Stmt;
using ast::StmtKind;
using ast::StmtP;
using trace::TraceP;

namespace {
constexpr const char* kReturnLabel = "$return";
constexpr const char* kEnvId = "env";
}  // namespace

trace::TraceP Place::as_expr() const {
    if (kind == Kind::Var) return trace::t_var(name);
    return trace::t_env_read(trace::t_var(kEnvId), name);
}

trace::TraceP Place::as_lval() const { return as_expr(); }

trace::TraceP Place::as_addr() const {
    if (kind == Kind::Var) return trace::t_var_addr(name);
    return trace::t_env_addr(trace::t_var(kEnvId), name);
}

CompileEnv CompileEnv::with_builtins() {
    CompileEnv env;
    for (const auto& b : ast::builtin_names()) {
        Place p;
        p.kind = Place::Kind::Var;
        p.name = b;
        p.builtin = true;
        env.bind(b, std::move(p));
    }
    return env;
}

const Place* CompileEnv::lookup(const std::string& name) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
        if (it->first == name) return &it->second;
    return nullptr;
}

std::vector<std::pair<std::string, Place>> CompileEnv::capture_domain() const {
    std::vector<std::pair<std::string, Place>> out;
    std::set<std::string> seen;
    // Last binding of each name is the visible one; report in declaration order.
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->second.builtin || seen.count(it->first)) continue;
        seen.insert(it->first);
        out.emplace_back(it->first, it->second);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

trace::TraceP compile_expr(const ast::ExprP& e, const CompileEnv& env) {
    switch (e->kind) {
        case ExprKind::Const: return trace::t_const(e->value);
        case ExprKind::Var: {
            const Place* p = env.lookup(e->name);
            if (!p)
                throw CompileError("unbound variable '" + e->name + "'", e->line, e->col);
            return p->as_expr();
        }
        case ExprKind::Binop:
            return trace::t_binop(e->op, compile_expr(e->kids[0], env),
                                  compile_expr(e->kids[1], env));
        case ExprKind::Member:
            return trace::t_member(compile_expr(e->kids[0], env), e->name);
        case ExprKind::Index:
            return trace::t_index(compile_expr(e->kids[0], env),
                                  compile_expr(e->kids[1], env));
        case ExprKind::ObjectLit: {
            std::vector<std::pair<std::string, TraceP>> fields;
            for (const auto& [k, v] : e->fields) fields.emplace_back(k, compile_expr(v, env));
            return trace::t_object(std::move(fields));
        }
        case ExprKind::ArrayLit: {
            std::vector<TraceP> items;
            for (const auto& k : e->kids) items.push_back(compile_expr(k, env));
            return trace::t_array(std::move(items));
        }
        case ExprKind::FuncExpr:
            throw CompileError("function literal in expression position", e->line, e->col);
    }
    throw CompileError("unreachable expression kind", e->line, e->col);
}

trace::TraceP compile_lval(const ast::ExprP& e, const CompileEnv& env) {
    switch (e->kind) {
        case ExprKind::Var: {
            const Place* p = env.lookup(e->name);
            // Assignment to an undeclared name targets a plain variable; the
            // runtimes create it at their outermost scope, as JavaScript does.
            if (!p) return trace::t_var(e->name);
            return p->as_lval();
        }
        case ExprKind::Member:
            return trace::t_member(compile_expr(e->kids[0], env), e->name);
        case ExprKind::Index:
            return trace::t_index(compile_expr(e->kids[0], env),
                                  compile_expr(e->kids[1], env));
        default:
            throw CompileError("invalid assignment target", e->line, e->col);
    }
}

namespace {

StmtP rt(Stmt s) { return std::make_shared<const Stmt>(std::move(s)); }

StmtP rt_simple(RtKind op) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = op;
    return rt(std::move(s));
}

StmtP rt_enter_seq(size_t n) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::EnterSeq;
    s.rt_n = n;
    return rt(std::move(s));
}

StmtP rt_cond(RtKind op, TraceP t) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = op;
    s.rt_value = RtArg::of(std::move(t));
    return rt(std::move(s));
}

StmtP rt_named(RtKind op, std::string name) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = op;
    s.rt_name = std::move(name);
    return rt(std::move(s));
}

StmtP rt_trace_let(std::string name, RtArg value) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::TraceLet;
    s.rt_name = std::move(name);
    s.rt_value = std::move(value);
    return rt(std::move(s));
}

StmtP rt_trace_set(TraceP lval, TraceP value) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::TraceSet;
    s.rt_lval = std::move(lval);
    s.rt_value = RtArg::of(std::move(value));
    return rt(std::move(s));
}

StmtP rt_trace_break(std::string label, TraceP value) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::TraceBreak;
    s.rt_name = std::move(label);
    s.rt_value = RtArg::of(std::move(value));
    return rt(std::move(s));
}

StmtP rt_push_arg(TraceP t) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::PushArg;
    s.rt_value = RtArg::of(std::move(t));
    return rt(std::move(s));
}

StmtP rt_save_handler(size_t n) {
    Stmt s;
    s.kind = StmtKind::RuntimeCall;
    s.rt_op = RtKind::SaveHandler;
    s.rt_n = n;
    return rt(std::move(s));
}

StmtP synthetic_block(std::vector<StmtP> stmts, int line, int col) {
    Stmt s;
    s.kind = StmtKind::Block;
    s.synthetic = true;
    s.line = line;
    s.col = col;
    s.block = std::move(stmts);
    return rt(std::move(s));
}

// A block element: either a guest statement to compile or a pre-made runtime
// call that occupies a sequence slot (the function-body prologue lets).
struct BlockElement {
    StmtP guest;     // compile this, or
    StmtP slot;      // emit this as a slot of its own
};

FuncP instrument_func(const FuncP& f, const CompileEnv& outer);

// Compiles a block's elements: enterSeq(n); e1; seqNext(); e2; ... en; pop().
// Bindings extend rho within the block only.
std::vector<StmtP> compile_block_elements(const std::vector<BlockElement>& elements,
                                          CompileEnv env) {
    std::vector<StmtP> out;
    if (elements.empty()) {
        Stmt s;
        s.kind = StmtKind::RuntimeCall;
        s.rt_op = RtKind::EnterSeq;
        s.rt_n = 0;  // interpreted as record_empty_block
        out.push_back(rt(std::move(s)));
        return out;
    }
    out.push_back(rt_enter_seq(elements.size()));
    bool first = true;
    for (const auto& el : elements) {
        if (!first) out.push_back(rt_simple(RtKind::SeqNext));
        first = false;
        if (el.slot) {
            out.push_back(el.slot);
            continue;
        }
        auto compiled = compile_stmt(el.guest, env);
        out.insert(out.end(), compiled.begin(), compiled.end());
    }
    out.push_back(rt_simple(RtKind::Pop));
    return out;
}

std::vector<BlockElement> as_elements(const std::vector<StmtP>& stmts) {
    std::vector<BlockElement> out;
    for (const auto& s : stmts) out.push_back(BlockElement{s, nullptr});
    return out;
}

FuncP instrument_func(const FuncP& f, const CompileEnv& outer) {
    auto captures = outer.capture_domain();

    // The environment record for this function: each visible outer binding by
    // address, so closures alias the same memory location.
    std::vector<std::pair<std::string, TraceP>> env_entries;
    for (const auto& [name, place] : captures) env_entries.emplace_back(name, place.as_addr());
    TraceP env_trace = trace::t_env(std::move(env_entries));

    // rho for the body: builtins, then captured names through the environment,
    // then parameters (parameters shadow captures).
    CompileEnv body_env = CompileEnv::with_builtins();
    for (const auto& [name, _] : captures) {
        Place p;
        p.kind = Place::Kind::EnvSlot;
        p.name = name;
        body_env.bind(name, std::move(p));
    }
    for (const auto& param : f->params) {
        Place p;
        p.kind = Place::Kind::Var;
        p.name = param;
        body_env.bind(param, std::move(p));
    }

    // Body block: `let env = popArg()`, one `let p = popArg()` per parameter,
    // then the original statements; each prologue let occupies a slot.
    std::vector<BlockElement> elements;
    elements.push_back(BlockElement{nullptr, rt_trace_let(kEnvId, RtArg::pop())});
    for (const auto& param : f->params)
        elements.push_back(BlockElement{nullptr, rt_trace_let(param, RtArg::pop())});
    for (const auto& s : f->body) elements.push_back(BlockElement{s, nullptr});

    auto blk = compile_block_elements(elements, body_env);

    auto out = std::make_shared<FuncLit>();
    out->params = f->params;
    out->env_trace = env_trace;
    out->body.push_back(rt_named(RtKind::Label, kReturnLabel));
    out->body.push_back(synthetic_block(std::move(blk), 0, 0));
    out->body.push_back(rt_simple(RtKind::Pop));
    return out;
}

}  // namespace

std::vector<StmtP> compile_stmt(const ast::StmtP& s, CompileEnv& env) {
    std::vector<StmtP> out;
    switch (s->kind) {
        case StmtKind::Let: {
            switch (s->binding.kind) {
                case BindingKind::Expr: {
                    out.push_back(rt_trace_let(s->name, RtArg::of(compile_expr(s->binding.expr, env))));
                    out.push_back(s);
                    break;
                }
                case BindingKind::Func: {
                    FuncP instrumented = instrument_func(s->binding.func, env);
                    out.push_back(rt_trace_let(s->name, RtArg::of(instrumented->env_trace)));
                    Stmt let = *s;
                    let.binding.func = std::move(instrumented);
                    out.push_back(rt(std::move(let)));
                    break;
                }
                case BindingKind::Call: {
                    const auto& args = s->binding.args;
                    for (size_t i = args.size(); i-- > 0;)
                        out.push_back(rt_push_arg(compile_expr(args[i], env)));
                    out.push_back(rt_push_arg(compile_expr(s->binding.callee, env)));
                    out.push_back(rt_named(RtKind::Named, s->name));
                    out.push_back(s);
                    out.push_back(rt_simple(RtKind::Pop));
                    break;
                }
            }
            Place p;
            p.kind = Place::Kind::Var;
            p.name = s->name;
            env.bind(s->name, std::move(p));
            return out;
        }
        case StmtKind::Assign: {
            out.push_back(rt_trace_set(compile_lval(s->lval, env),
                                       compile_expr(s->binding.expr, env)));
            out.push_back(s);
            return out;
        }
        case StmtKind::Block: {
            auto blk = compile_block_elements(as_elements(s->block), env);
            Stmt b = *s;
            b.block = std::move(blk);
            out.push_back(rt(std::move(b)));
            return out;
        }
        case StmtKind::If: {
            TraceP cond = compile_expr(s->cond, env);
            CompileEnv arm_env = env;
            std::vector<StmtP> then_arm;
            then_arm.push_back(rt_cond(RtKind::IfTrue, cond));
            auto s1 = compile_stmt(s->s1, arm_env);
            then_arm.insert(then_arm.end(), s1.begin(), s1.end());
            CompileEnv arm_env2 = env;
            std::vector<StmtP> else_arm;
            else_arm.push_back(rt_cond(RtKind::IfFalse, cond));
            auto s2 = compile_stmt(s->s2, arm_env2);
            else_arm.insert(else_arm.end(), s2.begin(), s2.end());

            Stmt i = *s;
            i.s1 = synthetic_block(std::move(then_arm), s->s1->line, s->s1->col);
            i.s2 = synthetic_block(std::move(else_arm), s->s2->line, s->s2->col);
            out.push_back(rt(std::move(i)));
            out.push_back(rt_simple(RtKind::Pop));
            return out;
        }
        case StmtKind::While: {
            TraceP cond = compile_expr(s->cond, env);
            out.push_back(rt_cond(RtKind::While, cond));
            CompileEnv body_env = env;
            auto body = compile_stmt(s->s1, body_env);
            Stmt w = *s;
            w.s1 = synthetic_block(std::move(body), s->s1->line, s->s1->col);
            out.push_back(rt(std::move(w)));
            out.push_back(rt_simple(RtKind::Pop));
            return out;
        }
        case StmtKind::Label: {
            out.push_back(rt_named(RtKind::Label, s->name));
            CompileEnv body_env = env;
            auto body = compile_stmt(s->s1, body_env);
            Stmt l = *s;
            l.s1 = synthetic_block(std::move(body), s->s1->line, s->s1->col);
            out.push_back(rt(std::move(l)));
            return out;
        }
        case StmtKind::Break: {
            out.push_back(rt_trace_break(s->name, trace::t_undefined()));
            out.push_back(rt_named(RtKind::PopTo, s->name));
            out.push_back(s);
            return out;
        }
        case StmtKind::Return: {
            out.push_back(rt_trace_break(kReturnLabel, compile_expr(s->cond, env)));
            out.push_back(rt_named(RtKind::PopTo, kReturnLabel));
            out.push_back(s);
            return out;
        }
        case StmtKind::RuntimeCall: {
            out.push_back(s);
            return out;
        }
        case StmtKind::ExprStmt:
        case StmtKind::For:
        case StmtKind::FuncDecl:
            throw CompileError("program must be desugared before instrumentation", s->line,
                               s->col);
    }
    return out;
}

ast::Program instrument(const ast::Program& desugared) {
    CompileEnv env = CompileEnv::with_builtins();
    Program out;
    // The top level is itself a block; emit its instrumentation flat so the
    // program ends with saveHandler(0).
    auto body = compile_block_elements(as_elements(desugared.body), env);
    out.body = std::move(body);
    out.body.push_back(rt_save_handler(0));
    return out;
}

}  // namespace accel::compile
