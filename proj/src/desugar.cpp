#include "accel/desugar.hpp"

#include <set>

namespace accel::ast {

namespace {

struct Desugarer {
    int fresh_counter = 0;
    std::set<std::string> api_aliases;  // names bound by require('containerless')

    std::string fresh(const std::string& base) {
        return base + "$" + std::to_string(++fresh_counter);
    }

    [[noreturn]] void fail(const std::string& msg, int line, int col) {
        throw DesugarError(msg, line, col);
    }

    bool is_require_containerless(const Binding& b) {
        if (b.kind != BindingKind::Call) return false;
        if (b.callee->kind != ExprKind::Var || b.callee->name != "require") return false;
        if (b.args.size() != 1 || b.args[0]->kind != ExprKind::Const ||
            b.args[0]->value.tag != Scalar::Tag::Str)
            return false;
        return true;
    }

    // Rewrites c.get / c.post / c.respond / c.listen into builtin calls.
    ExprP rewrite_callee(const ExprP& callee) {
        if (callee->kind == ExprKind::Member && callee->kids[0]->kind == ExprKind::Var &&
            api_aliases.count(callee->kids[0]->name)) {
            if (is_builtin_name(callee->name))
                return e_var(callee->name, callee->line, callee->col);
            fail("unknown API function '" + callee->name + "'", callee->line, callee->col);
        }
        if (callee->kind == ExprKind::Member)
            fail("method calls are not supported", callee->line, callee->col);
        return callee;
    }

    // Hoisted statements accumulate here; each original statement desugars to
    // one or more output statements.
    using Out = std::vector<StmtP>;

    ExprP desugar_expr(const ExprP& e, Out& hoisted) {
        switch (e->kind) {
            case ExprKind::Const:
            case ExprKind::Var: return e;
            case ExprKind::Binop:
                return e_binop(e->op, desugar_expr(e->kids[0], hoisted),
                               desugar_expr(e->kids[1], hoisted), e->line, e->col);
            case ExprKind::Member:
                return e_member(desugar_expr(e->kids[0], hoisted), e->name, e->line, e->col);
            case ExprKind::Index:
                return e_index(desugar_expr(e->kids[0], hoisted),
                               desugar_expr(e->kids[1], hoisted), e->line, e->col);
            case ExprKind::ObjectLit: {
                std::vector<std::pair<std::string, ExprP>> fields;
                for (const auto& [k, v] : e->fields)
                    fields.emplace_back(k, desugar_expr(v, hoisted));
                return e_object(std::move(fields), e->line, e->col);
            }
            case ExprKind::ArrayLit: {
                std::vector<ExprP> items;
                for (const auto& k : e->kids) items.push_back(desugar_expr(k, hoisted));
                return e_array(std::move(items), e->line, e->col);
            }
            case ExprKind::FuncExpr:
                fail("function literals are only allowed as bindings or call arguments",
                     e->line, e->col);
        }
        return e;
    }

    // Call arguments: anonymous functions get a fresh name hoisted first.
    ExprP desugar_call_arg(const ExprP& e, Out& hoisted) {
        if (e->kind == ExprKind::FuncExpr) {
            std::string name = fresh("F");
            Stmt let;
            let.kind = StmtKind::Let;
            let.line = e->line;
            let.col = e->col;
            let.name = name;
            let.binding.kind = BindingKind::Func;
            let.binding.func = desugar_func(e->func);
            hoisted.push_back(std::make_shared<const Stmt>(std::move(let)));
            return e_var(name, e->line, e->col);
        }
        return desugar_expr(e, hoisted);
    }

    FuncP desugar_func(const FuncP& f) {
        auto out = std::make_shared<FuncLit>();
        out->params = f->params;
        out->body = desugar_list(f->body);
        return out;
    }

    Binding desugar_call(const Binding& b, Out& hoisted, int line, int col) {
        Binding out;
        out.kind = BindingKind::Call;
        out.callee = rewrite_callee(b.callee);
        if (out.callee->kind != ExprKind::Var)
            fail("applications must name the function being called", line, col);
        for (const auto& a : b.args) out.args.push_back(desugar_call_arg(a, hoisted));
        return out;
    }

    void desugar_stmt(const StmtP& s, Out& out) {
        switch (s->kind) {
            case StmtKind::Let: {
                if (is_require_containerless(s->binding)) {
                    api_aliases.insert(s->name);
                    return;  // the API object has no runtime representation
                }
                Stmt let = *s;
                Out hoisted;
                switch (s->binding.kind) {
                    case BindingKind::Expr:
                        let.binding.expr = desugar_expr(s->binding.expr, hoisted);
                        break;
                    case BindingKind::Func:
                        let.binding.func = desugar_func(s->binding.func);
                        break;
                    case BindingKind::Call:
                        let.binding = desugar_call(s->binding, hoisted, s->line, s->col);
                        break;
                }
                out.insert(out.end(), hoisted.begin(), hoisted.end());
                out.push_back(std::make_shared<const Stmt>(std::move(let)));
                return;
            }
            case StmtKind::FuncDecl: {
                Stmt let;
                let.kind = StmtKind::Let;
                let.line = s->line;
                let.col = s->col;
                let.name = s->name;
                let.binding.kind = BindingKind::Func;
                let.binding.func = desugar_func(s->binding.func);
                out.push_back(std::make_shared<const Stmt>(std::move(let)));
                return;
            }
            case StmtKind::ExprStmt: {
                if (s->binding.kind != BindingKind::Call)
                    fail("expression statements must be applications", s->line, s->col);
                if (is_require_containerless(s->binding)) return;
                Stmt let;
                let.kind = StmtKind::Let;
                let.line = s->line;
                let.col = s->col;
                Out hoisted;
                let.binding = desugar_call(s->binding, hoisted, s->line, s->col);
                let.name = fresh("r");
                out.insert(out.end(), hoisted.begin(), hoisted.end());
                out.push_back(std::make_shared<const Stmt>(std::move(let)));
                return;
            }
            case StmtKind::Assign: {
                Out hoisted;
                Stmt assign = *s;
                assign.lval = desugar_expr(s->lval, hoisted);
                if (s->binding.kind == BindingKind::Expr) {
                    assign.binding.expr = desugar_expr(s->binding.expr, hoisted);
                } else {
                    // x = f(...) / x = function ... lower to a named let first.
                    Stmt let;
                    let.kind = StmtKind::Let;
                    let.line = s->line;
                    let.col = s->col;
                    if (s->binding.kind == BindingKind::Call) {
                        let.binding = desugar_call(s->binding, hoisted, s->line, s->col);
                        let.name = fresh("r");
                    } else {
                        let.binding.kind = BindingKind::Func;
                        let.binding.func = desugar_func(s->binding.func);
                        let.name = fresh("F");
                    }
                    assign.binding.kind = BindingKind::Expr;
                    assign.binding.expr = e_var(let.name, s->line, s->col);
                    hoisted.push_back(std::make_shared<const Stmt>(std::move(let)));
                }
                out.insert(out.end(), hoisted.begin(), hoisted.end());
                out.push_back(std::make_shared<const Stmt>(std::move(assign)));
                return;
            }
            case StmtKind::Block: {
                Stmt b = *s;
                b.block = desugar_list(s->block);
                out.push_back(std::make_shared<const Stmt>(std::move(b)));
                return;
            }
            case StmtKind::If: {
                Stmt i = *s;
                Out hoisted;
                i.cond = desugar_expr(s->cond, hoisted);
                i.s1 = desugar_single(s->s1);
                if (s->s2) {
                    i.s2 = desugar_single(s->s2);
                } else {
                    Stmt empty;
                    empty.kind = StmtKind::Block;
                    empty.line = s->line;
                    empty.col = s->col;
                    i.s2 = std::make_shared<const Stmt>(std::move(empty));
                }
                out.insert(out.end(), hoisted.begin(), hoisted.end());
                out.push_back(std::make_shared<const Stmt>(std::move(i)));
                return;
            }
            case StmtKind::While: {
                Stmt w = *s;
                Out hoisted;
                w.cond = desugar_expr(s->cond, hoisted);
                if (!hoisted.empty())
                    fail("loop conditions cannot contain function literals", s->line, s->col);
                w.s1 = desugar_single(s->s1);
                out.push_back(std::make_shared<const Stmt>(std::move(w)));
                return;
            }
            case StmtKind::For: {
                // for(init; cond; update) s  =>  { init; while (cond) { s; update; } }
                Out inner;
                desugar_stmt(s->init, inner);
                Out hoisted;
                ExprP cond = desugar_expr(s->cond, hoisted);
                if (!hoisted.empty())
                    fail("loop conditions cannot contain function literals", s->line, s->col);
                Stmt body;
                body.kind = StmtKind::Block;
                body.line = s->s1->line;
                body.col = s->s1->col;
                body.block.push_back(desugar_single(s->s1));
                desugar_stmt(s->update, body.block);
                Stmt w;
                w.kind = StmtKind::While;
                w.line = s->line;
                w.col = s->col;
                w.cond = std::move(cond);
                w.s1 = std::make_shared<const Stmt>(std::move(body));
                inner.push_back(std::make_shared<const Stmt>(std::move(w)));
                Stmt blk;
                blk.kind = StmtKind::Block;
                blk.line = s->line;
                blk.col = s->col;
                blk.block = std::move(inner);
                out.push_back(std::make_shared<const Stmt>(std::move(blk)));
                return;
            }
            case StmtKind::Label: {
                Stmt l = *s;
                l.s1 = desugar_single(s->s1);
                // Normal fall-through must leave the labeled region through an
                // explicit break so the trace context unwinds to the label.
                bool ends_in_break =
                    l.s1->kind == StmtKind::Block && !l.s1->block.empty() &&
                    l.s1->block.back()->kind == StmtKind::Break &&
                    l.s1->block.back()->name == s->name;
                if (!ends_in_break) {
                    Stmt brk;
                    brk.kind = StmtKind::Break;
                    brk.line = s->line;
                    brk.col = s->col;
                    brk.name = s->name;
                    Stmt blk;
                    blk.kind = StmtKind::Block;
                    blk.line = l.s1->line;
                    blk.col = l.s1->col;
                    if (l.s1->kind == StmtKind::Block && !l.s1->synthetic) {
                        blk.block = l.s1->block;
                    } else {
                        blk.block.push_back(l.s1);
                    }
                    blk.block.push_back(std::make_shared<const Stmt>(std::move(brk)));
                    l.s1 = std::make_shared<const Stmt>(std::move(blk));
                }
                out.push_back(std::make_shared<const Stmt>(std::move(l)));
                return;
            }
            case StmtKind::Break:
            case StmtKind::Return: {
                Stmt r = *s;
                if (s->kind == StmtKind::Return) {
                    Out hoisted;
                    r.cond = desugar_expr(s->cond, hoisted);
                    out.insert(out.end(), hoisted.begin(), hoisted.end());
                }
                out.push_back(std::make_shared<const Stmt>(std::move(r)));
                return;
            }
            case StmtKind::RuntimeCall:
                fail("runtime calls cannot appear in source programs", s->line, s->col);
        }
    }

    std::vector<StmtP> desugar_list(const std::vector<StmtP>& stmts) {
        std::vector<StmtP> out;
        for (const auto& s : stmts) desugar_stmt(s, out);
        return out;
    }

    StmtP desugar_single(const StmtP& s) {
        Out out;
        desugar_stmt(s, out);
        if (out.size() == 1) return out.front();
        Stmt blk;
        blk.kind = StmtKind::Block;
        blk.line = s->line;
        blk.col = s->col;
        blk.block = std::move(out);
        return std::make_shared<const Stmt>(std::move(blk));
    }
};

bool calls_name(const Binding& b, const std::string& name) {
    return b.kind == BindingKind::Call && b.callee->kind == ExprKind::Var &&
           b.callee->name == name;
}

bool has_toplevel_listen(const Program& p) {
    for (const auto& s : p.body) {
        if ((s->kind == StmtKind::Let || s->kind == StmtKind::ExprStmt) &&
            calls_name(s->binding, "listen"))
            return true;
    }
    return false;
}

bool binds_toplevel_main(const Program& p) {
    for (const auto& s : p.body) {
        if (s->kind == StmtKind::Let && s->name == "main" &&
            s->binding.kind == BindingKind::Func)
            return true;
    }
    return false;
}

// ---- core validation -------------------------------------------------------

struct Validator {
    [[noreturn]] void fail(const std::string& msg, const StmtP& s) {
        throw DesugarError(msg, s ? s->line : 0, s ? s->col : 0);
    }

    void check_expr(const ExprP& e, const StmtP& at) {
        if (!e) return;
        if (e->kind == ExprKind::FuncExpr)
            fail("core program contains an anonymous function", at);
        for (const auto& k : e->kids) check_expr(k, at);
        for (const auto& [_, v] : e->fields) check_expr(v, at);
    }

    void check_func(const FuncP& f, const StmtP& at) {
        std::set<std::string> labels;
        check_list(f->body, labels, {});
        (void)at;
    }

    void check_stmt(const StmtP& s, std::set<std::string>& labels,
                    std::vector<std::string> enclosing) {
        switch (s->kind) {
            case StmtKind::For: fail("core program contains a 'for' loop", s);
            case StmtKind::FuncDecl: fail("core program contains a function declaration", s);
            case StmtKind::ExprStmt: fail("core program contains a bare expression statement", s);
            case StmtKind::RuntimeCall: return;
            case StmtKind::Let:
                switch (s->binding.kind) {
                    case BindingKind::Expr: check_expr(s->binding.expr, s); break;
                    case BindingKind::Func: check_func(s->binding.func, s); break;
                    case BindingKind::Call:
                        if (s->binding.callee->kind != ExprKind::Var)
                            fail("core applications must name the callee", s);
                        for (const auto& a : s->binding.args) check_expr(a, s);
                        break;
                }
                return;
            case StmtKind::Assign:
                if (s->binding.kind != BindingKind::Expr)
                    fail("core assignments must have expression right-hand sides", s);
                check_expr(s->lval, s);
                check_expr(s->binding.expr, s);
                return;
            case StmtKind::Block:
                for (const auto& inner : s->block) check_stmt(inner, labels, enclosing);
                return;
            case StmtKind::If:
                if (!s->s2) fail("core conditionals must have both arms", s);
                check_expr(s->cond, s);
                check_stmt(s->s1, labels, enclosing);
                check_stmt(s->s2, labels, enclosing);
                return;
            case StmtKind::While:
                check_expr(s->cond, s);
                check_stmt(s->s1, labels, enclosing);
                return;
            case StmtKind::Label: {
                if (labels.count(s->name))
                    fail("label '" + s->name + "' is not unique in this function body", s);
                labels.insert(s->name);
                enclosing.push_back(s->name);
                check_stmt(s->s1, labels, enclosing);
                return;
            }
            case StmtKind::Break: {
                for (const auto& l : enclosing)
                    if (l == s->name) return;
                fail("break to label '" + s->name + "' which does not enclose it", s);
            }
            case StmtKind::Return: check_expr(s->cond, s); return;
        }
    }

    void check_list(const std::vector<StmtP>& stmts, std::set<std::string>& labels,
                    std::vector<std::string> enclosing) {
        for (const auto& s : stmts) check_stmt(s, labels, enclosing);
    }
};

}  // namespace

Program desugar(const Program& p) {
    Desugarer d;
    Program out;
    out.body = d.desugar_list(p.body);
    if (binds_toplevel_main(out) && !has_toplevel_listen(out)) {
        // main(req) is the entrypoint: register it as the listen handler so the
        // whole program is event-driven.
        Stmt reg;
        reg.kind = StmtKind::Let;
        reg.name = d.fresh("r");
        reg.binding.kind = BindingKind::Call;
        reg.binding.callee = e_var("listen");
        reg.binding.args.push_back(e_var("main"));
        out.body.push_back(std::make_shared<const Stmt>(std::move(reg)));
    }
    return out;
}

void validate_core(const Program& p) {
    Validator v;
    std::set<std::string> labels;
    v.check_list(p.body, labels, {});
}

}  // namespace accel::ast
