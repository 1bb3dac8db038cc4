#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "accel/scalar.hpp"
#include "accel/trace.hpp"

namespace accel::ast {

using Json = nlohmann::ordered_json;

struct Expr;
struct Stmt;
struct FuncLit;
using ExprP = std::shared_ptr<const Expr>;
using StmtP = std::shared_ptr<const Stmt>;
using FuncP = std::shared_ptr<const FuncLit>;

enum class ExprKind {
    Const,
    Var,
    Binop,
    Member,
    Index,
    ObjectLit,
    ArrayLit,
    FuncExpr,  // surface only; desugaring hoists it to a named let
};

struct Expr {
    ExprKind kind = ExprKind::Const;
    Scalar value;                                       // Const
    std::string name;                                   // Var, Member field
    std::string op;                                     // Binop
    std::vector<ExprP> kids;                            // Binop/Member/Index/ArrayLit children
    std::vector<std::pair<std::string, ExprP>> fields;  // ObjectLit
    FuncP func;                                         // FuncExpr
    int line = 0, col = 0;
};

// The right-hand side of a let or assignment: a plain expression, a function
// literal, or a named application (A-normal form keeps these off expression
// positions).
enum class BindingKind { Expr, Func, Call };

struct Binding {
    BindingKind kind = BindingKind::Expr;
    ExprP expr;
    FuncP func;
    ExprP callee;             // Call: Var after desugaring; Var or Member before
    std::vector<ExprP> args;  // Call
};

// Tracing runtime calls the instrumenter interleaves with the original
// statements. Erasing all of them yields the original program.
enum class RtKind {
    EnterSeq,
    SeqNext,
    IfTrue,
    IfFalse,
    While,
    Label,
    Named,
    Pop,
    PopTo,
    TraceLet,
    TraceSet,
    TraceBreak,
    PushArg,
    SaveHandler,
};

struct RtArg {
    bool is_pop_arg = false;  // popArg() in argument position
    trace::TraceP lit;        // otherwise an embedded trace expression

    static RtArg pop() {
        RtArg a;
        a.is_pop_arg = true;
        return a;
    }
    static RtArg of(trace::TraceP t) {
        RtArg a;
        a.lit = std::move(t);
        return a;
    }
};

enum class StmtKind {
    Let,
    Block,
    If,
    While,
    Assign,
    Label,
    Break,
    Return,
    ExprStmt,  // surface only: a bare application
    For,       // surface only
    FuncDecl,  // surface only: function f(...) { ... }
    RuntimeCall,
};

struct Stmt {
    StmtKind kind = StmtKind::Block;
    int line = 0, col = 0;
    // Grouping block introduced by the instrumenter (if/while/label bodies and
    // function-body wrappers). Erasure splices these away.
    bool synthetic = false;

    std::string name;          // Let target, Label name, Break label, FuncDecl name
    Binding binding;           // Let / Assign / ExprStmt payload
    ExprP lval;                // Assign target (Var, Member, or Index expression)
    ExprP cond;                // If / While / For condition
    std::vector<StmtP> block;  // Block body
    StmtP s1, s2;              // If arms; While/Label/For body in s1
    StmtP init, update;        // For clauses

    // RuntimeCall payload
    RtKind rt_op = RtKind::Pop;
    size_t rt_n = 0;           // EnterSeq / SaveHandler
    std::string rt_name;       // Label/PopTo/Named/TraceLet/TraceBreak name
    trace::TraceP rt_lval;     // TraceSet target
    RtArg rt_value;            // TraceLet/TraceSet/TraceBreak/PushArg value
};

struct FuncLit {
    std::vector<std::string> params;
    std::vector<StmtP> body;
    // Set by the instrumenter: the environment expression recorded at this
    // definition site; closures carry it into the handler table.
    trace::TraceP env_trace;
};

struct Program {
    std::vector<StmtP> body;
};

// Builtin API names that are always in scope.
const std::vector<std::string>& builtin_names();
bool is_builtin_name(const std::string& name);

ExprP e_const(Scalar v, int line = 0, int col = 0);
ExprP e_var(std::string name, int line = 0, int col = 0);
ExprP e_binop(std::string op, ExprP l, ExprP r, int line = 0, int col = 0);
ExprP e_member(ExprP obj, std::string field, int line = 0, int col = 0);
ExprP e_index(ExprP obj, ExprP idx, int line = 0, int col = 0);
ExprP e_object(std::vector<std::pair<std::string, ExprP>> fields, int line = 0, int col = 0);
ExprP e_array(std::vector<ExprP> items, int line = 0, int col = 0);
ExprP e_func(FuncP f, int line = 0, int col = 0);

bool expr_equal(const ExprP& a, const ExprP& b);
bool stmt_equal(const StmtP& a, const StmtP& b);
bool program_equal(const Program& a, const Program& b);

// Canonical source rendering; parse(print(parse(s))) == parse(s).
std::string to_source(const Program& p);
std::string to_source(const StmtP& s, int indent = 0);

// Instrumented rendering: runtime calls are printed as "@op(...)" lines.
std::string to_instrumented_source(const Program& p);

// Debug dump: node kind + children, stable field order.
Json ast_to_json(const Program& p);

// Removes every RuntimeCall statement and instrumentation-only metadata,
// returning the program the instrumenter started from.
Program erase_instrumentation(const Program& p);

}  // namespace accel::ast
