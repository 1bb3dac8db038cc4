#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accel/ast.hpp"
#include "accel/trace.hpp"

namespace accel::compile {

struct CompileError : std::runtime_error {
    int line, col;
    CompileError(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " +
                             std::to_string(c) + ")"),
          line(l),
          col(c) {}
};

// Where a guest identifier lives from the trace's point of view: directly as
// a trace variable, or as a field of the enclosing function's environment.
struct Place {
    enum class Kind { Var, EnvSlot };
    Kind kind = Kind::Var;
    std::string name;
    bool builtin = false;

    trace::TraceP as_expr() const;   // x            or  *env.x
    trace::TraceP as_lval() const;   // x            or  *env.x
    trace::TraceP as_addr() const;   // &x           or  env.x
};

// Compile-time environment rho. Later entries shadow earlier ones; insertion
// order determines the capture order of environment records.
class CompileEnv {
  public:
    static CompileEnv with_builtins();

    void bind(const std::string& name, Place place) { entries_.emplace_back(name, std::move(place)); }
    const Place* lookup(const std::string& name) const;

    // Visible non-builtin bindings in declaration order: the capture domain
    // for a function literal defined here.
    std::vector<std::pair<std::string, Place>> capture_domain() const;

  private:
    std::vector<std::pair<std::string, Place>> entries_;
};

trace::TraceP compile_expr(const ast::ExprP& e, const CompileEnv& env);
trace::TraceP compile_lval(const ast::ExprP& e, const CompileEnv& env);

// Compiles one core statement into its instrumented form (the original
// statement plus interleaved runtime calls), threading the compile-time
// environment.
std::vector<ast::StmtP> compile_stmt(const ast::StmtP& s, CompileEnv& env);

// Whole-program pass: instruments every statement of a desugared program and
// appends saveHandler(0) at the end of the top level.
ast::Program instrument(const ast::Program& desugared);

}  // namespace accel::compile
