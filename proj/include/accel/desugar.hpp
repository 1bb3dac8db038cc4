#pragma once

#include <stdexcept>
#include <string>

#include "accel/ast.hpp"

namespace accel::ast {

struct DesugarError : std::runtime_error {
    int line, col;
    DesugarError(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " +
                             std::to_string(c) + ")"),
          line(l),
          col(c) {}
};

// Lowers surface conveniences onto the core fragment: for becomes while,
// function declarations and anonymous functions become named lets, bare call
// statements become lets, `require('containerless')` member calls become
// builtin calls, and a top-level main(req) is registered as a listen handler.
// Idempotent on already-core programs.
Program desugar(const Program& p);

// Asserts the core-fragment invariants the instrumenter relies on: no surface
// nodes remain, every application and function literal is named, breaks name
// an enclosing label, and labels are unique within a function body.
void validate_core(const Program& p);

}  // namespace accel::ast
