#pragma once

#include <stdexcept>
#include <string>

#include "accel/ast.hpp"

namespace accel::ast {

struct ParseError : std::runtime_error {
    enum class Kind { Syntax, UnsupportedFeature };

    Kind kind;
    int line, col;
    std::string construct;  // for UnsupportedFeature: the offending construct

    ParseError(Kind k, const std::string& msg, int l, int c, std::string feature = "")
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " +
                             std::to_string(c) + ")"),
          kind(k),
          line(l),
          col(c),
          construct(std::move(feature)) {}
};

// Parses guest source text. Throws ParseError; uses of getters/setters, eval,
// or proxies raise the UnsupportedFeature kind naming the construct.
Program parse(const std::string& source);

}  // namespace accel::ast
