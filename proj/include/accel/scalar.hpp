#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace accel {

// Primitive constant shared by the guest AST, the trace language, and both
// runtimes. Numbers keep an exact-integer variant alongside doubles so that
// integer arithmetic stays exact while general arithmetic follows JavaScript.
struct Scalar {
    enum class Tag { Undefined, Bool, Int, Float, Str };

    Tag tag = Tag::Undefined;
    bool b = false;
    int64_t i = 0;
    double f = 0.0;
    std::string s;

    static Scalar undefined() { return Scalar{}; }
    static Scalar boolean(bool v) {
        Scalar x;
        x.tag = Tag::Bool;
        x.b = v;
        return x;
    }
    static Scalar integer(int64_t v) {
        Scalar x;
        x.tag = Tag::Int;
        x.i = v;
        return x;
    }
    static Scalar number(double v) {
        Scalar x;
        x.tag = Tag::Float;
        x.f = v;
        return x;
    }
    static Scalar str(std::string v) {
        Scalar x;
        x.tag = Tag::Str;
        x.s = std::move(v);
        return x;
    }

    bool operator==(const Scalar& o) const;
};

// Shortest round-trip decimal form matching JavaScript's Number#toString:
// integral doubles print without a decimal point, exponents are unpadded.
std::string js_double_string(double v);
std::string js_int_string(int64_t v);

// Rendering used by string concatenation ('undefined', 'true', numbers, ...).
std::string scalar_to_display(const Scalar& v);

// Canonical source rendering (strings quoted) for pretty printers.
std::string scalar_to_source(const Scalar& v);

// JavaScript ToNumber on a string ('' -> 0, garbage -> NaN).
double string_to_number(const std::string& s);

// Parse a numeric literal: integral text that fits an int64 stays exact.
Scalar parse_number_literal(const std::string& text);

}  // namespace accel
