#include "accel/numops.hpp"

#include <cmath>

namespace accel {

namespace {

const char* tag_name(OpView::Tag t) {
    switch (t) {
        case OpView::Tag::Undefined: return "undefined";
        case OpView::Tag::Bool: return "boolean";
        case OpView::Tag::Int:
        case OpView::Tag::Float: return "number";
        case OpView::Tag::Str: return "string";
        case OpView::Tag::Container: return "object";
    }
    return "?";
}

bool is_numeric(const OpView& v) {
    return v.tag == OpView::Tag::Int || v.tag == OpView::Tag::Float;
}

// ToNumber, except containers which the caller rejects first.
double to_number(const OpView& v) {
    switch (v.tag) {
        case OpView::Tag::Undefined: return std::nan("");
        case OpView::Tag::Bool: return v.b ? 1.0 : 0.0;
        case OpView::Tag::Int: return static_cast<double>(v.i);
        case OpView::Tag::Float: return v.f;
        case OpView::Tag::Str: return string_to_number(*v.s);
        case OpView::Tag::Container: return std::nan("");
    }
    return std::nan("");
}

// Exact-integer view when the operand is an integer or a small boolean.
bool exact_int(const OpView& v, int64_t& out) {
    if (v.tag == OpView::Tag::Int) {
        out = v.i;
        return true;
    }
    if (v.tag == OpView::Tag::Bool) {
        out = v.b ? 1 : 0;
        return true;
    }
    return false;
}

std::string to_display(const OpView& v) {
    switch (v.tag) {
        case OpView::Tag::Undefined: return "undefined";
        case OpView::Tag::Bool: return v.b ? "true" : "false";
        case OpView::Tag::Int: return js_int_string(v.i);
        case OpView::Tag::Float: return js_double_string(v.f);
        case OpView::Tag::Str: return *v.s;
        case OpView::Tag::Container: return "";
    }
    return "";
}

OpResult container_error(const std::string& op, const OpView& a, const OpView& b) {
    const char* offender = a.tag == OpView::Tag::Container ? a.container_name : b.container_name;
    return OpResult::type_error("operator '" + op + "' is not defined on " + offender +
                                " values (" + tag_name(a.tag) + " " + op + " " + tag_name(b.tag) + ")");
}

OpResult arith(const std::string& op, const OpView& a, const OpView& b) {
    int64_t x = 0, y = 0;
    if (op != "/" && exact_int(a, x) && exact_int(b, y)) {
        int64_t r = 0;
        bool overflow;
        if (op == "+")
            overflow = __builtin_add_overflow(x, y, &r);
        else if (op == "-")
            overflow = __builtin_sub_overflow(x, y, &r);
        else
            overflow = __builtin_mul_overflow(x, y, &r);
        if (!overflow) return OpResult::success(Scalar::integer(r));
    }
    double da = to_number(a), db = to_number(b);
    double r;
    if (op == "+")
        r = da + db;
    else if (op == "-")
        r = da - db;
    else if (op == "*")
        r = da * db;
    else
        r = da / db;
    return OpResult::success(Scalar::number(r));
}

bool strict_equals(const OpView& a, const OpView& b) {
    bool na = is_numeric(a), nb = is_numeric(b);
    if (na && nb) {
        int64_t x, y;
        if (exact_int(a, x) && exact_int(b, y)) return x == y;
        double da = a.tag == OpView::Tag::Int ? static_cast<double>(a.i) : a.f;
        double db = b.tag == OpView::Tag::Int ? static_cast<double>(b.i) : b.f;
        return da == db;  // NaN !== NaN
    }
    if (a.tag != b.tag) return false;
    switch (a.tag) {
        case OpView::Tag::Undefined: return true;
        case OpView::Tag::Bool: return a.b == b.b;
        case OpView::Tag::Str: return *a.s == *b.s;
        default: return false;
    }
}

OpResult relational(const std::string& op, const OpView& a, const OpView& b) {
    if (a.tag == OpView::Tag::Str && b.tag == OpView::Tag::Str) {
        int c = a.s->compare(*b.s);
        bool r;
        if (op == "<")
            r = c < 0;
        else if (op == ">")
            r = c > 0;
        else if (op == "<=")
            r = c <= 0;
        else
            r = c >= 0;
        return OpResult::success(Scalar::boolean(r));
    }
    double da = to_number(a), db = to_number(b);
    if (std::isnan(da) || std::isnan(db)) return OpResult::success(Scalar::boolean(false));
    bool r;
    if (op == "<")
        r = da < db;
    else if (op == ">")
        r = da > db;
    else if (op == "<=")
        r = da <= db;
    else
        r = da >= db;
    return OpResult::success(Scalar::boolean(r));
}

}  // namespace

OpView OpView::of(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return OpView::undefined();
        case Scalar::Tag::Bool: return OpView::boolean(v.b);
        case Scalar::Tag::Int: return OpView::integer(v.i);
        case Scalar::Tag::Float: return OpView::number(v.f);
        case Scalar::Tag::Str: return OpView::str(v.s);
    }
    return OpView::undefined();
}

bool is_supported_operator(const std::string& op) {
    return op == "+" || op == "-" || op == "*" || op == "/" || op == "<" || op == ">" ||
           op == "<=" || op == ">=" || op == "===" || op == "!==";
}

OpResult apply_binop(const std::string& op, const OpView& a, const OpView& b) {
    if (op == "===" || op == "!==") {
        if (a.tag == OpView::Tag::Container || b.tag == OpView::Tag::Container) {
            // Mixed container/non-container is simply unequal; identity on two
            // containers is decided by the caller.
            bool eq = false;
            return OpResult::success(Scalar::boolean(op == "===" ? eq : !eq));
        }
        bool eq = strict_equals(a, b);
        return OpResult::success(Scalar::boolean(op == "===" ? eq : !eq));
    }
    if (a.tag == OpView::Tag::Container || b.tag == OpView::Tag::Container)
        return container_error(op, a, b);
    if (op == "+") {
        if (a.tag == OpView::Tag::Str || b.tag == OpView::Tag::Str)
            return OpResult::success(Scalar::str(to_display(a) + to_display(b)));
        return arith(op, a, b);
    }
    if (op == "-" || op == "*" || op == "/") return arith(op, a, b);
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return relational(op, a, b);
    return OpResult::type_error("unknown operator '" + op + "'");
}

}  // namespace accel
