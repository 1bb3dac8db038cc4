#pragma once

#include <string>

#include "accel/scalar.hpp"

namespace accel {

// View of an operand as seen by the binary operators. Containers (objects,
// arrays, environments, closures) never coerce; an operation that would need
// to is a genuine type error.
struct OpView {
    enum class Tag { Undefined, Bool, Int, Float, Str, Container };
    Tag tag = Tag::Undefined;
    bool b = false;
    int64_t i = 0;
    double f = 0.0;
    const std::string* s = nullptr;
    const char* container_name = "object";

    static OpView undefined() { return OpView{}; }
    static OpView boolean(bool v) {
        OpView x;
        x.tag = Tag::Bool;
        x.b = v;
        return x;
    }
    static OpView integer(int64_t v) {
        OpView x;
        x.tag = Tag::Int;
        x.i = v;
        return x;
    }
    static OpView number(double v) {
        OpView x;
        x.tag = Tag::Float;
        x.f = v;
        return x;
    }
    static OpView str(const std::string& v) {
        OpView x;
        x.tag = Tag::Str;
        x.s = &v;
        return x;
    }
    static OpView container(const char* name) {
        OpView x;
        x.tag = Tag::Container;
        x.container_name = name;
        return x;
    }
    static OpView of(const Scalar& v);
};

struct OpError {
    std::string message;
};

struct OpResult {
    bool ok = true;
    Scalar value;
    std::string error;

    static OpResult success(Scalar v) {
        OpResult r;
        r.value = std::move(v);
        return r;
    }
    static OpResult type_error(std::string msg) {
        OpResult r;
        r.ok = false;
        r.error = std::move(msg);
        return r;
    }
};

// The scalar half of every binary operator, shared by the tree-walking
// interpreter and the trace executor so that the two sandboxes cannot drift.
// `===`/`!==` on two containers is identity and must be handled by the caller
// before reaching here.
//
// Supported operators: + - * / < > <= >= === !==
// Coercions follow JavaScript: booleans and undefined coerce to numbers in
// arithmetic (1 + true is 2), a string operand makes `+` concatenate, strings
// in other arithmetic go through ToNumber, and `===` never coerces.
OpResult apply_binop(const std::string& op, const OpView& a, const OpView& b);

bool is_supported_operator(const std::string& op);

}  // namespace accel
