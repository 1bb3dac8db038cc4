#pragma once

#include <cstdint>
#include <string>

#include "accel/numops.hpp"
#include "accel/scalar.hpp"

namespace accel::exec {

using Addr = uint32_t;

// Tagged runtime value of the trace executor. Containers live in the request
// arena and are referenced by index, so copying a DynValue never copies the
// container and aliasing works the way the trace language expects.
struct DynValue {
    enum class Tag { Undefined, Bool, Int, Float, Str, Object, Array, Env, Address };

    Tag tag = Tag::Undefined;
    bool b = false;
    int64_t i = 0;
    double f = 0.0;
    std::string s;
    uint32_t ref = 0;

    static DynValue undefined() { return DynValue{}; }
    static DynValue boolean(bool v) {
        DynValue x;
        x.tag = Tag::Bool;
        x.b = v;
        return x;
    }
    static DynValue integer(int64_t v) {
        DynValue x;
        x.tag = Tag::Int;
        x.i = v;
        return x;
    }
    static DynValue number(double v) {
        DynValue x;
        x.tag = Tag::Float;
        x.f = v;
        return x;
    }
    static DynValue str(std::string v) {
        DynValue x;
        x.tag = Tag::Str;
        x.s = std::move(v);
        return x;
    }
    static DynValue of_scalar(const Scalar& v);
    static DynValue object_ref(uint32_t id) {
        DynValue x;
        x.tag = Tag::Object;
        x.ref = id;
        return x;
    }
    static DynValue array_ref(uint32_t id) {
        DynValue x;
        x.tag = Tag::Array;
        x.ref = id;
        return x;
    }
    static DynValue env_ref(uint32_t id) {
        DynValue x;
        x.tag = Tag::Env;
        x.ref = id;
        return x;
    }
    static DynValue address(Addr a) {
        DynValue x;
        x.tag = Tag::Address;
        x.ref = a;
        return x;
    }

    bool is_container() const {
        return tag == Tag::Object || tag == Tag::Array || tag == Tag::Env ||
               tag == Tag::Address;
    }
    bool truthy() const;
    OpView op_view() const;
};

struct DynOpResult {
    bool ok = true;
    DynValue value;
    std::string error;
};

// Binary operators over dynamic values, including JavaScript's coercions;
// a genuine type error (such as Object * Int) reports failure. `===` on two
// containers is identity.
DynOpResult dyn_op(const std::string& op, const DynValue& a, const DynValue& b);

}  // namespace accel::exec
