#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "accel/ast.hpp"
#include "accel/numops.hpp"
#include "accel/scalar.hpp"

namespace accel::interp {

using Json = nlohmann::ordered_json;

struct GuestValue;
struct Scope;
using ScopeP = std::shared_ptr<Scope>;

struct ObjData {
    std::vector<std::pair<std::string, GuestValue>> fields;
};
struct ArrData {
    std::vector<GuestValue> items;
};

enum class BuiltinFn { Get, Post, Respond, Listen };

struct ClosureData {
    ast::FuncP func;
    ScopeP captured;
};

// Runtime value of the guest interpreter. Objects and arrays are shared
// mutable records; closures capture their defining scope by reference, so
// aliasing through multiple closures is preserved.
struct GuestValue {
    enum class Tag { Undefined, Bool, Int, Float, Str, Object, Array, Closure, Builtin };

    Tag tag = Tag::Undefined;
    bool b = false;
    int64_t i = 0;
    double f = 0.0;
    std::string s;
    std::shared_ptr<ObjData> obj;
    std::shared_ptr<ArrData> arr;
    std::shared_ptr<ClosureData> fn;
    BuiltinFn builtin = BuiltinFn::Get;

    static GuestValue undefined() { return GuestValue{}; }
    static GuestValue boolean(bool v) {
        GuestValue x;
        x.tag = Tag::Bool;
        x.b = v;
        return x;
    }
    static GuestValue integer(int64_t v) {
        GuestValue x;
        x.tag = Tag::Int;
        x.i = v;
        return x;
    }
    static GuestValue number(double v) {
        GuestValue x;
        x.tag = Tag::Float;
        x.f = v;
        return x;
    }
    static GuestValue str(std::string v) {
        GuestValue x;
        x.tag = Tag::Str;
        x.s = std::move(v);
        return x;
    }
    static GuestValue of_scalar(const Scalar& v);
    static GuestValue object();
    static GuestValue array();

    bool is_container() const {
        return tag == Tag::Object || tag == Tag::Array || tag == Tag::Closure ||
               tag == Tag::Builtin;
    }
    bool truthy() const;
    OpView op_view() const;
};

// Lexical scope chain; slots are shared cells so closures alias mutations.
struct Scope {
    ScopeP parent;
    std::vector<std::pair<std::string, std::shared_ptr<GuestValue>>> slots;

    explicit Scope(ScopeP p = nullptr) : parent(std::move(p)) {}

    std::shared_ptr<GuestValue> lookup(const std::string& name);
    void define(const std::string& name, GuestValue v);
};

// JSON bridge shared with the trace executor by construction: undefined
// object fields are dropped, undefined array items become null, numbers keep
// their integer/float spelling.
GuestValue guest_of_json(const Json& j);
Json json_of_guest(const GuestValue& v);

// How a value turns into an HTTP response body: strings are sent raw,
// anything else as JSON.
std::string response_body_of_json(const Json& j);

}  // namespace accel::interp
