#include "accel/value.hpp"

namespace accel::interp {

GuestValue GuestValue::of_scalar(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return undefined();
        case Scalar::Tag::Bool: return boolean(v.b);
        case Scalar::Tag::Int: return integer(v.i);
        case Scalar::Tag::Float: return number(v.f);
        case Scalar::Tag::Str: return str(v.s);
    }
    return undefined();
}

GuestValue GuestValue::object() {
    GuestValue x;
    x.tag = Tag::Object;
    x.obj = std::make_shared<ObjData>();
    return x;
}

GuestValue GuestValue::array() {
    GuestValue x;
    x.tag = Tag::Array;
    x.arr = std::make_shared<ArrData>();
    return x;
}

bool GuestValue::truthy() const {
    switch (tag) {
        case Tag::Undefined: return false;
        case Tag::Bool: return b;
        case Tag::Int: return i != 0;
        case Tag::Float: return f == f && f != 0.0;
        case Tag::Str: return !s.empty();
        default: return true;
    }
}

OpView GuestValue::op_view() const {
    switch (tag) {
        case Tag::Undefined: return OpView::undefined();
        case Tag::Bool: return OpView::boolean(b);
        case Tag::Int: return OpView::integer(i);
        case Tag::Float: return OpView::number(f);
        case Tag::Str: return OpView::str(s);
        case Tag::Object: return OpView::container("object");
        case Tag::Array: return OpView::container("array");
        case Tag::Closure: return OpView::container("function");
        case Tag::Builtin: return OpView::container("function");
    }
    return OpView::undefined();
}

std::shared_ptr<GuestValue> Scope::lookup(const std::string& name) {
    for (Scope* s = this; s; s = s->parent.get()) {
        for (auto it = s->slots.rbegin(); it != s->slots.rend(); ++it)
            if (it->first == name) return it->second;
    }
    return nullptr;
}

void Scope::define(const std::string& name, GuestValue v) {
    slots.emplace_back(name, std::make_shared<GuestValue>(std::move(v)));
}

GuestValue guest_of_json(const Json& j) {
    if (j.is_null()) return GuestValue::undefined();
    if (j.is_boolean()) return GuestValue::boolean(j.get<bool>());
    if (j.is_number_integer()) return GuestValue::integer(j.get<int64_t>());
    if (j.is_number_unsigned()) return GuestValue::integer(static_cast<int64_t>(j.get<uint64_t>()));
    if (j.is_number_float()) return GuestValue::number(j.get<double>());
    if (j.is_string()) return GuestValue::str(j.get<std::string>());
    if (j.is_array()) {
        GuestValue v = GuestValue::array();
        for (const auto& item : j) v.arr->items.push_back(guest_of_json(item));
        return v;
    }
    if (j.is_object()) {
        GuestValue v = GuestValue::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            v.obj->fields.emplace_back(it.key(), guest_of_json(it.value()));
        return v;
    }
    return GuestValue::undefined();
}

namespace {
Json json_of_guest_depth(const GuestValue& v, int depth);
}  // namespace

Json json_of_guest(const GuestValue& v) { return json_of_guest_depth(v, 0); }

namespace {
Json json_of_guest_depth(const GuestValue& v, int depth) {
    if (depth > 200)
        throw std::runtime_error("value is cyclic or too deeply nested to serialize");
    switch (v.tag) {
        case GuestValue::Tag::Undefined: return nullptr;
        case GuestValue::Tag::Bool: return v.b;
        case GuestValue::Tag::Int: return v.i;
        case GuestValue::Tag::Float: return v.f;
        case GuestValue::Tag::Str: return v.s;
        case GuestValue::Tag::Array: {
            Json out = Json::array();
            for (const auto& item : v.arr->items)
                out.push_back(json_of_guest_depth(item, depth + 1));
            return out;
        }
        case GuestValue::Tag::Object: {
            Json out = Json::object();
            for (const auto& [k, f] : v.obj->fields) {
                if (f.tag == GuestValue::Tag::Undefined) continue;
                out[k] = json_of_guest_depth(f, depth + 1);
            }
            return out;
        }
        case GuestValue::Tag::Closure:
        case GuestValue::Tag::Builtin: return nullptr;
    }
    return nullptr;
}
}  // namespace

std::string response_body_of_json(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

}  // namespace accel::interp
