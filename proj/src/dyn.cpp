#include "accel/dyn.hpp"

namespace accel::exec {

DynValue DynValue::of_scalar(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return undefined();
        case Scalar::Tag::Bool: return boolean(v.b);
        case Scalar::Tag::Int: return integer(v.i);
        case Scalar::Tag::Float: return number(v.f);
        case Scalar::Tag::Str: return str(v.s);
    }
    return undefined();
}

bool DynValue::truthy() const {
    switch (tag) {
        case Tag::Undefined: return false;
        case Tag::Bool: return b;
        case Tag::Int: return i != 0;
        case Tag::Float: return f == f && f != 0.0;
        case Tag::Str: return !s.empty();
        default: return true;
    }
}

OpView DynValue::op_view() const {
    switch (tag) {
        case Tag::Undefined: return OpView::undefined();
        case Tag::Bool: return OpView::boolean(b);
        case Tag::Int: return OpView::integer(i);
        case Tag::Float: return OpView::number(f);
        case Tag::Str: return OpView::str(s);
        case Tag::Object: return OpView::container("object");
        case Tag::Array: return OpView::container("array");
        case Tag::Env: return OpView::container("environment");
        case Tag::Address: return OpView::container("address");
    }
    return OpView::undefined();
}

DynOpResult dyn_op(const std::string& op, const DynValue& a, const DynValue& b) {
    if ((op == "===" || op == "!==") && a.is_container() && b.is_container()) {
        bool eq = a.tag == b.tag && a.ref == b.ref;
        DynOpResult r;
        r.value = DynValue::boolean(op == "===" ? eq : !eq);
        return r;
    }
    OpResult res = apply_binop(op, a.op_view(), b.op_view());
    DynOpResult r;
    if (!res.ok) {
        r.ok = false;
        r.error = res.error;
        return r;
    }
    r.value = DynValue::of_scalar(res.value);
    return r;
}

}  // namespace accel::exec
