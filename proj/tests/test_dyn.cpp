#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "accel/dyn.hpp"
#include "accel/scalar.hpp"

using namespace accel;
using exec::DynValue;

TEST_CASE("1 + true evaluates to 2 exactly") {
    auto r = exec::dyn_op("+", DynValue::integer(1), DynValue::boolean(true));
    REQUIRE(r.ok);
    CHECK(r.value.tag == DynValue::Tag::Int);
    CHECK(r.value.i == 2);
}

TEST_CASE("string concatenation") {
    auto r = exec::dyn_op("+", DynValue::str("a"), DynValue::str("b"));
    REQUIRE(r.ok);
    CHECK(r.value.s == "ab");

    r = exec::dyn_op("+", DynValue::str("n="), DynValue::integer(2));
    REQUIRE(r.ok);
    CHECK(r.value.s == "n=2");

    r = exec::dyn_op("+", DynValue::integer(1), DynValue::str("x"));
    REQUIRE(r.ok);
    CHECK(r.value.s == "1x");
}

TEST_CASE("genuine type errors on container operands") {
    auto r = exec::dyn_op("*", DynValue::object_ref(0), DynValue::integer(2));
    CHECK_FALSE(r.ok);
    r = exec::dyn_op("+", DynValue::array_ref(0), DynValue::str("s"));
    CHECK_FALSE(r.ok);
    r = exec::dyn_op("<", DynValue::integer(1), DynValue::env_ref(0));
    CHECK_FALSE(r.ok);
}

TEST_CASE("strict equality never coerces; container equality is identity") {
    CHECK(exec::dyn_op("===", DynValue::integer(1), DynValue::str("1")).value.b == false);
    CHECK(exec::dyn_op("===", DynValue::integer(2), DynValue::number(2.0)).value.b == true);
    CHECK(exec::dyn_op("===", DynValue::undefined(), DynValue::undefined()).value.b == true);
    CHECK(exec::dyn_op("!==", DynValue::boolean(true), DynValue::integer(1)).value.b == true);
    CHECK(exec::dyn_op("===", DynValue::object_ref(3), DynValue::object_ref(3)).value.b == true);
    CHECK(exec::dyn_op("===", DynValue::object_ref(3), DynValue::object_ref(4)).value.b == false);
    CHECK(exec::dyn_op("===", DynValue::object_ref(3), DynValue::array_ref(3)).value.b == false);
    CHECK(exec::dyn_op("===", DynValue::object_ref(3), DynValue::integer(3)).value.b == false);
    // NaN is not equal to itself.
    CHECK(exec::dyn_op("===", DynValue::number(std::nan("")), DynValue::number(std::nan("")))
              .value.b == false);
}

// ---------------------------------------------------------------------------
// Table-driven coercion oracle over all tag pairs.
//
// Documented coercion rules for arithmetic and relational operators:
//   undefined -> NaN, booleans -> 0/1, strings -> ToNumber for - * / and
//   relationals, any string operand makes + concatenate, containers are a
//   genuine type error, and integer arithmetic is exact with overflow
//   promoting to float.
// ---------------------------------------------------------------------------

namespace {

enum class Kind { Undef, Bool, Int, Float, Str, Container };

DynValue sample(Kind k) {
    switch (k) {
        case Kind::Undef: return DynValue::undefined();
        case Kind::Bool: return DynValue::boolean(true);
        case Kind::Int: return DynValue::integer(3);
        case Kind::Float: return DynValue::number(1.5);
        case Kind::Str: return DynValue::str("4");
        case Kind::Container: return DynValue::object_ref(0);
    }
    return DynValue::undefined();
}

// Independent numeric view of the sample values above.
double oracle_number(Kind k) {
    switch (k) {
        case Kind::Undef: return std::nan("");
        case Kind::Bool: return 1.0;
        case Kind::Int: return 3.0;
        case Kind::Float: return 1.5;
        case Kind::Str: return 4.0;  // ToNumber("4")
        case Kind::Container: return std::nan("");
    }
    return std::nan("");
}

std::string oracle_display(Kind k) {
    switch (k) {
        case Kind::Undef: return "undefined";
        case Kind::Bool: return "true";
        case Kind::Int: return "3";
        case Kind::Float: return "1.5";
        case Kind::Str: return "4";
        case Kind::Container: return "";
    }
    return "";
}

bool numeric_equal(const DynValue& v, double expected) {
    double got = v.tag == DynValue::Tag::Int ? static_cast<double>(v.i) : v.f;
    if (std::isnan(expected)) return v.tag == DynValue::Tag::Float && std::isnan(got);
    return got == expected;
}

}  // namespace

TEST_CASE("coercion table over all tag pairs matches the documented oracle") {
    const Kind kinds[] = {Kind::Undef, Kind::Bool, Kind::Int, Kind::Float, Kind::Str,
                          Kind::Container};
    const std::string arith_ops[] = {"+", "-", "*", "/"};
    const std::string rel_ops[] = {"<", ">", "<=", ">="};

    for (Kind a : kinds) {
        for (Kind b : kinds) {
            bool has_container = a == Kind::Container || b == Kind::Container;
            for (const auto& op : arith_ops) {
                CAPTURE(static_cast<int>(a));
                CAPTURE(static_cast<int>(b));
                CAPTURE(op);
                auto r = exec::dyn_op(op, sample(a), sample(b));
                if (has_container) {
                    CHECK_FALSE(r.ok);
                    continue;
                }
                REQUIRE(r.ok);
                if (op == "+" && (a == Kind::Str || b == Kind::Str)) {
                    CHECK(r.value.tag == DynValue::Tag::Str);
                    CHECK(r.value.s == oracle_display(a) + oracle_display(b));
                    continue;
                }
                double x = oracle_number(a), y = oracle_number(b);
                double expect = op == "+"   ? x + y
                                : op == "-" ? x - y
                                : op == "*" ? x * y
                                            : x / y;
                CHECK(numeric_equal(r.value, expect));
            }
            for (const auto& op : rel_ops) {
                CAPTURE(op);
                auto r = exec::dyn_op(op, sample(a), sample(b));
                if (has_container) {
                    CHECK_FALSE(r.ok);
                    continue;
                }
                REQUIRE(r.ok);
                bool expect;
                if (a == Kind::Str && b == Kind::Str) {
                    // lexicographic; both samples are "4"
                    expect = op == "<=" || op == ">=";
                } else {
                    double x = oracle_number(a), y = oracle_number(b);
                    if (std::isnan(x) || std::isnan(y))
                        expect = false;
                    else
                        expect = op == "<"    ? x < y
                                 : op == ">"  ? x > y
                                 : op == "<=" ? x <= y
                                              : x >= y;
                }
                CHECK(r.value.b == expect);
            }
        }
    }
}

TEST_CASE("integer arithmetic is exact and overflow promotes to float") {
    int64_t big = int64_t{1} << 62;
    auto r = exec::dyn_op("+", DynValue::integer(big), DynValue::integer(big));
    REQUIRE(r.ok);
    CHECK(r.value.tag == DynValue::Tag::Float);
    CHECK(r.value.f == std::ldexp(1.0, 63));

    auto exact = exec::dyn_op("*", DynValue::integer(1'000'000'007),
                              DynValue::integer(1'000'000'009));
    REQUIRE(exact.ok);
    CHECK(exact.value.tag == DynValue::Tag::Int);
    CHECK(exact.value.i == int64_t{1'000'000'007} * int64_t{1'000'000'009});
}

TEST_CASE("division always yields a float") {
    auto r = exec::dyn_op("/", DynValue::integer(6), DynValue::integer(3));
    REQUIRE(r.ok);
    CHECK(r.value.tag == DynValue::Tag::Float);
    CHECK(r.value.f == 2.0);
    CHECK(js_double_string(r.value.f) == "2");
}

TEST_CASE("JavaScript number rendering") {
    CHECK(js_double_string(5.0) == "5");
    CHECK(js_double_string(0.75) == "0.75");
    CHECK(js_double_string(-0.5) == "-0.5");
    CHECK(js_double_string(1e21) == "1e+21");
    CHECK(js_double_string(1e-7) == "1e-7");
    CHECK(js_double_string(std::nan("")) == "NaN");
    CHECK(js_double_string(INFINITY) == "Infinity");
    CHECK(string_to_number("  42 ") == 42.0);
    CHECK(string_to_number("") == 0.0);
    CHECK(std::isnan(string_to_number("4x")));
}
