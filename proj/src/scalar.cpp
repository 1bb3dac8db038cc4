#include "accel/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace accel {

bool Scalar::operator==(const Scalar& o) const {
    if (tag != o.tag) return false;
    switch (tag) {
        case Tag::Undefined: return true;
        case Tag::Bool: return b == o.b;
        case Tag::Int: return i == o.i;
        case Tag::Float:
            if (std::isnan(f) && std::isnan(o.f)) return true;
            return f == o.f;
        case Tag::Str: return s == o.s;
    }
    return false;
}

std::string js_int_string(int64_t v) { return std::to_string(v); }

std::string js_double_string(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    if (v == 0.0) return std::signbit(v) ? "0" : "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, end);
    // to_chars pads exponents ("1e-07"); JS does not ("1e-7").
    auto epos = out.find('e');
    if (epos != std::string::npos) {
        std::string mant = out.substr(0, epos);
        std::string exp = out.substr(epos + 1);
        bool neg = false;
        if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
            neg = exp[0] == '-';
            exp.erase(0, 1);
        }
        while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
        out = mant + "e" + (neg ? "-" : "+") + exp;
    }
    return out;
}

std::string scalar_to_display(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return "undefined";
        case Scalar::Tag::Bool: return v.b ? "true" : "false";
        case Scalar::Tag::Int: return js_int_string(v.i);
        case Scalar::Tag::Float: return js_double_string(v.f);
        case Scalar::Tag::Str: return v.s;
    }
    return "";
}

std::string scalar_to_source(const Scalar& v) {
    if (v.tag != Scalar::Tag::Str) return scalar_to_display(v);
    std::string out = "'";
    for (char c : v.s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += "'";
    return out;
}

double string_to_number(const std::string& s) {
    size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) begin++;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) end--;
    if (begin == end) return 0.0;
    std::string body = s.substr(begin, end - begin);
    const char* c = body.c_str();
    char* stop = nullptr;
    double v = std::strtod(c, &stop);
    if (stop != c + body.size()) return std::nan("");
    return v;
}

Scalar parse_number_literal(const std::string& text) {
    bool integral = text.find('.') == std::string::npos &&
                    text.find('e') == std::string::npos &&
                    text.find('E') == std::string::npos;
    if (integral) {
        int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc() && p == text.data() + text.size()) return Scalar::integer(v);
    }
    return Scalar::number(std::strtod(text.c_str(), nullptr));
}

}  // namespace accel
