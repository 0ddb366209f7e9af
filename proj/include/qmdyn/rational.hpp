// Exact arbitrary-precision rational arithmetic used throughout qmdyn.
// Every identity we test is an exact identity, so nothing here is allowed
// to round.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmdyn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Floor division toward -infinity.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    if (b == 0) throw std::domain_error("floor_div: division by zero");
    BigInt q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

/// floor(x) as an integer (toward -infinity).
inline BigInt rational_floor(const Rational& x) {
    return floor_div(numerator(x), denominator(x));
}

/// Nearest integer, half rounded up. Used for grid quantization.
inline BigInt rational_round(const Rational& x) {
    return rational_floor(x + Rational(1, 2));
}

inline bool is_integer(const Rational& x) { return denominator(x) == 1; }

/// "p" when the denominator is 1, otherwise "p/q".
inline std::string rat_str(const Rational& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) {
        s += '/';
        s += denominator(x).str();
    }
    return s;
}

/// Parses "p" or "p/q" (whitespace not allowed).
inline Rational parse_rational(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(BigInt(std::string(s)));
        BigInt num{std::string(s.substr(0, slash))};
        BigInt den{std::string(s.substr(slash + 1))};
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("parse_rational: bad input '" + std::string(s) + "'");
    }
}

/// Exact conversion to long long; throws if out of range or not integral.
inline long long to_long(const Rational& x) {
    if (!is_integer(x)) throw std::domain_error("to_long: value is not an integer");
    return numerator(x).convert_to<long long>();
}

}  // namespace qmdyn
