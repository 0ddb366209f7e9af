// Exact arithmetic in Q(sqrt(d)) for a fixed non-square d > 0. Comparisons
// go through sign analysis of a^2 - d b^2; no floating point anywhere.
#pragma once

#include "qmdyn/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmdyn {

inline bool is_square(int d) {
    if (d < 0) return false;
    int s = 0;
    while (s * s < d) ++s;
    return s * s == d;
}

class QuadExt {
public:
    QuadExt() : a_(0), b_(0), d_(2) {}

    QuadExt(Rational a, Rational b, int d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
        if (d < 2 || is_square(d)) throw std::invalid_argument("QuadExt: d must be a non-square >= 2");
    }

    static QuadExt rational(Rational a, int d) { return QuadExt(std::move(a), Rational(0), d); }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    int d() const { return d_; }

    /// Galois conjugation a + b sqrt(d) -> a - b sqrt(d); an involutive ring map.
    QuadExt star() const { return QuadExt(a_, -b_, d_); }

    bool is_lattice_point() const { return is_integer(a_) && is_integer(b_); }

    int sign() const {
        const int sa = a_.sign();
        const int sb = b_.sign();
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // Mixed signs: compare a^2 against d b^2. Equality would force d to
        // be a rational square, which is excluded.
        const Rational lhs = a_ * a_;
        const Rational rhs = Rational(d_) * b_ * b_;
        if (lhs == rhs) throw std::logic_error("QuadExt: impossible equality for non-square d");
        const int dominant = lhs > rhs ? sa : sb;
        return dominant;
    }

    QuadExt abs() const { return sign() >= 0 ? *this : -*this; }

    /// For display and diagnostics only; never used in comparisons.
    double approx() const {
        const double da = numerator(a_).convert_to<double>() / denominator(a_).convert_to<double>();
        const double db = numerator(b_).convert_to<double>() / denominator(b_).convert_to<double>();
        return da + db * std::sqrt(static_cast<double>(d_));
    }

    /// "a" when b = 0, otherwise "a+b*sqrt(d)" / "a-b*sqrt(d)" with exact rationals.
    std::string str() const {
        if (b_ == 0) return rat_str(a_);
        std::string s = rat_str(a_);
        s += (b_ > 0) ? '+' : '-';
        s += rat_str(b_ > 0 ? b_ : Rational(-b_));
        s += "*sqrt(";
        s += std::to_string(d_);
        s += ')';
        return s;
    }

    friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a_, -x.b_, x.d_); }
    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return QuadExt(x.a_ + y.a_, x.b_ + y.b_, x.d_);
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return QuadExt(x.a_ - y.a_, x.b_ - y.b_, x.d_);
    }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return QuadExt(x.a_ * y.a_ + Rational(x.d_) * x.b_ * y.b_,
                       x.a_ * y.b_ + x.b_ * y.a_, x.d_);
    }
    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator<(const QuadExt& x, const QuadExt& y) { return (x - y).sign() < 0; }
    friend bool operator<=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() <= 0; }
    friend bool operator>(const QuadExt& x, const QuadExt& y) { return y < x; }
    friend bool operator>=(const QuadExt& x, const QuadExt& y) { return y <= x; }

private:
    static void check(const QuadExt& x, const QuadExt& y) {
        if (x.d_ != y.d_) throw std::invalid_argument("QuadExt: mixed field extensions");
    }

    Rational a_, b_;
    int d_;
};

}  // namespace qmdyn
