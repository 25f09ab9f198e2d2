#ifndef DQ_SCALAR_HPP
#define DQ_SCALAR_HPP

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dq {

using Rational = mpq_class;

/// Gaussian rational a + b*i with exact arbitrary-precision components.
/// All coefficient arithmetic in the engine happens here; there is no
/// floating point anywhere.
struct Scalar {
    Rational re{0};
    Rational im{0};

    Scalar() = default;
    Scalar(long v) : re(v) {}
    Scalar(const Rational& r) : re(r) {}
    Scalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static Scalar i() { return Scalar(Rational(0), Rational(1)); }
    static Scalar of(long num, long den) {
        Rational r(num, den);
        r.canonicalize();
        return Scalar(r);
    }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    Scalar operator-() const { return Scalar(-re, -im); }
    Scalar conj() const { return Scalar(re, -im); }

    Scalar& operator+=(const Scalar& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return Scalar(Rational(a.re * b.re - a.im * b.im),
                      Rational(a.re * b.im + a.im * b.re));
    }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar inverse() const {
        if (is_zero()) throw std::domain_error("Scalar: division by zero");
        Rational n(re * re + im * im);
        return Scalar(Rational(re / n), Rational(-im / n));
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// max(|re|, |im|), the sup-norm used for exact residual reporting.
    Rational max_abs() const {
        Rational r = re < 0 ? Rational(-re) : re;
        Rational s = im < 0 ? Rational(-im) : im;
        return r < s ? s : r;
    }

    std::string str() const;
};

std::string rational_str(const Rational& r);
Rational rational_from_str(const std::string& s);

/// Exponent of hbar stored as twice its value, so half-integer powers
/// stay exact integers. weight(hbar^h) = twice_value.
struct HalfInt {
    int twice_value = 0;

    HalfInt() = default;
    explicit HalfInt(int tv) : twice_value(tv) {}
    static HalfInt whole(int k) { return HalfInt(2 * k); }

    bool is_integer() const { return twice_value % 2 == 0; }
    int floor_whole() const {
        int tv = twice_value;
        return (tv >= 0 ? tv / 2 : (tv - 1) / 2);
    }

    friend HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.twice_value + b.twice_value); }
    friend HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt(a.twice_value - b.twice_value); }
    auto operator<=>(const HalfInt&) const = default;
};

}  // namespace dq

#endif
