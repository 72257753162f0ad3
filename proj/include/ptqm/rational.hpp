#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ptqm {

/// Exact rational on 64-bit integers with overflow checks; enough headroom
/// for low-order perturbation series coefficients.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::runtime_error("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::runtime_error("Rational: overflow");
        return r;
    }
    static std::int64_t add_checked(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw std::runtime_error("Rational: overflow");
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(add_checked(mul_checked(a.num, b.den), mul_checked(b.num, a.den)),
                        mul_checked(a.den, b.den));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num, b.den); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational x(a.num, b.den);  // cross-reduce before multiplying
        Rational y(b.num, a.den);
        return Rational(mul_checked(x.num, y.num), mul_checked(x.den, y.den));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::runtime_error("Rational: division by zero");
        return a * Rational(b.den, b.num);
    }
    Rational operator-() const { return Rational(-num, den); }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
    bool is_zero() const { return num == 0; }
    double to_double() const { return double(num) / double(den); }
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

/// Gaussian rational a + i b.
struct GRational {
    Rational re, im;

    GRational() = default;
    GRational(Rational r) : re(r) {}
    GRational(Rational r, Rational i) : re(r), im(i) {}
    static GRational i() { return GRational(Rational(0), Rational(1)); }

    friend GRational operator+(const GRational& a, const GRational& b) { return {a.re + b.re, a.im + b.im}; }
    friend GRational operator-(const GRational& a, const GRational& b) { return {a.re - b.re, a.im - b.im}; }
    friend GRational operator*(const GRational& a, const GRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GRational operator/(const GRational& a, const GRational& b) {
        Rational n2 = b.re * b.re + b.im * b.im;
        if (n2.is_zero()) throw std::runtime_error("GRational: division by zero");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    GRational operator-() const { return {-re, -im}; }
    friend bool operator==(const GRational& a, const GRational& b) { return a.re == b.re && a.im == b.im; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    std::string str() const { return im.is_zero() ? re.str() : "(" + re.str() + "+" + im.str() + "i)"; }
};

}  // namespace ptqm
