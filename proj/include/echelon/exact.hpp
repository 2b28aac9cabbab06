#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace echelon {

// Element a + b*sqrt(d) of a real quadratic field Q(sqrt d), d > 1 squarefree
// or at least not a perfect square. d == 0 marks a plain rational. Values with
// different nonzero radicands cannot be mixed.
class Surd {
public:
    Surd() = default;
    Surd(long n) : a_(n) {}
    Surd(int n) : a_(n) {}
    Surd(const mpq_class& a) : a_(a) {}
    Surd(mpq_class a, mpq_class b, long d);

    static Surd sqrt_of(long d);
    static Surd ratio(long p, long q);
    static Surd parse(std::string_view text);

    const mpq_class& rational_part() const { return a_; }
    const mpq_class& surd_part() const { return b_; }
    long radicand() const { return d_; }
    bool is_rational() const { return sgn(b_) == 0; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    int sign() const;
    double to_double() const;
    std::string str() const;

    Surd operator-() const;
    Surd& operator+=(const Surd& o);
    Surd& operator-=(const Surd& o);
    Surd& operator*=(const Surd& o);
    Surd& operator/=(const Surd& o);
    Surd inverse() const;

    friend Surd operator+(Surd x, const Surd& y) { return x += y; }
    friend Surd operator-(Surd x, const Surd& y) { return x -= y; }
    friend Surd operator*(Surd x, const Surd& y) { return x *= y; }
    friend Surd operator/(Surd x, const Surd& y) { return x /= y; }
    friend bool operator==(const Surd& x, const Surd& y);
    friend bool operator!=(const Surd& x, const Surd& y) { return !(x == y); }
    friend bool operator<(const Surd& x, const Surd& y) { return (x - y).sign() < 0; }

private:
    static long merge(long d1, long d2);

    mpq_class a_;
    mpq_class b_;
    long d_ = 0;
};

// Complex number with real and imaginary parts in a common Q(sqrt d).
class Exact {
public:
    Exact() = default;
    Exact(long n) : re_(n) {}
    Exact(int n) : re_(n) {}
    Exact(const mpq_class& q) : re_(q) {}
    Exact(Surd re) : re_(std::move(re)) {}
    Exact(Surd re, Surd im) : re_(std::move(re)), im_(std::move(im)) {}

    // Exact binary value of a double pair.
    static Exact from_complex(std::complex<double> z);

    const Surd& real() const { return re_; }
    const Surd& imag() const { return im_; }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }
    double abs() const;
    std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }
    Exact conj() const { return Exact(re_, -im_); }
    Exact inverse() const;

    Exact operator-() const { return Exact(-re_, -im_); }
    Exact& operator+=(const Exact& o);
    Exact& operator-=(const Exact& o);
    Exact& operator*=(const Exact& o);
    Exact& operator/=(const Exact& o) { return *this *= o.inverse(); }

    friend Exact operator+(Exact x, const Exact& y) { return x += y; }
    friend Exact operator-(Exact x, const Exact& y) { return x -= y; }
    friend Exact operator*(Exact x, const Exact& y) { return x *= y; }
    friend Exact operator/(Exact x, const Exact& y) { return x /= y; }
    friend bool operator==(const Exact& x, const Exact& y) { return x.re_ == y.re_ && x.im_ == y.im_; }
    friend bool operator!=(const Exact& x, const Exact& y) { return !(x == y); }

private:
    Surd re_;
    Surd im_;
};

}  // namespace echelon
