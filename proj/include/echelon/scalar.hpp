#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "echelon/exact.hpp"

namespace echelon {

using Complex = std::complex<double>;

// Coefficient-mode adapter. Float mode is Complex, exact mode is Exact.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    static double abs(const Complex& z) { return std::abs(z); }
    static bool is_zero(const Complex& z) { return z == Complex{}; }
    static Complex from_int(long n) { return Complex(static_cast<double>(n), 0.0); }
    static Complex from_ratio(long p, long q) { return Complex(static_cast<double>(p) / static_cast<double>(q), 0.0); }
    static Complex from_complex(Complex z) { return z; }
    static Complex from_exact(const Exact& z) { return z.to_complex(); }
    static Complex to_complex(const Complex& z) { return z; }
    static Complex conj(const Complex& z) { return std::conj(z); }
    static Complex inverse(const Complex& z) { return 1.0 / z; }
    static bool is_real(const Complex& z) { return z.imag() == 0.0; }
};

template <>
struct ScalarTraits<Exact> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static double abs(const Exact& z) { return z.abs(); }
    static bool is_zero(const Exact& z) { return z.is_zero(); }
    static Exact from_int(long n) { return Exact(n); }
    static Exact from_ratio(long p, long q) { return Exact(Surd::ratio(p, q)); }
    static Exact from_complex(Complex z) { return Exact::from_complex(z); }
    static Exact from_exact(const Exact& z) { return z; }
    static Complex to_complex(const Exact& z) { return z.to_complex(); }
    static Exact conj(const Exact& z) { return z.conj(); }
    static Exact inverse(const Exact& z) { return z.inverse(); }
    static bool is_real(const Exact& z) { return z.is_real(); }
};

template <class S>
S scalar(long n) {
    return ScalarTraits<S>::from_int(n);
}

template <class S>
S scalar(long p, long q) {
    return ScalarTraits<S>::from_ratio(p, q);
}

}  // namespace echelon
