#pragma once

#include <string>
#include <vector>

#include "echelon/kam.hpp"
#include "echelon/normal_form.hpp"
#include "json.hpp"

namespace echelon {

// Worked examples. Each builder works in both coefficient modes.

template <class S>
S golden() {
    if constexpr (ScalarTraits<S>::exact) return Exact(Surd::parse("1/2+1/2*sqrt(5)"));
    else return Complex((1.0 + std::sqrt(5.0)) / 2.0, 0.0);
}

template <class S>
S root_two() {
    if constexpr (ScalarTraits<S>::exact) return Exact(Surd::sqrt_of(2));
    else return Complex(std::sqrt(2.0), 0.0);
}

// x^2 + x^3
template <class S>
Series<S> morse_cubic_1d(int cap) {
    Series<S> f(Signature{0, 1}, cap);
    f.set({2}, scalar<S>(1));
    f.set({3}, scalar<S>(1));
    return f;
}

// x^2 + y^2 + x^3
template <class S>
Series<S> morse_cubic_2d(int cap) {
    Series<S> f(Signature{0, 2}, cap);
    f.set({2, 0}, scalar<S>(1));
    f.set({0, 2}, scalar<S>(1));
    f.set({3, 0}, scalar<S>(1));
    return f;
}

// z d/dz + z^2 d/dz
template <class S>
Derivation<S> siegel_field_1d(int cap) {
    Series<S> c(Signature{0, 1}, cap);
    c.set({1}, scalar<S>(1));
    c.set({2}, scalar<S>(1));
    return Derivation<S>(std::vector<Series<S>>{c});
}

// z1 d/dz1 + phi z2 d/dz2 + z1 z2 d/dz1, phi the golden mean.
template <class S>
Derivation<S> siegel_field_2d(int cap) {
    Series<S> c1(Signature{0, 2}, cap), c2(Signature{0, 2}, cap);
    c1.set({1, 0}, scalar<S>(1));
    c1.set({1, 1}, scalar<S>(1));
    c2.set({0, 1}, golden<S>());
    return Derivation<S>(std::vector<Series<S>>{c1, c2});
}

// xi_1 + phi xi_2 + t (2 cos th1 + cos(th1+th2) xi_1 + (2/3) cos th2 xi_2),
// optionally with the twist (xi_1^2 + xi_2^2)/2 + (1/2) cos th1 xi_1^2.
template <class S>
Series<S> kam_golden_hamiltonian(int t_order, bool twist) {
    const int n = 2;
    Series<S> H(kam_signature(n), kam_truncation(n, t_order));
    H.set({0, 0, 1, 0, 0}, scalar<S>(1));
    H.set({0, 0, 0, 1, 0}, golden<S>());
    if (twist) {
        H.set({0, 0, 2, 0, 0}, scalar<S>(1, 2));
        H.set({0, 0, 0, 2, 0}, scalar<S>(1, 2));
        H.set({1, 0, 2, 0, 0}, scalar<S>(1, 4));
        H.set({-1, 0, 2, 0, 0}, scalar<S>(1, 4));
    }
    H.set({1, 0, 0, 0, 1}, scalar<S>(1));
    H.set({-1, 0, 0, 0, 1}, scalar<S>(1));
    H.set({1, 1, 1, 0, 1}, scalar<S>(1, 2));
    H.set({-1, -1, 1, 0, 1}, scalar<S>(1, 2));
    H.set({0, 1, 0, 1, 1}, scalar<S>(1, 3));
    H.set({0, -1, 0, 1, 1}, scalar<S>(1, 3));
    return H;
}

// q1 p1 + sqrt2 q2 p2 + q1^3 + q1 q2 p2 / 2 + p1^2 p2 / 3 on slots (q1,q2,p1,p2).
template <class S>
Series<S> singular_hamiltonian(int cap) {
    Series<S> H(Signature{0, 4}, cap);
    H.set({1, 0, 1, 0}, scalar<S>(1));
    H.set({0, 1, 0, 1}, root_two<S>());
    H.set({3, 0, 0, 0}, scalar<S>(1));
    H.set({1, 1, 0, 1}, scalar<S>(1, 2));
    H.set({0, 0, 2, 1}, scalar<S>(1, 3));
    return H;
}

struct DemoRun {
    std::string name;
    std::string mode;  // "exact" or "float"
    IterationTrace trace;
    nlohmann::json summary;
};

// Product of exponentials of u_n = c_n z^2 d/dz on a one-variable jet,
// with N^1_s(u_n)/s = 4^-(n+2) (geometric) or amp/(n+1) (harmonic).
struct ProductDemo {
    std::string sequence;
    double s = 0.5, lambda = 0.5, mu = 0.5;
    ConvergenceCert cert;
    std::vector<double> N_s;        // N^1_s(u_n)
    std::vector<double> N_ls;       // N^1_{lambda s}(u_n)
    double K = 0;                   // sup_n 3 C_lambda / (1 - mu - 3 N_ls/(lambda s))
    std::vector<double> increments; // |g_n - g_{n-1}| in L(E_s, E_{lambda mu s}), n >= 1
    double worst_cauchy_ratio = 0;  // max over n < m of |g_m - g_n| / telescoping bound
    bool increments_decreasing = false;
    double identity_defect = 0;     // max |g_n h_n x - x| over basis monomials
};

ProductDemo product_demo(bool harmonic, int count = 12, double amp = 0.2, int cap = 12);
nlohmann::json product_demo_json(const ProductDemo& d);

std::vector<std::string> demo_names();
DemoRun run_demo(const std::string& name);
std::vector<DemoRun> run_demo_suite();

}  // namespace echelon
