#pragma once

// Reference computations written without the library's series arithmetic:
// dense coefficient arrays and plain loops.

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "echelon/series.hpp"

namespace oracle {

using echelon::Complex;

// Dense polynomial in n variables truncated at total degree D, keyed by
// exponent vector.
template <class S>
using Poly = std::map<std::vector<int>, S>;

template <class S>
Poly<S> mul(const Poly<S>& a, const Poly<S>& b, int D) {
    Poly<S> r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            int d = 0;
            for (std::size_t k = 0; k < e.size(); ++k) d += (e[k] = ea[k] + eb[k]);
            if (d > D) continue;
            r[e] += ca * cb;
        }
    return r;
}

template <class S>
int degree(const std::vector<int>& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

// v_i(h) for polynomial v given as per-component maps, h a list of polys.
template <class S>
Poly<S> compose(const Poly<S>& vi, const std::vector<Poly<S>>& h, int D) {
    const std::size_t n = h.size();
    Poly<S> out;
    for (const auto& [e, c] : vi) {
        Poly<S> term;
        term[std::vector<int>(n, 0)] = c;
        for (std::size_t k = 0; k < n; ++k)
            for (int p = 0; p < e[k]; ++p) term = mul(term, h[k], D);
        for (const auto& [f, x] : term) out[f] += x;
    }
    return out;
}

// Conjugacy h = w + O(w^2) with v(h(w)) = Dh(w) Lambda w, solved degree by
// degree: ((j,lambda) - lambda_i) h_{i,j} = [N_i(h)]_j, N the nonlinear part.
template <class S>
std::vector<Poly<S>> siegel_conjugacy(const std::vector<Poly<S>>& v, const std::vector<S>& lambda, int D) {
    const std::size_t n = lambda.size();
    std::vector<Poly<S>> h(n), N(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> e(n, 0);
        e[i] = 1;
        h[i][e] = S(1);
        for (const auto& [f, c] : v[i])
            if (degree<S>(f) >= 2) N[i][f] = c;
    }
    for (int d = 2; d <= D; ++d) {
        std::vector<Poly<S>> next = h;
        for (std::size_t i = 0; i < n; ++i) {
            Poly<S> rhs = compose(N[i], h, d);
            for (const auto& [e, c] : rhs) {
                if (degree<S>(e) != d) continue;
                S div = -lambda[i];
                for (std::size_t k = 0; k < n; ++k) div += lambda[k] * S(e[k]);
                next[i][e] = c / div;
            }
        }
        h = next;
    }
    return h;
}

// Taylor coefficients of x sqrt(1+x) up to degree D (index = degree).
inline std::vector<mpq_class> x_sqrt_one_plus_x(int D) {
    std::vector<mpq_class> c(D + 1, 0);
    mpq_class b = 1;  // binomial(1/2, k)
    for (int k = 0; k + 1 <= D; ++k) {
        c[k + 1] = b;
        b = b * (mpq_class(1, 2) - k) / (k + 1);
    }
    return c;
}

// min over 0 < |i1|+|i2| <= K, i in the half lattice, of |i1 + i2 phi| (|i1|+|i2|)^tau,
// with the minimizing pair, by exhaustive search in long double.
struct PairMin {
    long double value;
    int i1, i2;
};

inline PairMin brute_min_2d(long double l1, long double l2, int tau, int K) {
    PairMin best{INFINITY, 0, 0};
    for (int a = -K; a <= K; ++a)
        for (int b = -K; b <= K; ++b) {
            int s = std::abs(a) + std::abs(b);
            if (s == 0 || s > K) continue;
            if (a < 0 || (a == 0 && b < 0)) continue;
            long double v = std::fabs(a * l1 + b * l2) * std::pow(static_cast<long double>(s), tau);
            if (v < best.value) best = {v, a, b};
        }
    return best;
}

// Fibonacci pairs (F_{k+1}, -F_k), k >= 0: the best approximations of the
// golden mean have |F_{k+1} - F_k phi| = phi^-k.
inline std::vector<std::pair<long, long>> fibonacci_pairs(int K) {
    std::vector<std::pair<long, long>> out;
    long a = 0, b = 1;
    while (a + b <= K) {
        out.emplace_back(b, -a);
        long c = a + b;
        a = b;
        b = c;
    }
    return out;
}

// sup over sigma in (0, tau) of sigma^k ((tau - sigma)/tau)^D e^{-m sigma} by a dense grid.
inline double weight_ratio_grid(int k, double D, double m, double tau, int samples = 200000) {
    double best = 0;
    for (int i = 1; i < samples; ++i) {
        double sg = tau * i / samples;
        best = std::max(best, std::pow(sg, k) * std::pow((tau - sg) / tau, D) * std::exp(-m * sg));
    }
    return best;
}

}  // namespace oracle
