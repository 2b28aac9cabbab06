#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "echelon/scalar.hpp"

namespace echelon {

template <class S>
using Matrix = std::vector<std::vector<S>>;

namespace detail {

// Row echelon form by Gaussian elimination; returns (rank, determinant sign
// and product) and optionally the inverse. Exact pivots are any nonzero
// entry, float pivots the largest entry above tol.
template <class S>
struct Elimination {
    int rank = 0;
    S det{};
    std::optional<Matrix<S>> inverse;
};

template <class S>
Elimination<S> eliminate(Matrix<S> m, double tol) {
    using T = ScalarTraits<S>;
    const int n = static_cast<int>(m.size());
    Matrix<S> inv(n, std::vector<S>(n, S{}));
    for (int i = 0; i < n; ++i) inv[i][i] = scalar<S>(1);
    Elimination<S> e;
    S det = scalar<S>(1);
    int row = 0;
    for (int col = 0; col < n && row < n; ++col) {
        int piv = -1;
        double best = tol;
        for (int r = row; r < n; ++r) {
            double a = T::abs(m[r][col]);
            if constexpr (T::exact) {
                if (!T::is_zero(m[r][col])) {
                    piv = r;
                    break;
                }
            } else if (a > best) {
                best = a;
                piv = r;
            }
        }
        if (piv < 0) {
            det = S{};
            continue;
        }
        if (piv != row) {
            std::swap(m[piv], m[row]);
            std::swap(inv[piv], inv[row]);
            det = -det;
        }
        S p = m[row][col];
        det *= p;
        S pinv = T::inverse(p);
        for (int c = 0; c < n; ++c) {
            m[row][c] *= pinv;
            inv[row][c] *= pinv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == row || T::is_zero(m[r][col])) continue;
            S f = m[r][col];
            for (int c = 0; c < n; ++c) {
                m[r][c] -= f * m[row][c];
                inv[r][c] -= f * inv[row][c];
            }
        }
        ++row;
    }
    e.rank = row;
    e.det = row == n ? det : S{};
    if (row == n) e.inverse = std::move(inv);
    return e;
}

}  // namespace detail

template <class S>
std::optional<Matrix<S>> invert(const Matrix<S>& m, double tol = 1e-14) {
    return detail::eliminate(m, tol).inverse;
}

template <class S>
S determinant(const Matrix<S>& m, double tol = 1e-14) {
    return detail::eliminate(m, tol).det;
}

template <class S>
int rank(const Matrix<S>& m, double tol = 1e-12) {
    return detail::eliminate(m, tol).rank;
}

}  // namespace echelon
