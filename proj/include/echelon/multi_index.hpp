#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <vector>

#include "echelon/errors.hpp"

namespace echelon {

inline constexpr int kMaxSlots = 8;

// Lattice Z^fourier x N^taylor. Fourier slots come first.
struct Signature {
    int fourier = 0;
    int taylor = 0;

    int slots() const { return fourier + taylor; }
    bool is_fourier(int k) const { return k < fourier; }
    friend bool operator==(const Signature&, const Signature&) = default;
    std::string str() const { return "[" + std::to_string(fourier) + "," + std::to_string(taylor) + "]"; }
};

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(int n) : n_(static_cast<std::uint8_t>(n)) {
        if (n < 0 || n > kMaxSlots) throw PreconditionError("multi-index length out of range");
    }
    MultiIndex(std::initializer_list<int> e) : MultiIndex(static_cast<int>(e.size())) {
        int k = 0;
        for (int v : e) e_[k++] = v;
    }
    static MultiIndex from(const std::vector<int>& e) {
        MultiIndex m(static_cast<int>(e.size()));
        for (std::size_t k = 0; k < e.size(); ++k) m.e_[k] = e[k];
        return m;
    }
    static MultiIndex unit(int n, int k, int v = 1) {
        MultiIndex m(n);
        m.e_[k] = v;
        return m;
    }

    int size() const { return n_; }
    int operator[](int k) const { return e_[k]; }
    int& operator[](int k) { return e_[k]; }
    std::vector<int> to_vector() const { return std::vector<int>(e_.begin(), e_.begin() + n_); }

    bool is_zero() const {
        for (int k = 0; k < n_; ++k)
            if (e_[k] != 0) return false;
        return true;
    }

    MultiIndex operator-() const {
        MultiIndex m(*this);
        for (int k = 0; k < n_; ++k) m.e_[k] = -m.e_[k];
        return m;
    }
    friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
        for (int k = 0; k < a.n_; ++k) a.e_[k] += b.e_[k];
        return a;
    }
    friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) {
        for (int k = 0; k < a.n_; ++k) a.e_[k] -= b.e_[k];
        return a;
    }
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

    std::size_t hash() const {
        std::uint64_t h = 1469598103934665603ull ^ n_;
        for (int k = 0; k < n_; ++k) h = (h ^ static_cast<std::uint32_t>(e_[k])) * 1099511628211ull;
        return static_cast<std::size_t>(h);
    }

    std::string str() const {
        std::string s = "(";
        for (int k = 0; k < n_; ++k) s += (k ? "," : "") + std::to_string(e_[k]);
        return s + ")";
    }

private:
    std::uint8_t n_ = 0;
    std::array<int, kMaxSlots> e_{};
};

// sigma(i) = sum |i_k| over the given slot range.
inline int sigma(const MultiIndex& i, int begin = 0, int end = -1) {
    if (end < 0) end = i.size();
    int s = 0;
    for (int k = begin; k < end; ++k) s += std::abs(i[k]);
    return s;
}

// Fourier sigma plus Taylor degree.
inline int total_degree(const MultiIndex& i) { return sigma(i); }

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const { return m.hash(); }
};

}  // namespace echelon
