#pragma once

#include <algorithm>
#include <climits>
#include <vector>

#include "echelon/scale.hpp"
#include "echelon/series.hpp"

namespace echelon {

// First-order operator sum_k c_k X_k on a series lattice, where X_k is d/dz_k
// on a Taylor slot and the angular derivation z_k d/dz_k on a Fourier slot.
// The frame {X_k} is commuting, so brackets are computed componentwise.
// Also serves as a vector-field jet (the c_k are its components).
template <class S>
class Derivation {
public:
    Derivation() = default;
    explicit Derivation(const Series<S>& proto) : c_(proto.signature().slots(), proto.zero_like()) {}
    explicit Derivation(std::vector<Series<S>> comps) : c_(std::move(comps)) {
        if (c_.empty()) throw PreconditionError("derivation needs at least one slot");
        if (static_cast<int>(c_.size()) != c_[0].signature().slots())
            throw SignatureMismatch("derivation component count does not match signature");
        for (const auto& c : c_) c_[0].check_compatible(c);
    }

    int slots() const { return static_cast<int>(c_.size()); }
    const Signature& signature() const { return c_.at(0).signature(); }
    const Truncation& truncation() const { return c_.at(0).truncation(); }
    const Series<S>& operator[](int k) const { return c_[k]; }
    Series<S>& component(int k) { return c_[k]; }
    const std::vector<Series<S>>& components() const { return c_; }
    Series<S> zero_series() const { return c_.at(0).zero_like(); }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const Series<S>& c) { return c.is_zero(); });
    }

    Series<S> apply(const Series<S>& f) const {
        Series<S> r = f.zero_like();
        for (int k = 0; k < slots(); ++k)
            if (!c_[k].is_zero()) r += c_[k] * derive(f, k);
        return r;
    }

    Derivation operator-() const {
        Derivation r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }
    Derivation& operator+=(const Derivation& o) {
        check(o);
        for (int k = 0; k < slots(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Derivation& operator-=(const Derivation& o) {
        check(o);
        for (int k = 0; k < slots(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Derivation& operator*=(const S& s) {
        for (auto& c : c_) c *= s;
        return *this;
    }
    friend Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
    friend Derivation operator-(Derivation a, const Derivation& b) { return a -= b; }
    friend Derivation operator*(Derivation a, const S& s) { return a *= s; }
    friend Derivation operator*(const S& s, Derivation a) { return a *= s; }
    friend bool operator==(const Derivation& a, const Derivation& b) { return a.c_ == b.c_; }

private:
    void check(const Derivation& o) const {
        if (o.slots() != slots()) throw SignatureMismatch("derivation slot count mismatch");
    }

    std::vector<Series<S>> c_;
};

// [u, v] = u v - v u.
template <class S>
Derivation<S> bracket(const Derivation<S>& u, const Derivation<S>& v) {
    std::vector<Series<S>> r;
    r.reserve(u.slots());
    for (int k = 0; k < u.slots(); ++k) r.push_back(u.apply(v[k]) - v.apply(u[k]));
    return Derivation<S>(std::move(r));
}

// Minimal total order of the components (vector-field order; z^2 d/dz has 2).
template <class S>
int filtration_order(const Derivation<S>& u, double tol = kDefaultZeroTol) {
    int best = kInfiniteOrder;
    for (const auto& c : u.components()) best = std::min(best, filtration_order(c, tol));
    return best;
}

template <class S>
int slot_order(const Derivation<S>& u, const std::vector<int>& slots, double tol = kDefaultZeroTol) {
    int best = kInfiniteOrder;
    for (const auto& c : u.components()) best = std::min(best, slot_order(c, slots, tol));
    return best;
}

// Vector-field norm sum_k |c_k|_s.
template <class S>
double norm_at(const Derivation<S>& u, const ScaleFamily& scale, double s) {
    double acc = 0;
    for (const auto& c : u.components()) acc += norm_at(c, scale, s);
    return acc;
}

template <class S>
double relative_distance(const Derivation<S>& u, const Derivation<S>& v) {
    double d = 0;
    for (int k = 0; k < u.slots(); ++k) d = std::max(d, relative_distance(u[k], v[k]));
    return d;
}

// Guaranteed increase of the truncation weight under one application of u
// (INT_MIN when it cannot be bounded, kInfiniteOrder for u = 0).
template <class S>
int weight_raise(const Derivation<S>& u) {
    const auto& t = u.truncation();
    if (!t.additive(u.signature())) return INT_MIN;
    int r = kInfiniteOrder;
    for (int k = 0; k < u.slots(); ++k) {
        if (u[k].is_zero()) continue;
        int o = weighted_order(u[k], [&](const MultiIndex& a) { return t.weight(a); }, 0.0);
        int loss = u.signature().is_fourier(k) ? 0 : t.weights[k];
        r = std::min(r, o - loss);
    }
    return r;
}

// Guaranteed increase of the degree in `slot` under one application of u.
template <class S>
int slot_raise(const Derivation<S>& u, int slot) {
    if (u.signature().is_fourier(slot)) return INT_MIN;
    int r = kInfiniteOrder;
    for (int k = 0; k < u.slots(); ++k) {
        if (u[k].is_zero()) continue;
        int o = slot_order(u[k], {slot}, 0.0);
        r = std::min(r, o - (k == slot ? 1 : 0));
    }
    return r;
}

// Number J such that u^J vanishes on every jet of this truncation, or -1 if
// no capped grading is strictly raised.
template <class S>
int nilpotency_bound(const Derivation<S>& u) {
    if (u.is_zero()) return 1;
    const auto& t = u.truncation();
    int best = -1;
    int rw = weight_raise(u);
    if (rw >= 1) best = t.cap / rw + 1;
    for (std::size_t k = 0; k < t.slot_caps.size(); ++k) {
        if (t.slot_caps[k] < 0) continue;
        int rs = slot_raise(u, static_cast<int>(k));
        if (rs >= 1) {
            int j = t.slot_caps[k] / rs + 1;
            best = best < 0 ? j : std::min(best, j);
        }
    }
    return best;
}

}  // namespace echelon
