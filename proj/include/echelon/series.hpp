#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/multi_index.hpp"
#include "echelon/scalar.hpp"

namespace echelon {

inline constexpr int kInfiniteOrder = std::numeric_limits<int>::max();
inline constexpr double kDefaultZeroTol = 1e-13;

// Jet truncation: keep index a iff sum_k weights[k]*|a_k| <= cap and every
// per-slot cap holds. Unit weights give the total-degree cap.
struct Truncation {
    std::vector<int> weights;
    int cap = 0;
    std::vector<int> slot_caps;  // -1 = no cap on that slot; empty = none

    static Truncation total(const Signature& sig, int cap) {
        return Truncation{std::vector<int>(sig.slots(), 1), cap, {}};
    }

    int weight(const MultiIndex& a) const {
        int w = 0;
        for (int k = 0; k < a.size(); ++k) w += weights[k] * std::abs(a[k]);
        return w;
    }

    bool keeps(const MultiIndex& a) const {
        if (weight(a) > cap) return false;
        for (std::size_t k = 0; k < slot_caps.size(); ++k)
            if (slot_caps[k] >= 0 && std::abs(a[static_cast<int>(k)]) > slot_caps[k]) return false;
        return true;
    }

    // Weight is additive under index addition iff no Fourier slot carries
    // weight (Fourier indices can cancel).
    bool additive(const Signature& sig) const {
        for (int k = 0; k < sig.fourier; ++k)
            if (weights[k] != 0) return false;
        return true;
    }

    friend bool operator==(const Truncation&, const Truncation&) = default;
};

template <class S>
class Series {
public:
    using Scalar = S;
    using Map = std::map<MultiIndex, S>;
    using Traits = ScalarTraits<S>;

    Series() = default;
    Series(Signature sig, int cap) : sig_(sig), trunc_(Truncation::total(sig, cap)) { validate_signature(); }
    Series(Signature sig, Truncation t) : sig_(sig), trunc_(std::move(t)) {
        validate_signature();
        if (static_cast<int>(trunc_.weights.size()) != sig_.slots())
            throw PreconditionError("truncation weights do not match signature");
    }

    static Series constant(Signature sig, Truncation t, const S& c) {
        Series f(sig, std::move(t));
        f.set(MultiIndex(sig.slots()), c);
        return f;
    }
    static Series monomial(Signature sig, Truncation t, const MultiIndex& a, const S& c) {
        Series f(sig, std::move(t));
        f.set(a, c);
        return f;
    }
    // Same signature and truncation, no terms.
    Series zero_like() const { return Series(sig_, trunc_); }
    Series constant_like(const S& c) const { return constant(sig_, trunc_, c); }
    Series monomial_like(const MultiIndex& a, const S& c) const { return monomial(sig_, trunc_, a, c); }

    const Signature& signature() const { return sig_; }
    const Truncation& truncation() const { return trunc_; }
    int cap() const { return trunc_.cap; }
    const Map& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    bool is_zero() const { return c_.empty(); }

    S coeff(const MultiIndex& a) const {
        auto it = c_.find(a);
        return it == c_.end() ? S{} : it->second;
    }

    // Store a coefficient; indices outside the jet are dropped silently,
    // zero values erase.
    void set(const MultiIndex& a, const S& v) {
        check_index(a);
        if (!trunc_.keeps(a)) return;
        if (Traits::is_zero(v)) {
            c_.erase(a);
            return;
        }
        c_[a] = v;
    }

    void add_to(const MultiIndex& a, const S& v) {
        check_index(a);
        if (!trunc_.keeps(a) || Traits::is_zero(v)) return;
        auto [it, inserted] = c_.try_emplace(a, v);
        if (!inserted) {
            it->second += v;
            if (Traits::is_zero(it->second)) c_.erase(it);
        }
    }

    Series operator-() const {
        Series r(*this);
        for (auto& [a, v] : r.c_) v = -v;
        return r;
    }

    Series& operator+=(const Series& g) {
        check_compatible(g);
        for (const auto& [a, v] : g.c_) accumulate(a, v);
        prune();
        return *this;
    }
    Series& operator-=(const Series& g) {
        check_compatible(g);
        for (const auto& [a, v] : g.c_) accumulate(a, -v);
        prune();
        return *this;
    }
    Series& operator*=(const S& k) {
        if (Traits::is_zero(k)) {
            c_.clear();
            return *this;
        }
        for (auto& [a, v] : c_) v *= k;
        prune();
        return *this;
    }

    friend Series operator+(Series f, const Series& g) { return f += g; }
    friend Series operator-(Series f, const Series& g) { return f -= g; }
    friend Series operator*(Series f, const S& k) { return f *= k; }
    friend Series operator*(const S& k, Series f) { return f *= k; }

    friend Series operator*(const Series& f, const Series& g) {
        f.check_compatible(g);
        Series r(f.sig_, f.trunc_);
        if (f.c_.empty() || g.c_.empty()) return r;
        const bool additive = f.trunc_.additive(f.sig_);
        std::vector<std::pair<int, const typename Map::value_type*>> gs;
        gs.reserve(g.c_.size());
        for (const auto& e : g.c_) gs.emplace_back(f.trunc_.weight(e.first), &e);
        std::stable_sort(gs.begin(), gs.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        std::unordered_map<MultiIndex, S, MultiIndexHash> acc;
        acc.reserve(std::min<std::size_t>(f.c_.size() * g.c_.size(), 1u << 20));
        for (const auto& [i, a] : f.c_) {
            int wi = f.trunc_.weight(i);
            for (const auto& [wj, pj] : gs) {
                if (additive && wi + wj > f.trunc_.cap) break;
                MultiIndex k = i + pj->first;
                if (!f.trunc_.keeps(k)) continue;
                auto [it, inserted] = acc.try_emplace(k, a * pj->second);
                if (!inserted) it->second += a * pj->second;
            }
        }
        std::vector<std::pair<MultiIndex, S>> sorted;
        sorted.reserve(acc.size());
        for (auto& e : acc)
            if (!Traits::is_zero(e.second)) sorted.emplace_back(e.first, std::move(e.second));
        std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        r.c_ = Map(std::make_move_iterator(sorted.begin()), std::make_move_iterator(sorted.end()));
        return r;
    }

    friend bool operator==(const Series& f, const Series& g) {
        return f.sig_ == g.sig_ && f.trunc_ == g.trunc_ && f.c_ == g.c_;
    }
    friend bool operator!=(const Series& f, const Series& g) { return !(f == g); }

    // Coefficientwise transform; the callback may return zero to drop.
    template <class F>
    Series map(F&& fn) const {
        Series r(sig_, trunc_);
        for (const auto& [a, v] : c_) r.set(a, fn(a, v));
        return r;
    }

    template <class P>
    Series filter(P&& keep) const {
        Series r(sig_, trunc_);
        for (const auto& [a, v] : c_)
            if (keep(a)) r.c_.emplace_hint(r.c_.end(), a, v);
        return r;
    }

    Series with_truncation(Truncation t) const {
        Series r(sig_, std::move(t));
        for (const auto& [a, v] : c_) r.set(a, v);
        return r;
    }

    void check_compatible(const Series& g) const {
        if (!(sig_ == g.sig_))
            throw SignatureMismatch("signature mismatch " + sig_.str() + " vs " + g.sig_.str());
        if (!(trunc_ == g.trunc_)) throw SignatureMismatch("truncation mismatch");
    }

private:
    void validate_signature() const {
        if (sig_.fourier < 0 || sig_.taylor < 0 || sig_.slots() > kMaxSlots)
            throw PreconditionError("unsupported lattice signature " + sig_.str());
    }
    void check_index(const MultiIndex& a) const {
        if (a.size() != sig_.slots()) throw SignatureMismatch("index " + a.str() + " does not fit " + sig_.str());
        for (int k = sig_.fourier; k < sig_.slots(); ++k)
            if (a[k] < 0) throw PreconditionError("negative Taylor exponent in " + a.str());
    }
    void accumulate(const MultiIndex& a, const S& v) {
        auto [it, inserted] = c_.try_emplace(a, v);
        if (!inserted) it->second += v;
    }
    void prune() { std::erase_if(c_, [](const auto& e) { return Traits::is_zero(e.second); }); }

    Signature sig_{};
    Truncation trunc_{};
    Map c_;
};

// Partial derivative on a Taylor slot; on a Fourier slot the angular
// derivation z_k d/dz_k, which multiplies e_i by i_k.
template <class S>
Series<S> derive(const Series<S>& f, int slot) {
    const auto& sig = f.signature();
    if (slot < 0 || slot >= sig.slots()) throw PreconditionError("derivation slot out of range");
    Series<S> r = f.zero_like();
    for (const auto& [a, v] : f.coeffs()) {
        int e = a[slot];
        if (e == 0) continue;
        MultiIndex b = a;
        if (!sig.is_fourier(slot)) b[slot] = e - 1;
        r.set(b, v * scalar<S>(e));
    }
    return r;
}

template <class S>
double max_abs(const Series<S>& f) {
    double m = 0;
    for (const auto& [a, v] : f.coeffs()) m = std::max(m, ScalarTraits<S>::abs(v));
    return m;
}

// Indices that count as nonzero: all stored ones in exact mode, those above
// tol * max|coeff| in float mode.
template <class S, class W>
int weighted_order(const Series<S>& f, W&& weight, double tol = kDefaultZeroTol) {
    double thresh = ScalarTraits<S>::exact ? 0.0 : tol * max_abs(f);
    int best = kInfiniteOrder;
    for (const auto& [a, v] : f.coeffs()) {
        if (!ScalarTraits<S>::exact && ScalarTraits<S>::abs(v) <= thresh) continue;
        best = std::min(best, static_cast<int>(weight(a)));
    }
    return best;
}

// Minimal total degree (Taylor degree plus Fourier sigma).
template <class S>
int filtration_order(const Series<S>& f, double tol = kDefaultZeroTol) {
    return weighted_order(f, [](const MultiIndex& a) { return total_degree(a); }, tol);
}

// Minimal degree in the given slots only.
template <class S>
int slot_order(const Series<S>& f, const std::vector<int>& slots, double tol = kDefaultZeroTol) {
    return weighted_order(
        f,
        [&](const MultiIndex& a) {
            int d = 0;
            for (int k : slots) d += std::abs(a[k]);
            return d;
        },
        tol);
}

template <class S>
Series<S> hadamard(const Series<S>& f, const Series<S>& g) {
    if (!(f.signature() == g.signature()))
        throw SignatureMismatch("hadamard: signature mismatch " + f.signature().str() + " vs " +
                                g.signature().str());
    Series<S> r = f.zero_like();
    for (const auto& [a, v] : f.coeffs()) {
        auto it = g.coeffs().find(a);
        if (it != g.coeffs().end()) r.set(a, v * it->second);
    }
    return r;
}

// max |f_a - g_a| relative to max(1, max|f|, max|g|).
template <class S>
double relative_distance(const Series<S>& f, const Series<S>& g) {
    double scale = std::max({1.0, max_abs(f), max_abs(g)});
    double d = 0;
    for (const auto& [a, v] : f.coeffs()) d = std::max(d, ScalarTraits<S>::abs(v - g.coeff(a)));
    for (const auto& [a, v] : g.coeffs())
        if (!f.coeffs().count(a)) d = std::max(d, ScalarTraits<S>::abs(v));
    return d / scale;
}

// Convert between coefficient modes (exact to float is lossy).
template <class T, class S>
Series<T> convert(const Series<S>& f) {
    Series<T> r(f.signature(), f.truncation());
    for (const auto& [a, v] : f.coeffs()) {
        if constexpr (std::is_same_v<S, Exact>) r.set(a, ScalarTraits<T>::from_exact(v));
        else r.set(a, ScalarTraits<T>::from_complex(ScalarTraits<S>::to_complex(v)));
    }
    return r;
}

// Reality symmetry: coefficient at (-i, beta) equals the conjugate of the one
// at (i, beta), where i runs over Fourier slots.
template <class S>
bool is_real_symmetric(const Series<S>& f, double tol = 0.0) {
    const int m = f.signature().fourier;
    for (const auto& [a, v] : f.coeffs()) {
        MultiIndex b = a;
        for (int k = 0; k < m; ++k) b[k] = -b[k];
        S w = ScalarTraits<S>::conj(f.coeff(b));
        if constexpr (ScalarTraits<S>::exact) {
            if (!(w == v)) return false;
        } else {
            if (std::abs(w - v) > tol * std::max(1.0, std::abs(v))) return false;
        }
    }
    return true;
}

}  // namespace echelon
