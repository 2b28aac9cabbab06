#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "echelon/series.hpp"

namespace echelon {

// (lambda, i) = sum_k lambda_k i_k.
template <class S>
S pairing(const std::vector<S>& lambda, const MultiIndex& i, int offset = 0) {
    S acc{};
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        int e = i[offset + static_cast<int>(k)];
        if (e != 0) acc += lambda[k] * scalar<S>(e);
    }
    return acc;
}

// Nonzero lattice points with sigma <= cutoff and first nonzero entry
// positive, ordered by sigma then lexicographically.
std::vector<MultiIndex> half_lattice(int n, int cutoff);
// All nonzero points with sigma <= cutoff, same ordering.
std::vector<MultiIndex> full_lattice(int n, int cutoff);

template <class S>
struct DiophantineCert {
    double C = 0;           // min |(lambda,i)| sigma(i)^tau over the scan
    int tau = 0;
    int cutoff = 0;
    MultiIndex witness;     // index attaining the minimum (or the resonance)
    S divisor{};            // (lambda, witness)
    bool resonant = false;
    // min over the nonresonant indices only; equals C when nothing resonates
    double C_nonresonant = 0;
    MultiIndex nonresonant_witness;
    bool pass = false;      // nonresonant and C >= required_C
    double required_C = 0;
};

namespace detail {

// |v|^2 sigma^(2 tau), compared exactly in exact mode.
inline Surd exact_score(const Exact& v, int sig, int tau) {
    Surd m = v.real() * v.real() + v.imag() * v.imag();
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(sig), static_cast<unsigned long>(2 * tau));
    return m * Surd(mpq_class(p));
}

}  // namespace detail

template <class S>
double default_res_tol(const std::vector<S>& lambda) {
    if constexpr (ScalarTraits<S>::exact) return 0.0;
    double m = 0;
    for (const auto& l : lambda) m = std::max(m, ScalarTraits<S>::abs(l));
    return 1e-12 * m;
}

template <class S>
DiophantineCert<S> min_small_divisor(const std::vector<S>& lambda, int tau, int cutoff, double required_C = 0.0,
                                     double res_tol = -1.0) {
    if (cutoff < 1) throw PreconditionError("min_small_divisor: cutoff >= 1 required");
    if (lambda.empty() || lambda.size() > static_cast<std::size_t>(kMaxSlots))
        throw PreconditionError("min_small_divisor: unsupported dimension");
    if (tau < 0) throw PreconditionError("min_small_divisor: tau >= 0 required");
    bool all_zero = true;
    for (const auto& l : lambda) all_zero = all_zero && ScalarTraits<S>::is_zero(l);
    if (all_zero) throw PreconditionError("frequency vector is zero");
    if (res_tol < 0) res_tol = default_res_tol(lambda);

    DiophantineCert<S> cert;
    cert.tau = tau;
    cert.cutoff = cutoff;
    cert.required_C = required_C;
    const int n = static_cast<int>(lambda.size());
    bool have = false;
    [[maybe_unused]] Surd best_exact;
    double best = 0;
    for (const auto& i : half_lattice(n, cutoff)) {
        S v = pairing(lambda, i);
        int sg = sigma(i);
        bool resonant = ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(v) : ScalarTraits<S>::abs(v) <= res_tol;
        if (resonant) {
            if (!cert.resonant) {
                cert.resonant = true;
                cert.witness = i;
                cert.divisor = v;
            }
            continue;
        }
        bool better = false;
        if constexpr (ScalarTraits<S>::exact) {
            Surd sc = detail::exact_score(v, sg, tau);
            better = !have || sc < best_exact;
            if (better) best_exact = sc;
        } else {
            double sc = ScalarTraits<S>::abs(v) * std::pow(static_cast<double>(sg), tau);
            better = !have || sc < best;
            if (better) best = sc;
        }
        if (better) {
            have = true;
            cert.nonresonant_witness = i;
            if (!cert.resonant) {
                cert.witness = i;
                cert.divisor = v;
            }
        }
    }
    if constexpr (ScalarTraits<S>::exact) {
        if (have) cert.C_nonresonant = std::sqrt(best_exact.to_double());
    } else {
        cert.C_nonresonant = best;
    }
    if (cert.resonant) {
        cert.C = 0;
        cert.pass = false;
        return cert;
    }
    cert.C = cert.C_nonresonant;
    cert.pass = cert.C >= required_C;
    return cert;
}

template <class S>
struct SiegelDivisor {
    MultiIndex j;
    int i = 0;  // component, 0-based
    S value{};
    double magnitude = 0;
    bool resonant = false;
};

// (j, lambda) - lambda_i for 2 <= |j| <= cutoff, j in N^n.
template <class S>
std::vector<SiegelDivisor<S>> siegel_divisors(const std::vector<S>& lambda, int cutoff, double res_tol = -1.0) {
    if (res_tol < 0) res_tol = default_res_tol(lambda);
    const int n = static_cast<int>(lambda.size());
    std::vector<SiegelDivisor<S>> out;
    std::vector<MultiIndex> js;
    MultiIndex cur(n);
    std::function<void(int, int)> rec = [&](int k, int left) {
        if (k == n) {
            if (left == 0) js.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[k] = v;
            rec(k + 1, left - v);
        }
        cur[k] = 0;
    };
    for (int d = 2; d <= cutoff; ++d) rec(0, d);
    for (const auto& j : js) {
        S base = pairing(lambda, j);
        for (int i = 0; i < n; ++i) {
            S v = base - lambda[i];
            double m = ScalarTraits<S>::abs(v);
            bool res = ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(v) : m <= res_tol;
            out.push_back({j, i, v, m, res});
        }
    }
    return out;
}

// Hadamard multiplier g = sum 1/(lambda,i) e_i over 0 < sigma(i) <= cutoff;
// on a torus lattice by default, on N^n when taylor is set.
template <class S>
Series<S> small_divisor_series(const std::vector<S>& lambda, int cutoff, bool taylor = false) {
    const int n = static_cast<int>(lambda.size());
    auto cert = min_small_divisor(lambda, 0, cutoff);
    if (cert.resonant)
        throw ResonanceError("resonant frequency: (lambda," + cert.witness.str() + ") = 0", cert.witness.to_vector());
    Signature sig = taylor ? Signature{0, n} : Signature{n, 0};
    Series<S> g(sig, cutoff);
    for (const auto& i : full_lattice(n, cutoff)) {
        bool ok = true;
        if (taylor)
            for (int k = 0; k < n; ++k) ok = ok && i[k] >= 0;
        if (ok) g.set(i, ScalarTraits<S>::inverse(pairing(lambda, i)));
    }
    return g;
}

// 0 outside the closed convex hull of the lambda_i in C (Poincare domain):
// the Siegel divisors then stay bounded away from zero.
bool in_poincare_domain(const std::vector<Complex>& lambda);

struct MeasureRow {
    double C = 0;
    int passed = 0;
    int samples = 0;
    double fraction = 0;
};

// Monte-Carlo share of lambda uniform in [0,1]^n with min |(lambda,i)|
// sigma(i)^tau >= C for all 0 < sigma(i) <= cutoff.
std::vector<MeasureRow> measure_demo(int tau, const std::vector<double>& C_grid, int samples, std::uint64_t seed,
                                     int cutoff, int n = 2);

}  // namespace echelon
