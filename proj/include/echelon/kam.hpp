#pragma once

#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "echelon/iteration.hpp"
#include "echelon/linalg.hpp"
#include "echelon/normal_form.hpp"
#include "echelon/small_divisors.hpp"

namespace echelon {

// Torus Hamiltonians live on n Fourier slots z_j = e^{i theta_j} (angles),
// n Taylor slots xi_j (actions) and optionally one Taylor slot t.
//
// Bracket convention, fixed here once:
//   {f, h} = sum_j D_j f d_{xi_j} h - d_{xi_j} f D_j h,   D_j = z_j d/dz_j,
// i.e. theta-derivatives are replaced by D_j = -i d/dtheta_j. With it
// {e_k, lambda.xi} = (k, lambda) e_k and real Hamiltonians
// (conj c_{-k} = c_k) have anti-real brackets.

struct KamLayout {
    int n = 0;
    bool has_t = false;
    int angle(int j) const { return j; }
    int action(int j) const { return n + j; }
    int t() const { return 2 * n; }

    static KamLayout of(const Signature& sig) {
        if (sig.fourier < 1 || (sig.taylor != sig.fourier && sig.taylor != sig.fourier + 1))
            throw SignatureMismatch("torus Hamiltonian needs n angles, n actions and at most one t slot, got " +
                                    sig.str());
        return {sig.fourier, sig.taylor == sig.fourier + 1};
    }
    int xi_degree(const MultiIndex& a) const {
        int d = 0;
        for (int j = 0; j < n; ++j) d += a[action(j)];
        return d;
    }
    bool zero_mode(const MultiIndex& a) const {
        for (int j = 0; j < n; ++j)
            if (a[angle(j)] != 0) return false;
        return true;
    }
    int t_degree(const MultiIndex& a) const { return has_t ? a[t()] : 0; }
    MultiIndex mode(const MultiIndex& a) const {
        MultiIndex k(n);
        for (int j = 0; j < n; ++j) k[j] = a[angle(j)];
        return k;
    }
};

// Largest t-degree the jet can hold.
template <class S>
int t_cap(const Series<S>& f, const KamLayout& L) {
    if (!L.has_t) return 0;
    const auto& tr = f.truncation();
    int c = tr.cap / std::max(tr.weights[L.t()], 1);
    if (static_cast<int>(tr.slot_caps.size()) > L.t() && tr.slot_caps[L.t()] >= 0) c = std::min(c, tr.slot_caps[L.t()]);
    return c;
}

inline Signature kam_signature(int n) { return Signature{n, n + 1}; }

// Angles weightless, xi and t weight 1, total cap T+1, t-degree <= T.
// Brackets with t-divisible generators never lower the weight, so the jet
// is closed under the iteration.
inline Truncation kam_truncation(int n, int t_order) {
    Truncation tr;
    tr.weights.assign(2 * n + 1, 1);
    for (int j = 0; j < n; ++j) tr.weights[j] = 0;
    tr.cap = t_order + 1;
    tr.slot_caps.assign(2 * n + 1, -1);
    tr.slot_caps[2 * n] = t_order;
    return tr;
}

inline ScaleFamily kam_scale(int n, double S = 1.0) { return ScaleFamily::mixed(S, {2 * n}); }

template <class S>
Series<S> poisson_bracket(const Series<S>& f, const Series<S>& h) {
    f.check_compatible(h);
    const auto L = KamLayout::of(f.signature());
    Series<S> r = f.zero_like();
    for (int j = 0; j < L.n; ++j) {
        Series<S> Df = derive(f, L.angle(j)), Dh = derive(h, L.angle(j));
        Series<S> fx = derive(f, L.action(j)), hx = derive(h, L.action(j));
        if (!Df.is_zero() && !hx.is_zero()) r += Df * hx;
        if (!fx.is_zero() && !Dh.is_zero()) r -= fx * Dh;
    }
    return r;
}

// X_h with X_h(g) = {h, g}, as a derivation in the (D_j, d_{xi_j}, d_t) frame.
template <class S>
Derivation<S> hamiltonian_field(const Series<S>& h) {
    const auto L = KamLayout::of(h.signature());
    Derivation<S> u(h);
    for (int j = 0; j < L.n; ++j) {
        u.component(L.angle(j)) = -derive(h, L.action(j));
        u.component(L.action(j)) = derive(h, L.angle(j));
    }
    return u;
}

template <class S>
Series<S> average(const Series<S>& H) {
    const auto L = KamLayout::of(H.signature());
    return H.filter([&](const MultiIndex& a) { return L.zero_mode(a); });
}

// H mod t.
template <class S>
Series<S> t_quotient(const Series<S>& H) {
    const auto L = KamLayout::of(H.signature());
    if (!L.has_t) return H;
    return H.filter([&](const MultiIndex& a) { return a[L.t()] == 0; });
}

template <class S>
Series<S> t_multiply(const Series<S>& H) {
    const auto L = KamLayout::of(H.signature());
    if (!L.has_t) throw PreconditionError("series has no t slot");
    return H * H.monomial_like(MultiIndex::unit(H.signature().slots(), L.t(), 1), scalar<S>(1));
}

// Largest |t f|_s / |f|_s over the probes; the deformation axiom asks <= s^2.
template <class S>
double deformation_ratio(const std::vector<Series<S>>& probes, const ScaleFamily& scale, double s) {
    double best = 0;
    for (const auto& f : probes) {
        double d = norm_at(f, scale, s);
        if (d > 0) best = std::max(best, norm_at(t_multiply(f), scale, s) / d);
    }
    return best;
}

template <class S>
struct IsochronicReport {
    std::vector<S> lambda;
    Matrix<S> a;  // a_ij with H0 = lambda.xi + sum_ij a_ij xi_i xi_j
    S det{};
    bool degenerate = false;
    int fiber_dimension = 0;  // kernel dimension of the frequency map at xi = 0
};

// Uses the t^0 average of H.
template <class S>
IsochronicReport<S> isochronic_check(const Series<S>& H, double tol = 1e-12) {
    const auto L = KamLayout::of(H.signature());
    const Series<S> H0 = t_quotient(average(H));
    const int slots = H.signature().slots();
    IsochronicReport<S> r;
    r.lambda.assign(L.n, S{});
    r.a.assign(L.n, std::vector<S>(L.n, S{}));
    for (int i = 0; i < L.n; ++i) {
        r.lambda[i] = H0.coeff(MultiIndex::unit(slots, L.action(i), 1));
        for (int j = i; j < L.n; ++j) {
            MultiIndex m = MultiIndex::unit(slots, L.action(i), 1) + MultiIndex::unit(slots, L.action(j), 1);
            S c = H0.coeff(m);
            if (i == j) {
                r.a[i][i] = c;
            } else {
                S half = c * scalar<S>(1, 2);
                r.a[i][j] = half;
                r.a[j][i] = half;
            }
        }
    }
    r.det = determinant(r.a, tol);
    r.degenerate = ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(r.det) : ScalarTraits<S>::abs(r.det) <= tol;
    r.fiber_dimension = L.n - rank(r.a, tol);
    return r;
}

namespace detail {

// 1/d(t) as a t-series of length T+1.
template <class S>
std::vector<S> invert_t_series(const std::vector<S>& d) {
    std::vector<S> g(d.size());
    S g0 = ScalarTraits<S>::inverse(d[0]);
    g[0] = g0;
    for (std::size_t p = 1; p < d.size(); ++p) {
        S acc{};
        for (std::size_t q = 1; q <= p; ++q)
            if (!ScalarTraits<S>::is_zero(d[q])) acc += d[q] * g[p - q];
        g[p] = -acc * g0;
    }
    return g;
}

template <class S>
bool near_zero(const S& v, double tol) {
    return ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(v) : ScalarTraits<S>::abs(v) <= tol;
}

}  // namespace detail

// omega_j(t): coefficient series of xi_j in the average of a.
template <class S>
std::vector<std::vector<S>> frequency_series(const Series<S>& a, int t_order) {
    const auto L = KamLayout::of(a.signature());
    std::vector<std::vector<S>> w(L.n, std::vector<S>(t_order + 1, S{}));
    for (const auto& [m, c] : a.coeffs()) {
        if (!L.zero_mode(m) || L.xi_degree(m) != 1) continue;
        int p = L.t_degree(m);
        if (p > t_order) continue;
        for (int j = 0; j < L.n; ++j)
            if (m[L.action(j)] == 1) w[j][p] += c;
    }
    return w;
}

// The transversal: F = (xi-degree >= 2) + (angle-mean of degree <= 1).
template <class S>
std::pair<Series<S>, Series<S>> kam_split(const Series<S>& x) {
    const auto L = KamLayout::of(x.signature());
    auto inF = [&](const MultiIndex& a) { return L.xi_degree(a) >= 2 || L.zero_mode(a); };
    return {x.filter(inF), x.filter([&](const MultiIndex& a) { return !inF(a); })};
}

// h with {h, a} = r modulo F, for a = const + omega(t).xi + (xi-degree >= 2):
//   h_m = m * g,  h_n = (n - {h_m, alpha_2})_{k != 0} * g,  g_k(t) = 1/(k, omega(t)),
// m, n the xi-degree 0 and 1 parts of the complement of r.
template <class S>
Series<S> homological_solve(const Series<S>& a, const Series<S>& r, double res_tol = -1.0) {
    const auto L = KamLayout::of(a.signature());
    const int T = t_cap(a, L);
    const auto omega = frequency_series(a, T);
    std::vector<S> lambda(L.n);
    for (int j = 0; j < L.n; ++j) lambda[j] = omega[j][0];
    if (res_tol < 0) res_tol = default_res_tol(lambda);

    std::map<MultiIndex, std::vector<S>> g_cache;
    auto g_of = [&](const MultiIndex& k) -> const std::vector<S>& {
        auto it = g_cache.find(k);
        if (it != g_cache.end()) return it->second;
        std::vector<S> d(T + 1, S{});
        for (int p = 0; p <= T; ++p)
            for (int j = 0; j < L.n; ++j)
                if (k[j] != 0) d[p] += omega[j][p] * scalar<S>(k[j]);
        if (detail::near_zero(d[0], res_tol))
            throw ResonanceError("resonant mode (k,lambda) = 0 at k=" + k.str(), k.to_vector());
        return g_cache.emplace(k, detail::invert_t_series(d)).first->second;
    };
    auto star = [&](const Series<S>& x) {
        Series<S> y = x.zero_like();
        for (const auto& [m, c] : x.coeffs()) {
            const auto& g = g_of(L.mode(m));
            for (int q = 0; q + L.t_degree(m) <= T; ++q) {
                if (ScalarTraits<S>::is_zero(g[q])) continue;
                MultiIndex mq = m;
                if (L.has_t) mq[L.t()] += q;
                y.add_to(mq, c * g[q]);
            }
        }
        return y;
    };

    auto comp = kam_split(r).second;
    Series<S> m = comp.filter([&](const MultiIndex& x) { return L.xi_degree(x) == 0; });
    Series<S> nn = comp.filter([&](const MultiIndex& x) { return L.xi_degree(x) == 1; });
    Series<S> alpha2 = a.filter([&](const MultiIndex& x) { return L.xi_degree(x) == 2; });
    Series<S> hm = star(m);
    Series<S> q = nn;
    if (!alpha2.is_zero() && !hm.is_zero()) q -= poisson_bracket(hm, alpha2);
    q = q.filter([&](const MultiIndex& x) { return L.xi_degree(x) == 1 && !L.zero_mode(x); });
    return hm + star(q);
}

template <class S>
ActionProblem<S, Series<S>> kam_problem(const Series<S>& base, ScaleFamily scale, double res_tol = -1.0) {
    ActionProblem<S, Series<S>> p;
    p.name = "kam";
    p.base = base;
    p.scale = scale;
    const auto L = KamLayout::of(base.signature());
    p.act = [](const Derivation<S>& u, const Series<S>& H) { return lie_apply(u, H); };
    p.infinitesimal = [](const Derivation<S>& u, const Series<S>& H) { return u.apply(H); };
    p.inverse_j = [base, res_tol](const Series<S>& r) { return hamiltonian_field(homological_solve(base, r, res_tol)); };
    p.split = [](const Series<S>& x) { return kam_split(x); };
    p.inverse_at = [res_tol](const Series<S>& a, const Series<S>& r) {
        return hamiltonian_field(homological_solve(a, r, res_tol));
    };
    p.compose = [](const std::vector<Derivation<S>>& us) {
        std::vector<SeriesOperator<S>> parts;
        for (const auto& u : us) parts.push_back(exp(-u));
        return compose_in_order(parts);
    };
    p.norm = [scale](const Series<S>& f, double s) { return norm_at(f, scale, s); };
    p.order = [L](const Series<S>& f) {
        return L.has_t ? slot_order(f, {L.t()}) : filtration_order(f);
    };
    p.generator_bound = [scale](const Derivation<S>& u, double s) {
        auto b = analytic_bound(SeriesOperator<S>::derivation(u), 1, s, scale, u.signature(), u.truncation());
        return b ? b->N : std::numeric_limits<double>::infinity();
    };
    p.action_constant = [scale](const Series<S>& a, double s) { return norm_at(a, scale, s); };
    return p;
}

// Largest |conj c_{-k} - c_k| relative to the largest |c| of the same
// t-degree; 0 for real-symmetric series.
template <class S>
double reality_defect(const Series<S>& f) {
    const auto L = KamLayout::of(f.signature());
    std::map<int, double> top;
    for (const auto& [a, v] : f.coeffs()) {
        double& m = top[L.t_degree(a)];
        m = std::max(m, ScalarTraits<S>::abs(v));
    }
    double d = 0;
    for (const auto& [a, v] : f.coeffs()) {
        MultiIndex b = a;
        for (int j = 0; j < L.n; ++j) b[L.angle(j)] = -b[L.angle(j)];
        double e = ScalarTraits<S>::abs(ScalarTraits<S>::conj(f.coeff(b)) - v);
        d = std::max(d, e / top[L.t_degree(a)]);
    }
    return d;
}

template <class S>
struct KamResult {
    std::vector<S> lambda;
    DiophantineCert<S> cert;
    IterationResult<S, Series<S>> run;
    Series<S> normal_form;                    // transform(H) = a_N + b_N
    std::vector<std::vector<S>> frequency_shift;  // mean xi-linear part of alpha_total, per slot, by t-degree
    bool real_input = false;
    bool reality_preserved = true;
};

// Input check: H mod t = lambda.xi + const mod I^2, and the angle-mean
// xi-linear part of H stays parallel to lambda (frequency fixed up to a
// time change).
template <class S>
std::vector<S> kam_frequency(const Series<S>& H, double tol = 1e-12) {
    const auto L = KamLayout::of(H.signature());
    if (!L.has_t) throw PreconditionError("kam: Hamiltonian needs a t slot");
    for (const auto& [a, c] : H.coeffs()) {
        if (L.t_degree(a) != 0 || L.xi_degree(a) >= 2) continue;
        if (!L.zero_mode(a))
            throw PreconditionError("kam: H mod t must be lambda.xi + const modulo I^2 (angle term " + a.str() + ")");
    }
    const auto w = frequency_series(H, t_cap(H, L));
    std::vector<S> lambda(L.n);
    bool all_zero = true;
    for (int j = 0; j < L.n; ++j) {
        lambda[j] = w[j][0];
        all_zero = all_zero && ScalarTraits<S>::is_zero(lambda[j]);
    }
    if (all_zero) throw PreconditionError("kam: frequency vector is zero");
    for (std::size_t p = 1; p < w[0].size(); ++p)
        for (int i = 0; i < L.n; ++i)
            for (int j = i + 1; j < L.n; ++j) {
                S cross = w[i][p] * lambda[j] - w[j][p] * lambda[i];
                if (!detail::near_zero(cross, tol))
                    throw PreconditionError("kam: frequency drifts with t at order " + std::to_string(p) +
                                            " (mean xi-linear part not parallel to lambda)");
            }
    return lambda;
}

template <class S>
KamResult<S> kam_transversal_step(const Series<S>& H, int steps, int cutoff,
                                  const Schedule& sched = Schedule::thirds(0.05), bool real = false) {
    const auto L = KamLayout::of(H.signature());
    KamResult<S> res;
    res.lambda = kam_frequency(H);
    res.real_input = real;
    if (real) {
        for (const auto& l : res.lambda)
            if (!ScalarTraits<S>::is_real(l)) throw PreconditionError("kam: real mode needs a real frequency");
        if (reality_defect(H) > (ScalarTraits<S>::exact ? 0.0 : 1e-12)) throw PreconditionError("kam: Hamiltonian is not real-symmetric");
    }
    res.cert = min_small_divisor(res.lambda, L.n, cutoff);
    if (res.cert.resonant)
        throw ResonanceError("kam: resonant frequency, witness " + res.cert.witness.str(), res.cert.witness.to_vector());

    // base a = H mod t; b = H - a.
    Series<S> a = t_quotient(H);
    Series<S> b = H - a;
    auto p = kam_problem(a, kam_scale(L.n), -1.0);
    double N = std::pow(L.n / std::numbers::e, L.n) / std::max(res.cert.C, 1e-300);
    p.j_profile = BoundProfile{L.n, sched.s0(), N, true};
    res.run = transversal_iterate(p, b, steps, sched);
    // transform(H) = a_N + b_N by construction of the iteration.
    res.normal_form = res.run.base + res.run.residual;
    res.frequency_shift = frequency_series(res.run.alpha_total, t_cap(H, L));
    if (real) res.reality_preserved = reality_defect(res.normal_form) <= (ScalarTraits<S>::exact ? 0.0 : 1e-9);
    return res;
}

// ---------------------------------------------------------------- singular

// Standard bracket on Taylor slots (q_1..q_n, p_1..p_n):
//   {f, g} = sum_i d_{q_i} f d_{p_i} g - d_{p_i} f d_{q_i} g.
template <class S>
Series<S> canonical_bracket(const Series<S>& f, const Series<S>& g) {
    f.check_compatible(g);
    const auto& sig = f.signature();
    if (sig.fourier != 0 || sig.taylor % 2 != 0) throw SignatureMismatch("(q,p) bracket needs 2n Taylor slots");
    const int n = sig.taylor / 2;
    Series<S> r = f.zero_like();
    for (int i = 0; i < n; ++i) {
        Series<S> fq = derive(f, i), fp = derive(f, n + i);
        Series<S> gq = derive(g, i), gp = derive(g, n + i);
        if (!fq.is_zero() && !gp.is_zero()) r += fq * gp;
        if (!fp.is_zero() && !gq.is_zero()) r -= fp * gq;
    }
    return r;
}

template <class S>
Derivation<S> canonical_field(const Series<S>& h) {
    const int n = h.signature().taylor / 2;
    Derivation<S> u(h);
    for (int i = 0; i < n; ++i) {
        u.component(i) = -derive(h, n + i);
        u.component(n + i) = derive(h, i);
    }
    return u;
}

// q^a p^b in I^2, I = (q_1 p_1, ..., q_n p_n).
inline bool in_I2(const MultiIndex& m, int n) {
    int s = 0;
    for (int i = 0; i < n; ++i) s += std::min(m[i], m[n + i]);
    return s >= 2;
}

template <class S>
std::pair<Series<S>, Series<S>> singular_split(const Series<S>& x) {
    const int n = x.signature().taylor / 2;
    return {x.filter([n](const MultiIndex& a) { return in_I2(a, n); }),
            x.filter([n](const MultiIndex& a) { return !in_I2(a, n); })};
}

// {q^a p^b, lambda.qp} = (lambda, a - b) q^a p^b; divides the part outside I^2.
template <class S>
Series<S> singular_divide(const std::vector<S>& lambda, const Series<S>& x, double res_tol) {
    const int n = static_cast<int>(lambda.size());
    Series<S> h = x.zero_like();
    for (const auto& [m, c] : x.coeffs()) {
        if (in_I2(m, n)) continue;
        MultiIndex k(n);
        for (int i = 0; i < n; ++i) k[i] = m[i] - m[n + i];
        S d = pairing(lambda, k);
        if (detail::near_zero(d, res_tol))
            throw ResonanceError("singular: resonant monomial " + m.str() + ", (lambda, a-b) = 0 at a-b=" + k.str(),
                                 k.to_vector());
        h.set(m, c * ScalarTraits<S>::inverse(d));
    }
    return h;
}

// h with {h, a} = r mod I^2 for a = lambda.qp + alpha, alpha in I^2:
// h = divide(r - {h, alpha}); {., alpha} raises the degree by 2.
template <class S>
Series<S> singular_solve(const std::vector<S>& lambda, const Series<S>& a, const Series<S>& r, double res_tol) {
    const int n = static_cast<int>(lambda.size());
    Series<S> alpha = a.filter([n](const MultiIndex& m) { return total_degree(m) > 2; });
    return neumann_solve(singular_divide(lambda, r, res_tol), r.cap(), [&](const Series<S>& h) {
        return singular_divide(lambda, r - canonical_bracket(h, alpha), res_tol);
    });
}

template <class S>
std::vector<S> singular_frequency(const Series<S>& H) {
    const auto& sig = H.signature();
    if (sig.fourier != 0 || sig.taylor % 2 != 0 || sig.taylor == 0)
        throw SignatureMismatch("singular: Hamiltonian needs 2n Taylor slots (q, p)");
    const int n = sig.taylor / 2;
    std::vector<S> lambda(n);
    for (const auto& [m, c] : H.coeffs()) {
        int d = total_degree(m);
        if (d < 2) throw PreconditionError("singular: origin must be a critical point with value 0 (term " + m.str() + ")");
        if (d > 2) continue;
        int i = -1;
        for (int k = 0; k < n; ++k)
            if (m[k] == 1 && m[n + k] == 1) i = k;
        if (i < 0) throw PreconditionError("singular: quadratic part must be sum lambda_i q_i p_i (term " + m.str() + ")");
        lambda[i] = c;
    }
    return lambda;
}

template <class S>
struct SingularResult {
    std::vector<S> lambda;
    IterationResult<S, Series<S>> run;
    Series<S> normal_form;  // transform(H)
    bool residual_in_I2 = false;
};

template <class S>
SingularResult<S> singular_kam_step(const Series<S>& H, int steps, const Schedule& sched = Schedule::thirds(0.05),
                                    ScaleFamily scale = ScaleFamily::majorant()) {
    SingularResult<S> res;
    res.lambda = singular_frequency(H);
    const double tol = default_res_tol(res.lambda);
    const int n = static_cast<int>(res.lambda.size());
    Series<S> a = H.filter([](const MultiIndex& m) { return total_degree(m) == 2; });
    Series<S> b = H - a;
    ActionProblem<S, Series<S>> p;
    p.name = "singular-kam";
    p.base = a;
    p.scale = scale;
    auto lambda = res.lambda;
    p.act = [](const Derivation<S>& u, const Series<S>& x) { return lie_apply(u, x); };
    p.infinitesimal = [](const Derivation<S>& u, const Series<S>& x) { return u.apply(x); };
    p.inverse_j = [lambda, tol](const Series<S>& r) { return canonical_field(singular_divide(lambda, r, tol)); };
    p.split = [](const Series<S>& x) { return singular_split(x); };
    p.inverse_at = [lambda, tol](const Series<S>& at, const Series<S>& r) {
        return canonical_field(singular_solve(lambda, at, r, tol));
    };
    p.compose = [](const std::vector<Derivation<S>>& us) {
        std::vector<SeriesOperator<S>> parts;
        for (const auto& u : us) parts.push_back(exp(-u));
        return compose_in_order(parts);
    };
    p.norm = [scale](const Series<S>& f, double s) { return norm_at(f, scale, s); };
    p.order = [](const Series<S>& f) { return filtration_order(f); };
    p.generator_bound = [scale](const Derivation<S>& u, double s) { return norm_at(u, scale, s); };
    p.action_constant = [scale](const Series<S>& x, double s) { return norm_at(x, scale, s); };
    double N = 0;
    for (const auto& [m, c] : b.coeffs()) {
        MultiIndex k(n);
        for (int i = 0; i < n; ++i) k[i] = m[i] - m[n + i];
        S d = pairing(lambda, k);
        if (!detail::near_zero(d, tol)) N = std::max(N, 1.0 / ScalarTraits<S>::abs(d));
    }
    p.j_profile = BoundProfile{0, sched.s0(), N, false};
    res.run = transversal_iterate(p, b, steps, sched);
    res.normal_form = res.run.base + res.run.residual;
    res.residual_in_I2 = singular_split(res.run.residual).second.is_zero();
    return res;
}

}  // namespace echelon
