#pragma once

#include <string>
#include <utility>
#include <vector>

#include "echelon/iteration.hpp"
#include "echelon/linalg.hpp"
#include "echelon/small_divisors.hpp"

namespace echelon {

enum class Strategy { Kolmogorov, KolmogorovSingle, Newton, Picard };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Kolmogorov: return "kolmogorov";
        case Strategy::KolmogorovSingle: return "kolmogorov-single";
        case Strategy::Newton: return "newton";
        case Strategy::Picard: return "picard";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string& s) {
    if (s == "kolmogorov") return Strategy::Kolmogorov;
    if (s == "kolmogorov-single") return Strategy::KolmogorovSingle;
    if (s == "newton") return Strategy::Newton;
    if (s == "picard") return Strategy::Picard;
    throw ParseError("unknown strategy '" + s + "'");
}

template <class S, class P>
IterationResult<S, P> run_strategy(const ActionProblem<S, P>& p, const P& b0, int steps, const Schedule& sched,
                                   Strategy st) {
    switch (st) {
        case Strategy::Kolmogorov: return kolmogorov_iterate(p, b0, steps, sched);
        case Strategy::KolmogorovSingle:
            return kolmogorov_iterate(p, b0, steps, sched, IterationForm::SingleSequence);
        case Strategy::Newton: return newton_iterate(p, b0, steps, sched);
        case Strategy::Picard: return picard_iterate(p, b0, steps, sched);
    }
    throw PreconditionError("unknown strategy");
}

// Fixed point of x = step(x) on a jet; step must raise the order of the
// difference, so the loop ends after at most cap+2 rounds.
template <class X, class F>
X neumann_solve(X x0, int cap, F&& step) {
    X x = x0;
    for (int it = 0; it < cap + 2; ++it) {
        X next = step(x);
        if (next == x) return next;
        x = std::move(next);
    }
    return x;
}

// ---------------------------------------------------------------- Morse

template <class S>
struct MorseSetup {
    Series<S> base;      // f(0) + quadratic part
    Series<S> residual;  // f - base
    Matrix<S> hessian;
    Matrix<S> hessian_inv;
    S det{};
};

template <class S>
MorseSetup<S> morse_setup(const Series<S>& f) {
    const auto& sig = f.signature();
    if (sig.fourier != 0) throw PreconditionError("morse: function jet must have Taylor slots only");
    const int n = sig.slots();
    MorseSetup<S> m;
    m.base = f.zero_like();
    m.residual = f.zero_like();
    m.hessian.assign(n, std::vector<S>(n, S{}));
    for (const auto& [a, c] : f.coeffs()) {
        int d = total_degree(a);
        if (d == 1) throw PreconditionError("morse: origin is not a critical point (linear term " + a.str() + ")");
        if (d == 0) {
            m.base.set(a, c);
        } else if (d == 2) {
            m.base.set(a, c);
            std::vector<int> idx;
            for (int k = 0; k < n; ++k)
                for (int e = 0; e < a[k]; ++e) idx.push_back(k);
            if (idx[0] == idx[1]) {
                m.hessian[idx[0]][idx[0]] += scalar<S>(2) * c;
            } else {
                m.hessian[idx[0]][idx[1]] += c;
                m.hessian[idx[1]][idx[0]] += c;
            }
        } else {
            m.residual.set(a, c);
        }
    }
    m.det = determinant(m.hessian);
    auto inv = invert(m.hessian);
    if (!inv) throw PreconditionError("morse: degenerate quadratic part (Hessian determinant 0)");
    m.hessian_inv = std::move(*inv);
    return m;
}

// Group: exp of vector fields acting on functions by substitution.
// j divides each monomial c x^a by x_k (k = first slot with a_k > 0) and
// solves u(Q) = c x^a with u = c H^{-1} e_k x^{a-e_k}.
template <class S>
ActionProblem<S, Series<S>> morse_problem(const MorseSetup<S>& m, ScaleFamily scale = ScaleFamily::majorant(),
                                          double tau = 0.1) {
    ActionProblem<S, Series<S>> p;
    p.name = "morse";
    p.base = m.base;
    p.scale = scale;
    const Matrix<S> Hinv = m.hessian_inv;
    const int n = static_cast<int>(Hinv.size());
    auto j = [Hinv, n](const Series<S>& b) {
        Derivation<S> u(b);
        for (const auto& [a, c] : b.coeffs()) {
            int k = 0;
            while (k < n && a[k] == 0) ++k;
            if (k == n) throw PreconditionError("morse: constant term in residual");
            MultiIndex r = a - MultiIndex::unit(n, k, 1);
            for (int i = 0; i < n; ++i)
                if (!ScalarTraits<S>::is_zero(Hinv[i][k])) u.component(i).add_to(r, c * Hinv[i][k]);
        }
        return u;
    };
    p.act = [](const Derivation<S>& u, const Series<S>& f) { return lie_apply(u, f); };
    p.infinitesimal = [](const Derivation<S>& u, const Series<S>& f) { return u.apply(f); };
    p.inverse_j = j;
    // u(a + b_y) = r  <=>  u = j(r - u(b_y)); u(b_y) raises the order.
    p.rebased_inverse = [j, base = m.base](const Series<S>& y, const Series<S>& r) {
        Series<S> by = y - base;
        return neumann_solve(j(r), r.cap(), [&](const Derivation<S>& u) { return j(r - u.apply(by)); });
    };
    p.compose = [](const std::vector<Derivation<S>>& us) {
        std::vector<SeriesOperator<S>> parts;
        for (const auto& u : us) parts.push_back(exp(-u));
        return compose_in_order(parts);
    };
    p.norm = [scale](const Series<S>& f, double s) { return norm_at(f, scale, s); };
    p.order = [](const Series<S>& f) { return filtration_order(f); };
    p.generator_bound = [scale](const Derivation<S>& u, double s) { return norm_at(u, scale, s); };
    p.action_constant = [scale](const Series<S>& a, double s) { return norm_at(a, scale, s); };
    double N = 0;
    for (int k = 0; k < n; ++k) {
        double col = 0;
        for (int i = 0; i < n; ++i) col += ScalarTraits<S>::abs(Hinv[i][k]);
        N = std::max(N, col);
    }
    p.j_profile = BoundProfile{1, tau, N, true};
    return p;
}

template <class S>
struct MorseResult {
    MorseSetup<S> setup;
    IterationResult<S, Series<S>> run;
    // Degree cap is dropped: it depends on terms of f beyond the jet.
    std::vector<Series<S>> psi;  // f(psi) = Q modulo degree cap
    std::vector<Series<S>> phi;  // Q(phi) = f modulo degree cap
};

template <class S>
MorseResult<S> morse_reduce(const Series<S>& f, int steps, Strategy st = Strategy::Kolmogorov,
                            const Schedule& sched = Schedule::halving(0.05), ScaleFamily scale = ScaleFamily::majorant()) {
    MorseResult<S> r;
    r.setup = morse_setup(f);
    auto p = morse_problem(r.setup, scale, sched.s0());
    r.run = run_strategy(p, r.setup.residual, steps, sched, st);
    const int n = f.signature().slots();
    std::vector<SeriesOperator<S>> inv;
    for (auto it = r.run.generators.rbegin(); it != r.run.generators.rend(); ++it) inv.push_back(exp(*it));
    auto T_inv = compose_in_order(inv);
    const int cap = f.cap();
    auto below_cap = [cap](const MultiIndex& a) { return total_degree(a) < cap; };
    for (int i = 0; i < n; ++i) {
        auto x = f.monomial_like(MultiIndex::unit(n, i, 1), scalar<S>(1));
        r.psi.push_back(r.run.transform(x).filter(below_cap));
        r.phi.push_back(T_inv(x).filter(below_cap));
    }
    return r;
}

// g(h_1, ..., h_n) on the jet of h.
template <class S>
Series<S> substitute(const Series<S>& g, const std::vector<Series<S>>& h) {
    if (h.empty()) throw PreconditionError("substitute: empty map");
    Series<S> out = h[0].zero_like();
    const int n = static_cast<int>(h.size());
    std::vector<std::vector<Series<S>>> pw(n);
    for (const auto& [a, c] : g.coeffs()) {
        Series<S> term = out.constant_like(c);
        for (int k = 0; k < n; ++k) {
            auto& v = pw[k];
            if (v.empty()) v.push_back(out.constant_like(scalar<S>(1)));
            while (static_cast<int>(v.size()) <= a[k]) v.push_back(v.back() * h[k]);
            if (a[k] > 0) term = term * v[a[k]];
        }
        out += term;
    }
    return out;
}

// ---------------------------------------------------------------- Siegel

// Linear part of v must be diag(lambda) with no constant terms.
template <class S>
std::vector<S> diagonal_frequencies(const Derivation<S>& v) {
    const int n = v.slots();
    if (v.signature().fourier != 0) throw PreconditionError("siegel: vector field must have Taylor slots only");
    std::vector<S> lambda(n);
    for (int i = 0; i < n; ++i) {
        for (const auto& [a, c] : v[i].coeffs()) {
            int d = total_degree(a);
            if (d == 0) throw PreconditionError("siegel: vector field does not vanish at the origin");
            if (d == 1 && a[i] != 1)
                throw PreconditionError("siegel: linear part is not diagonal (component " + std::to_string(i) + ")");
        }
        lambda[i] = v[i].coeff(MultiIndex::unit(n, i, 1));
    }
    return lambda;
}

template <class S>
Derivation<S> linear_field(const std::vector<S>& lambda, const Series<S>& proto) {
    const int n = static_cast<int>(lambda.size());
    Derivation<S> a(proto);
    for (int i = 0; i < n; ++i) a.component(i).set(MultiIndex::unit(n, i, 1), lambda[i]);
    return a;
}

template <class S>
double generator_ad_bound(const Derivation<S>& u, const ScaleFamily& scale, double s) {
    double acc = norm_at(u, scale, s);
    double d = 0;
    for (int i = 0; i < u.slots(); ++i)
        for (int j = 0; j < u.slots(); ++j) d += norm_at(derive(u[i], j), scale, s);
    return acc + s * d;
}

// Group: exp of vector fields acting on vector fields by conjugation.
// j solves [a, u] = b monomialwise with divisors (j, lambda) - lambda_i.
template <class S>
ActionProblem<S, Derivation<S>> siegel_problem(const std::vector<S>& lambda, const Series<S>& proto,
                                               ScaleFamily scale = ScaleFamily::majorant(), double tau = 0.1) {
    ActionProblem<S, Derivation<S>> p;
    p.name = "siegel";
    p.base = linear_field(lambda, proto);
    p.scale = scale;
    const int n = static_cast<int>(lambda.size());
    auto j = [lambda, n](const Derivation<S>& b) {
        Derivation<S> u(b.zero_series());
        for (int i = 0; i < n; ++i) {
            for (const auto& [a, c] : b[i].coeffs()) {
                S d = pairing(lambda, a) - lambda[i];
                bool res = ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(d)
                                                  : ScalarTraits<S>::abs(d) <= default_res_tol(lambda);
                if (res)
                    throw ResonanceError("resonant divisor (j,lambda)-lambda_" + std::to_string(i) + " at j=" + a.str(),
                                         a.to_vector(), i);
                u.component(i).set(a, c * ScalarTraits<S>::inverse(d));
            }
        }
        return u;
    };
    p.act = [](const Derivation<S>& u, const Derivation<S>& X) { return adjoint_exp(-u, X); };
    p.infinitesimal = [](const Derivation<S>& u, const Derivation<S>& X) { return bracket(X, u); };
    p.inverse_j = j;
    // [a + b_y, w] = r  <=>  w = j(r - [b_y, w]).
    p.rebased_inverse = [j, base = p.base](const Derivation<S>& y, const Derivation<S>& r) {
        Derivation<S> by = y - base;
        return neumann_solve(j(r), r.truncation().cap,
                             [&](const Derivation<S>& w) { return j(r - bracket(by, w)); });
    };
    p.compose = [](const std::vector<Derivation<S>>& us) {
        std::vector<SeriesOperator<S>> parts;
        for (const auto& u : us) parts.push_back(exp(u));
        return compose_in_order(parts);
    };
    p.norm = [scale](const Derivation<S>& X, double s) { return norm_at(X, scale, s); };
    p.order = [](const Derivation<S>& X) { return filtration_order(X); };
    p.generator_bound = [scale](const Derivation<S>& u, double s) { return generator_ad_bound(u, scale, s); };
    p.action_constant = [scale](const Derivation<S>& a, double s) { return norm_at(a, scale, s); };
    double N = 0;
    for (const auto& d : siegel_divisors(lambda, proto.cap())) N = std::max(N, 1.0 / d.magnitude);
    p.j_profile = BoundProfile{0, tau, N, true};
    return p;
}

template <class S>
struct SiegelResult {
    std::vector<S> lambda;
    bool poincare = false;
    double min_divisor = 0;
    IterationResult<S, Derivation<S>> run;
    std::vector<Series<S>> h;  // v(h(w)) = Dh(w) Lambda w modulo the cap
};

template <class S>
SiegelResult<S> siegel_linearize(const Derivation<S>& v_in, int cutoff, int steps,
                                 Strategy st = Strategy::Kolmogorov, const Schedule& sched = Schedule::halving(0.05),
                                 ScaleFamily scale = ScaleFamily::majorant()) {
    if (cutoff < 2) throw PreconditionError("siegel: cutoff >= 2 required");
    std::vector<Series<S>> comps;
    for (const auto& c : v_in.components()) comps.push_back(c.with_truncation(Truncation::total(c.signature(), cutoff)));
    Derivation<S> v(std::move(comps));
    SiegelResult<S> r;
    r.lambda = diagonal_frequencies(v);
    std::vector<Complex> lc;
    for (const auto& l : r.lambda) lc.push_back(ScalarTraits<S>::to_complex(l));
    r.poincare = in_poincare_domain(lc);
    double mind = std::numeric_limits<double>::infinity();
    for (const auto& d : siegel_divisors(r.lambda, cutoff)) {
        if (d.resonant)
            throw ResonanceError("resonance (j,lambda) = lambda_" + std::to_string(d.i) + " at j=" + d.j.str(),
                                 d.j.to_vector(), d.i);
        mind = std::min(mind, d.magnitude);
    }
    r.min_divisor = mind;
    auto p = siegel_problem(r.lambda, v[0], scale, sched.s0());
    r.run = run_strategy(p, v - p.base, steps, sched, st);
    const int n = v.slots();
    for (int i = 0; i < n; ++i) r.h.push_back(r.run.transform(v[0].monomial_like(MultiIndex::unit(n, i, 1), scalar<S>(1))));
    return r;
}

// Components of v(h) - Dh Lambda w.
template <class S>
std::vector<Series<S>> siegel_defect(const Derivation<S>& v, const std::vector<S>& lambda,
                                     const std::vector<Series<S>>& h) {
    const int n = static_cast<int>(h.size());
    std::vector<Series<S>> out;
    for (int i = 0; i < n; ++i) {
        Series<S> lhs = substitute(v[i].with_truncation(h[i].truncation()), h);
        Series<S> rhs = h[i].zero_like();
        for (int k = 0; k < n; ++k)
            rhs += derive(h[i], k) * h[i].monomial_like(MultiIndex::unit(n, k, 1), lambda[k]);
        out.push_back(lhs - rhs);
    }
    return out;
}

}  // namespace echelon
