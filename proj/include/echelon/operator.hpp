#pragma once

#include <climits>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "echelon/derivation.hpp"
#include "echelon/scale.hpp"
#include "echelon/series.hpp"

namespace echelon {

// |u x|_s <= N sigma^-k |x|_{s+sigma} for s in (0,tau), sigma in (0,tau-s].
struct BoundProfile {
    int k = 0;
    double tau = 0;
    double N = 0;
    bool certified = false;
};

BoundProfile compose_bound(const BoundProfile& p, const BoundProfile& q);
BoundProfile compose_bound(const std::vector<BoundProfile>& ps);

// 3^n n! >= n^n, evaluated with big integers.
bool gamma_inequality_check(int n);

// Diagonal multiplier given by a rule on the lattice.
template <class S>
struct DiagonalRule {
    std::string name;
    std::vector<double> params;
    std::function<S(const MultiIndex&)> eigenvalue;
};

// 1 + sum_j |i_j|^tau on the given slots: the eigenvalues of
// Id + sum_j (z_j d/dz_j)^tau taken in absolute value.
template <class S>
DiagonalRule<S> angular_power_rule(int tau) {
    return {"angular-power",
            {static_cast<double>(tau)},
            [tau](const MultiIndex& a) {
                long v = 1;
                for (int k = 0; k < a.size(); ++k) {
                    long p = 1;
                    for (int e = 0; e < tau; ++e) p *= std::abs(a[k]);
                    v += p;
                }
                return scalar<S>(v);
            }};
}

enum class OpKind { Identity, Derivation, Multiplication, Hadamard, Diagonal, Composite, Exponential };

enum class ExpMode {
    Nilpotent,   // u^J = 0 on the jet: the series is finite and exact
    ConditionE,  // geometric tail 3N/((1-lambda)s) below tolerance
    FiniteJet,   // weight-preserving u on a finite jet; stop on negligible terms
    Override     // caller forced evaluation
};

inline const char* exp_mode_name(ExpMode m) {
    switch (m) {
        case ExpMode::Nilpotent: return "nilpotent";
        case ExpMode::ConditionE: return "condition-E";
        case ExpMode::FiniteJet: return "finite-jet";
        case ExpMode::Override: return "override";
    }
    return "?";
}

struct ExpOptions {
    double tail_tol = 1e-15;
    int max_terms = 400;
    bool override_domain = false;
    double lambda = 0.5;
};

template <class S>
class SeriesOperator {
public:
    struct Exponential;
    using Node = std::variant<std::monostate, Derivation<S>, Series<S>, DiagonalRule<S>,
                              std::vector<SeriesOperator>, std::shared_ptr<const Exponential>>;

    SeriesOperator() : kind_(OpKind::Identity), node_(std::make_shared<Node>()) {}

    static SeriesOperator identity() { return SeriesOperator(); }
    static SeriesOperator derivation(Derivation<S> u) {
        return SeriesOperator(OpKind::Derivation, Node(std::move(u)));
    }
    static SeriesOperator multiplication(Series<S> g) {
        return SeriesOperator(OpKind::Multiplication, Node(std::in_place_index<2>, std::move(g)));
    }
    static SeriesOperator hadamard(Series<S> g) {
        return SeriesOperator(OpKind::Hadamard, Node(std::in_place_index<2>, std::move(g)));
    }
    static SeriesOperator diagonal(DiagonalRule<S> r) {
        return SeriesOperator(OpKind::Diagonal, Node(std::move(r)));
    }
    // parts applied right to left: composite({A, B})(x) = A(B(x)).
    static SeriesOperator composite(std::vector<SeriesOperator> parts) {
        return SeriesOperator(OpKind::Composite, Node(std::move(parts)));
    }
    static SeriesOperator exponential(SeriesOperator inner, ExpMode mode, int terms, double tail_tol) {
        auto e = std::make_shared<const Exponential>(Exponential{std::move(inner), mode, terms, tail_tol});
        return SeriesOperator(OpKind::Exponential, Node(std::move(e)));
    }

    OpKind kind() const { return kind_; }
    const Derivation<S>& as_derivation() const { return std::get<1>(*node_); }
    const Series<S>& multiplier() const { return std::get<2>(*node_); }
    const DiagonalRule<S>& rule() const { return std::get<3>(*node_); }
    const std::vector<SeriesOperator>& parts() const { return std::get<4>(*node_); }
    const Exponential& exp_data() const { return *std::get<5>(*node_); }

    Series<S> operator()(const Series<S>& x) const {
        switch (kind_) {
            case OpKind::Identity: return x;
            case OpKind::Derivation: return as_derivation().apply(x);
            case OpKind::Multiplication: return multiplier() * x;
            case OpKind::Hadamard: return echelon::hadamard(x, multiplier());
            case OpKind::Diagonal: {
                const auto& r = rule();
                return x.map([&](const MultiIndex& a, const S& v) { return v * r.eigenvalue(a); });
            }
            case OpKind::Composite: {
                Series<S> y = x;
                const auto& ps = parts();
                for (auto it = ps.rbegin(); it != ps.rend(); ++it) y = (*it)(y);
                return y;
            }
            case OpKind::Exponential: return apply_exp(exp_data(), x);
        }
        return x;
    }

    struct Exponential {
        SeriesOperator inner;
        ExpMode mode;
        int terms;  // maximal power evaluated
        double tail_tol;
    };

private:
    SeriesOperator(OpKind k, Node n) : kind_(k), node_(std::make_shared<Node>(std::move(n))) {}

    static Series<S> apply_exp(const Exponential& e, const Series<S>& x) {
        Series<S> sum = x;
        Series<S> term = x;
        int small = 0;
        for (int j = 1; j <= e.terms; ++j) {
            term = e.inner(term);
            term *= ScalarTraits<S>::inverse(scalar<S>(j));
            if (term.is_zero()) break;
            sum += term;
            if (e.mode != ExpMode::Nilpotent) {
                double scale = std::max(1.0, max_abs(sum));
                small = max_abs(term) <= e.tail_tol * scale ? small + 1 : 0;
                if (small >= 2) break;
            }
        }
        return sum;
    }

    OpKind kind_;
    std::shared_ptr<const Node> node_;
};

// Composite g_n ... g_0 from a list given in application order g_0 first.
template <class S>
SeriesOperator<S> compose_in_order(const std::vector<SeriesOperator<S>>& applied_first_to_last) {
    std::vector<SeriesOperator<S>> parts(applied_first_to_last.rbegin(), applied_first_to_last.rend());
    return SeriesOperator<S>::composite(std::move(parts));
}

// All monomials of the jet; Fourier entries range over [-band, band].
inline std::vector<MultiIndex> enumerate_jet(const Signature& sig, const Truncation& t, int fourier_band) {
    std::vector<MultiIndex> out;
    MultiIndex cur(sig.slots());
    std::function<void(int)> rec = [&](int k) {
        if (k == sig.slots()) {
            if (t.keeps(cur)) out.push_back(cur);
            return;
        }
        int lo = sig.is_fourier(k) ? -fourier_band : 0;
        int hi = sig.is_fourier(k) ? fourier_band : t.cap;
        if (!sig.is_fourier(k) && t.weights[k] == 0 && static_cast<int>(t.slot_caps.size()) > k &&
            t.slot_caps[k] >= 0)
            hi = t.slot_caps[k];
        for (int v = lo; v <= hi; ++v) {
            cur[k] = v;
            MultiIndex partial = cur;
            for (int r = k + 1; r < sig.slots(); ++r) partial[r] = 0;
            if (!t.keeps(partial)) continue;
            rec(k + 1);
        }
        cur[k] = 0;
    };
    rec(0);
    return out;
}

// Induced norm max_a |op(e_a)|_{s_out} / |e_a|_{s_in} over a monomial basis.
// Exact for the weighted l1 scales.
template <class S>
double jet_operator_norm(const SeriesOperator<S>& op, const Series<S>& proto, const std::vector<MultiIndex>& basis,
                         const ScaleFamily& scale, double s_in, double s_out) {
    double best = 0;
    for (const auto& a : basis) {
        Series<S> e = proto.monomial_like(a, scalar<S>(1));
        if (e.is_zero()) continue;
        best = std::max(best, norm_at(op(e), scale, s_out) / norm_at(e, scale, s_in));
    }
    return best;
}

namespace detail {

// sup over sigma in (0,tau) of sigma^k ((tau-sigma)/tau)^D e^{-m sigma}; the
// sup over s of the weight ratio w(a,s)/w(a,s+sigma) is reached at
// s -> tau - sigma. k = 0 gives 1.
double diagonal_gain(int k, double D, double m, double tau);

}  // namespace detail

// Analytic (k, tau) bound for operators whose structure is known, else an
// empirical supremum over probes and a grid of (s, sigma).
template <class S>
BoundProfile estimate_bound(const SeriesOperator<S>& u, int k, double tau, const std::vector<Series<S>>& probes,
                            const ScaleFamily& scale, int grid = 12);

template <class S>
std::optional<BoundProfile> analytic_bound(const SeriesOperator<S>& u, int k, double tau, const ScaleFamily& scale,
                                           const Signature& sig, const Truncation& trunc, int fourier_band = 0);

template <class S>
bool check_condition_E(const SeriesOperator<S>& u, const BoundProfile& profile, double s,
                       const ScaleFamily& scale = ScaleFamily::majorant(), const Series<S>* proto = nullptr) {
    if (profile.k != 1) throw PreconditionError("condition (E) needs a 1-bound profile");
    double N = profile.N;
    if (profile.tau < s) {
        if (!proto) throw PreconditionError("no certified bound at scale " + std::to_string(s));
        auto p = analytic_bound(u, 1, s, scale, proto->signature(), proto->truncation());
        if (!p) throw PreconditionError("no certified bound at scale " + std::to_string(s));
        N = p->N;
    }
    return 3.0 * N < s;
}

// Decides how e^u is evaluated on the jet and returns it as an operator.
template <class S>
SeriesOperator<S> exp(const SeriesOperator<S>& u, const BoundProfile& profile, const ExpOptions& opt = {});

// Lie series of a derivation (convenience; profile-free).
template <class S>
SeriesOperator<S> exp(const Derivation<S>& u, const ExpOptions& opt = {}) {
    return exp(SeriesOperator<S>::derivation(u), BoundProfile{1, 0.0, 0.0, false}, opt);
}

template <class S>
Series<S> lie_apply(const Derivation<S>& u, const Series<S>& x, const ExpOptions& opt = {}) {
    return exp(u, opt)(x);
}

// e^{ad u} X = sum ad_u^j X / j! on vector-field jets.
template <class S>
Derivation<S> adjoint_exp(const Derivation<S>& u, const Derivation<S>& X, const ExpOptions& opt = {}) {
    int J = nilpotency_bound(u);
    if (J < 0) {
        if (!opt.override_domain) throw PreconditionError("adjoint exponential refused: u does not raise order");
        J = opt.max_terms;
    }
    Derivation<S> sum = X, term = X;
    for (int j = 1; j <= J; ++j) {
        term = bracket(u, term) * ScalarTraits<S>::inverse(scalar<S>(j));
        if (term.is_zero()) break;
        sum += term;
    }
    return sum;
}

enum class Verdict { Converged, Diverged, Undetermined };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Diverged: return "diverged";
        case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

struct ConvergenceCert {
    double s = 0;
    std::vector<double> ratios;        // N^1_s(u_n)/s
    std::vector<double> partial_sums;  // running sums of ratios
    Verdict verdict = Verdict::Undetermined;
    double tail_bound = 0;             // bound on the remaining sum when converged
    int violated_at = -1;              // first n with 3N >= s
    std::string rule;
};

// Ratio test over the trailing window: converged when the ratio stays below
// q_max, tail bounded by a_last q/(1-q).
struct TailRule {
    double q_max = 0.75;
    int window = 6;
};

ConvergenceCert certify_product(const std::vector<double>& N, double s, const TailRule& rule = {});

template <class S>
struct ProductResult {
    SeriesOperator<S> g;  // e^{u_n} ... e^{u_0}
    SeriesOperator<S> h;  // e^{-u_0} ... e^{-u_n}
    std::vector<SeriesOperator<S>> partial;  // g_0, g_1, ...
    ConvergenceCert cert;
};

template <class S>
ProductResult<S> infinite_product(const std::vector<Derivation<S>>& us, const std::vector<BoundProfile>& profiles,
                                  double s, const TailRule& rule = {}, const ExpOptions& opt = {});

}  // namespace echelon

#include "echelon/operator_impl.hpp"
