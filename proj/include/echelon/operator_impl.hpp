#pragma once

// Template definitions for operator.hpp.

#include <optional>

namespace echelon {

namespace detail {

template <class S>
int multiplier_band(const Series<S>& g) {
    int b = 0;
    for (const auto& [a, v] : g.coeffs()) b = std::max(b, sigma(a, 0, g.signature().fourier));
    return b;
}

template <class S>
double diagonal_sup(const ScaleFamily& scale, const Signature& sig, int k, double tau,
                    const std::vector<std::pair<MultiIndex, double>>& mags) {
    double best = 0;
    for (const auto& [a, m] : mags) {
        if (m == 0) continue;
        double D = 0, strip = 0;
        scale.exponents(a, sig, D, strip);
        best = std::max(best, m * diagonal_gain(k, D, strip, tau));
    }
    return best;
}

}  // namespace detail

template <class S>
std::optional<BoundProfile> analytic_bound(const SeriesOperator<S>& u, int k, double tau, const ScaleFamily& scale,
                                           const Signature& sig, const Truncation& trunc, int fourier_band) {
    const bool hilbert = scale.kind == ScaleKind::HilbertPolydisk;
    auto make = [&](double N) { return BoundProfile{k, tau, N, true}; };
    switch (u.kind()) {
        case OpKind::Identity:
            return make(k == 0 ? 1.0 : std::pow(tau, k));
        case OpKind::Derivation: {
            if (hilbert || k < 1) return std::nullopt;
            const auto& d = u.as_derivation();
            double N1 = 0;
            for (int j = 0; j < d.slots(); ++j) {
                if (d[j].is_zero()) continue;
                if (!sig.is_fourier(j) && scale.is_deformation(j)) return std::nullopt;
                double c = norm_at(d[j], scale, tau);
                N1 += sig.is_fourier(j) ? c / std::numbers::e : c;
            }
            return make(N1 * std::pow(tau, k - 1));
        }
        case OpKind::Multiplication: {
            if (hilbert) return std::nullopt;
            return make(norm_at(u.multiplier(), scale, tau) * std::pow(tau, k));
        }
        case OpKind::Hadamard: {
            std::vector<std::pair<MultiIndex, double>> mags;
            for (const auto& [a, v] : u.multiplier().coeffs()) mags.emplace_back(a, ScalarTraits<S>::abs(v));
            return make(detail::diagonal_sup<S>(scale, sig, k, tau, mags));
        }
        case OpKind::Diagonal: {
            // Weightless Fourier slots leave the jet unbounded in those
            // directions unless a band is supplied.
            bool unbounded = false;
            for (int j = 0; j < sig.fourier; ++j) unbounded = unbounded || trunc.weights[j] == 0;
            if (unbounded && fourier_band <= 0) return std::nullopt;
            std::vector<std::pair<MultiIndex, double>> mags;
            for (const auto& a : enumerate_jet(sig, trunc, unbounded ? fourier_band : trunc.cap))
                mags.emplace_back(a, ScalarTraits<S>::abs(u.rule().eigenvalue(a)));
            return make(detail::diagonal_sup<S>(scale, sig, k, tau, mags));
        }
        case OpKind::Composite: {
            std::vector<BoundProfile> ps;
            int ksum = 0;
            for (const auto& p : u.parts()) {
                int kp = p.kind() == OpKind::Derivation ? 1 : 0;
                auto b = analytic_bound(p, kp, tau, scale, sig, trunc, fourier_band);
                if (!b) return std::nullopt;
                ps.push_back(*b);
                ksum += kp;
            }
            if (ps.empty()) return make(k == 0 ? 1.0 : std::pow(tau, k));
            if (ksum > k) return std::nullopt;
            BoundProfile c = compose_bound(ps);
            c.k = k;
            c.N *= std::pow(tau, k - ksum);
            return c;
        }
        case OpKind::Exponential:
            return std::nullopt;
    }
    return std::nullopt;
}

template <class S>
BoundProfile estimate_bound(const SeriesOperator<S>& u, int k, double tau, const std::vector<Series<S>>& probes,
                            const ScaleFamily& scale, int grid) {
    if (probes.empty()) throw PreconditionError("estimate_bound: empty probe set");
    if (!(tau > 0 && tau <= scale.S)) throw ScaleDomainError("estimate_bound: tau outside (0,S]");
    int band = 0;
    for (const auto& p : probes) band = std::max(band, detail::multiplier_band(p));
    if (auto b = analytic_bound(u, k, tau, scale, probes[0].signature(), probes[0].truncation(), band)) return *b;

    double best = 0;
    bool any = false;
    for (const auto& x : probes) {
        if (x.is_zero()) continue;
        any = true;
        Series<S> y = u(x);
        for (int i = 1; i <= grid; ++i) {
            double s = tau * i / (grid + 1.0);
            for (int j = 1; j <= grid; ++j) {
                double sg = (tau - s) * j / grid;
                if (s + sg >= scale.S) sg = (scale.S - s) * (1 - 1e-9);
                double den = norm_at(x, scale, s + sg);
                if (den <= 0) continue;
                best = std::max(best, norm_at(y, scale, s) * std::pow(sg, k) / den);
            }
        }
    }
    if (!any) throw PreconditionError("estimate_bound: all probes are zero");
    return BoundProfile{k, tau, best, false};
}

template <class S>
SeriesOperator<S> exp(const SeriesOperator<S>& u, const BoundProfile& profile, const ExpOptions& opt) {
    int J = -1;
    int raise = INT_MIN;
    switch (u.kind()) {
        case OpKind::Derivation: {
            const auto& d = u.as_derivation();
            if (d.is_zero()) return SeriesOperator<S>::identity();
            J = nilpotency_bound(d);
            raise = weight_raise(d);
            break;
        }
        case OpKind::Multiplication: {
            const auto& g = u.multiplier();
            if (g.is_zero()) return SeriesOperator<S>::identity();
            const auto& t = g.truncation();
            if (t.additive(g.signature())) {
                raise = weighted_order(g, [&](const MultiIndex& a) { return t.weight(a); }, 0.0);
                if (raise >= 1) J = t.cap / raise + 1;
            }
            break;
        }
        case OpKind::Hadamard:
        case OpKind::Diagonal:
        case OpKind::Identity:
            raise = 0;
            break;
        default:
            break;
    }
    if (J >= 0) return SeriesOperator<S>::exponential(u, ExpMode::Nilpotent, J, 0.0);

    const bool condE = profile.k == 1 && profile.tau > 0 && 3.0 * profile.N < profile.tau;
    if (condE) {
        double x = 3.0 * profile.N / profile.tau;
        double lam = x < 0.5 ? opt.lambda : (1.0 - x) / 2.0;
        double q = x / (1.0 - lam);
        int terms = opt.max_terms;
        if (q == 0) {
            terms = 1;
        } else {
            for (int j = 0; j < opt.max_terms; ++j) {
                if (std::pow(q, j + 1) / (1.0 - q) < opt.tail_tol) {
                    terms = j;
                    break;
                }
            }
        }
        return SeriesOperator<S>::exponential(u, ExpMode::ConditionE, std::max(terms, 1), opt.tail_tol);
    }
    if (raise != INT_MIN && raise < 0) {
        if (!opt.override_domain)
            throw PreconditionError(
                "exponential refused: condition (E) fails and the operator lowers the filtration order");
        return SeriesOperator<S>::exponential(u, ExpMode::Override, opt.max_terms, opt.tail_tol);
    }
    return SeriesOperator<S>::exponential(u, ExpMode::FiniteJet, opt.max_terms, opt.tail_tol);
}

template <class S>
ProductResult<S> infinite_product(const std::vector<Derivation<S>>& us, const std::vector<BoundProfile>& profiles,
                                  double s, const TailRule& rule, const ExpOptions& opt) {
    if (us.size() != profiles.size()) throw PreconditionError("infinite_product: one profile per factor required");
    std::vector<double> Ns;
    for (const auto& p : profiles) {
        if (p.k != 1) throw PreconditionError("infinite_product: factors need 1-bound profiles");
        Ns.push_back(p.N);
    }
    ProductResult<S> r;
    r.cert = certify_product(Ns, s, rule);
    std::vector<SeriesOperator<S>> fwd, bwd;
    for (std::size_t n = 0; n < us.size(); ++n) {
        fwd.push_back(exp(SeriesOperator<S>::derivation(us[n]), profiles[n], opt));
        r.partial.push_back(compose_in_order(fwd));
        bwd.push_back(exp(SeriesOperator<S>::derivation(-us[n]), profiles[n], opt));
    }
    r.g = compose_in_order(fwd);
    std::vector<SeriesOperator<S>> rev(bwd.rbegin(), bwd.rend());
    r.h = compose_in_order(rev);
    return r;
}

}  // namespace echelon
