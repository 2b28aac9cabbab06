#include "echelon/operator.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace echelon {

BoundProfile compose_bound(const BoundProfile& p, const BoundProfile& q) {
    int k = p.k + q.k;
    return BoundProfile{k, std::min(p.tau, q.tau), std::ldexp(p.N * q.N, k), p.certified && q.certified};
}

BoundProfile compose_bound(const std::vector<BoundProfile>& ps) {
    if (ps.empty()) throw PreconditionError("compose_bound: empty list");
    int k = 0;
    double tau = std::numeric_limits<double>::infinity(), N = 1;
    bool cert = true;
    for (const auto& p : ps) {
        k += p.k;
        tau = std::min(tau, p.tau);
        N *= p.N;
        cert = cert && p.certified;
    }
    return BoundProfile{k, tau, std::pow(static_cast<double>(ps.size()), k) * N, cert};
}

bool gamma_inequality_check(int n) {
    if (n < 1) throw PreconditionError("gamma_inequality_check: n >= 1 required");
    mpz_class lhs, fact, rhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), 3, static_cast<unsigned long>(n));
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
    lhs *= fact;
    mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n));
    return lhs >= rhs;
}

namespace detail {

double diagonal_gain(int k, double D, double m, double tau) {
    if (k == 0) return 1.0;
    auto f = [&](double sg) { return std::pow(sg, k) * std::pow((tau - sg) / tau, D) * std::exp(-m * sg); };
    if (D == 0 && m == 0) return std::pow(tau, k);
    // log f is concave; its derivative k/sg - D/(tau-sg) - m decreases.
    auto dlog = [&](double sg) { return k / sg - (D > 0 ? D / (tau - sg) : 0.0) - m; };
    if (D == 0 && dlog(tau) >= 0) return f(tau);
    double lo = 0, hi = tau;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (dlog(mid) > 0) lo = mid;
        else hi = mid;
    }
    // Guard against bisection error: the true maximum is at most this.
    return f(0.5 * (lo + hi)) * (1 + 1e-12);
}

}  // namespace detail

ConvergenceCert certify_product(const std::vector<double>& N, double s, const TailRule& rule) {
    ConvergenceCert c;
    c.s = s;
    c.rule = "ratio<=" + std::to_string(rule.q_max) + " over last " + std::to_string(rule.window);
    double acc = 0;
    for (std::size_t n = 0; n < N.size(); ++n) {
        double a = N[n] / s;
        c.ratios.push_back(a);
        acc += a;
        c.partial_sums.push_back(acc);
        if (c.violated_at < 0 && !(3.0 * N[n] < s)) c.violated_at = static_cast<int>(n);
    }
    if (c.violated_at >= 0) {
        c.verdict = Verdict::Diverged;
        return c;
    }
    const int n = static_cast<int>(N.size());
    if (n == 0 || std::all_of(c.ratios.begin(), c.ratios.end(), [](double a) { return a == 0; })) {
        c.verdict = Verdict::Converged;
        c.tail_bound = 0;
        return c;
    }
    if (c.ratios.back() == 0) {
        // Trailing zeros are treated as a finite product.
        c.verdict = Verdict::Converged;
        c.tail_bound = 0;
        return c;
    }
    if (n < 2) return c;
    int w = std::min(rule.window, n - 1);
    double q = 0;
    for (int i = n - 1 - w; i < n - 1; ++i) {
        double a = c.ratios[i], b = c.ratios[i + 1];
        if (a == 0) {
            if (b > 0) q = std::numeric_limits<double>::infinity();
            continue;
        }
        q = std::max(q, b / a);
    }
    if (q <= rule.q_max) {
        c.verdict = Verdict::Converged;
        c.tail_bound = c.ratios.back() * q / (1 - q);
    }
    return c;
}

}  // namespace echelon
