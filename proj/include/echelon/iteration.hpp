#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "echelon/derivation.hpp"
#include "echelon/operator.hpp"

namespace echelon {

enum class ScheduleRule { Halving, Thirds };

// Scale bookkeeping of the convergence proofs.
//  Halving: sigma_n = 0 for n <= k, s/2^(n-k+1) after; s_{n+1} = s_n - 2 sigma_n, s_0 = 2s.
//  Thirds:  sigma_n = 0 for n <= k+l, s/3^(n-k-l) after; s_{n+1} = s_n - 3 sigma_n, s_0 = 5s/2.
struct Schedule {
    double s = 0.05;
    int k = 0;
    int l = 0;
    ScheduleRule rule = ScheduleRule::Halving;

    static Schedule halving(double s, int k = 0) { return {s, k, 0, ScheduleRule::Halving}; }
    static Schedule thirds(double s, int k = 0, int l = 0) { return {s, k, l, ScheduleRule::Thirds}; }

    const char* name() const { return rule == ScheduleRule::Halving ? "halving" : "thirds"; }
    double loss() const { return rule == ScheduleRule::Halving ? 2.0 : 3.0; }
    double s0() const { return rule == ScheduleRule::Halving ? 2.0 * s : 2.5 * s; }
    int idle() const { return rule == ScheduleRule::Halving ? k : k + l; }

    double sigma_at(int n) const {
        if (n <= idle()) return 0.0;
        return rule == ScheduleRule::Halving ? s / std::ldexp(1.0, n - k + 1) : s / std::pow(3.0, n - k - l);
    }
    double s_at(int n) const {
        double v = s0();
        for (int i = 0; i < n; ++i) v -= loss() * sigma_at(i);
        return v;
    }
};

// Lemma bounds: |(e^{-u}(Id+u)-Id) a|_s <= 36 C N^2/(tau-s)^2 and
// |(e^{-u}-Id) alpha|_s <= 6 C |alpha|_tau N/(tau-s), both under
// 3N/(tau-s) <= 1/2.
struct ResidualBound {
    bool applicable = false;
    double quadratic = 0;     // 36 C N^2 / (tau-s)^2
    double alpha_factor = 0;  // 6 N / (tau-s); multiply by C |alpha|_tau
};

ResidualBound residual_bound(double C, double tau, double s, double N);

struct TraceRow {
    int n = 0;
    double s_n = 0;
    double sigma_n = 0;
    double residual_norm = 0;  // |b_n|_{s_n}
    double u_bound = 0;        // N^1_{s_n}(u_n)
    bool u_certified = false;
    int residual_order = kInfiniteOrder;
    int aux_order = kInfiniteOrder;         // e.g. t-order of b_n
    int complement_order = kInfiniteOrder;  // transversal: order of b_n outside F
    int complement_aux_order = kInfiniteOrder;
    double alpha_norm = std::numeric_limits<double>::quiet_NaN();
    // lemma annotation for the passage b_n -> b_{n+1}
    bool lemma_applicable = false;
    double lemma_C = 0;
    double lemma_predicted = 0;
    double lemma_measured = 0;
    bool lemma_ok = true;
    // induction inequality N^1_{s_n}(u_n) <= m sigma_{n+1}^{k+2}, n > idle
    bool induction_checked = false;
    bool induction_ok = false;
};

struct IterationTrace {
    std::string strategy;
    std::string problem;
    std::string scale;
    std::string schedule;
    double m = 0;
    bool smallness_held = false;  // entry condition of the proof, reported only
    bool early_exit = false;
    int steps_executed = 0;
    int final_order = kInfiniteOrder;  // order of the residual after the last step
    int final_aux_order = kInfiniteOrder;
    int final_complement_order = kInfiniteOrder;
    int final_complement_aux_order = kInfiniteOrder;
    double final_norm = 0;
    std::vector<TraceRow> rows;

    int lemma_violations() const {
        int v = 0;
        for (const auto& r : rows) v += r.lemma_applicable && !r.lemma_ok;
        return v;
    }
    int lemma_checks() const {
        int v = 0;
        for (const auto& r : rows) v += r.lemma_applicable;
        return v;
    }
    // Orders of b_1, b_2, ... (residual after 1, 2, ... steps).
    std::vector<int> orders_after_steps() const {
        std::vector<int> o;
        for (std::size_t i = 1; i < rows.size(); ++i) o.push_back(rows[i].residual_order);
        if (!rows.empty()) o.push_back(final_order);
        return o;
    }
    std::vector<int> complement_after_steps() const {
        std::vector<int> o;
        for (std::size_t i = 1; i < rows.size(); ++i) o.push_back(rows[i].complement_order);
        if (!rows.empty()) o.push_back(final_complement_order);
        return o;
    }
    std::vector<int> complement_aux_after_steps() const {
        std::vector<int> o;
        for (std::size_t i = 1; i < rows.size(); ++i) o.push_back(rows[i].complement_aux_order);
        if (!rows.empty()) o.push_back(final_complement_aux_order);
        return o;
    }
};

// Group action of exp(g) on a point space P (function jets or vector-field
// jets), with a right inverse of the infinitesimal action at the base point.
template <class S, class P>
struct ActionProblem {
    std::string name;
    P base;
    ScaleFamily scale;
    // e^u . x
    std::function<P(const Derivation<S>&, const P&)> act;
    // u . x, derivative of the action at the identity
    std::function<P(const Derivation<S>&, const P&)> infinitesimal;
    // j: residual -> correction with infinitesimal(j(b), base) = b
    std::function<Derivation<S>(const P&)> inverse_j;
    // inverse of u -> infinitesimal(u, y) at another point y (Newton)
    std::function<Derivation<S>(const P& y, const P& r)> rebased_inverse;
    // transversal data: split x = (F-part, complement); j(alpha) at a+alpha
    std::function<std::pair<P, P>(const P&)> split;
    std::function<Derivation<S>(const P& at, const P& r)> inverse_at;
    // transform built from the generators, in the order they were produced
    std::function<SeriesOperator<S>(const std::vector<Derivation<S>>&)> compose;
    // measurements
    std::function<double(const P&, double)> norm;
    std::function<int(const P&)> order;
    std::function<int(const P&)> aux_order;
    std::function<double(const Derivation<S>&, double)> generator_bound;
    // action constant C at scale tau (natural action: |a|_tau)
    std::function<double(const P&, double)> action_constant;
    // certified bound profile of j (k-bounded with constant N)
    BoundProfile j_profile{0, 1.0, 1.0, false};
};

enum class IterationForm { TwoSequence, SingleSequence };

template <class S, class P>
struct IterationResult {
    SeriesOperator<S> transform;
    std::vector<Derivation<S>> generators;
    P residual;      // b after the last step
    P base;          // a_N (transversal) or a
    P alpha_total;   // sum of alpha_n (transversal)
    std::vector<P> alphas;
    IterationTrace trace;
};

namespace detail {

template <class S, class P>
void fill_measure(const ActionProblem<S, P>& p, const P& b, double s, TraceRow& row) {
    row.residual_norm = s > 0 ? p.norm(b, s) : 0.0;
    row.residual_order = p.order(b);
    if (p.aux_order) row.aux_order = p.aux_order(b);
    if (p.split) {
        auto c = p.split(b).second;
        row.complement_order = p.order(c);
        if (p.aux_order) row.complement_aux_order = p.aux_order(c);
    }
}

template <class S, class P>
void finish(const ActionProblem<S, P>& p, const P& b, double s, IterationTrace& t) {
    t.final_norm = s > 0 ? p.norm(b, s) : 0.0;
    t.final_order = p.order(b);
    if (p.aux_order) t.final_aux_order = p.aux_order(b);
    if (p.split) {
        auto c = p.split(b).second;
        t.final_complement_order = p.order(c);
        if (p.aux_order) t.final_complement_aux_order = p.aux_order(c);
    }
}

template <class S, class P>
double m_constant(const ActionProblem<S, P>& p, const Schedule& sched) {
    double C = p.action_constant ? p.action_constant(p.base, sched.s0()) : 1.0;
    double Nj = p.j_profile.N;
    double m = 1.0;
    if (C > 0 && Nj > 0) m = std::min(1.0, 1.0 / (36.0 * C * Nj));
    return m;
}

template <class S, class P>
void annotate(const ActionProblem<S, P>& p, const Schedule& sched, double m, int n, const Derivation<S>& u,
              const P& at, const P* alpha, const P& next, TraceRow& row) {
    const double tau = row.s_n, sg = row.sigma_n;
    row.u_bound = p.generator_bound ? p.generator_bound(u, tau) : 0.0;
    row.u_certified = static_cast<bool>(p.generator_bound);
    if (n > sched.idle()) {
        row.induction_checked = true;
        row.induction_ok = row.u_bound <= m * std::pow(sched.sigma_at(n + 1), sched.k + 2);
    }
    if (!(sg > 0) || !p.generator_bound) return;
    const double s = tau - sg;
    double C = p.action_constant ? p.action_constant(at, tau) : 1.0;
    ResidualBound rb = residual_bound(C, tau, s, row.u_bound);
    if (!rb.applicable) return;
    row.lemma_applicable = true;
    row.lemma_C = C;
    row.lemma_predicted = rb.quadratic;
    if (alpha) row.lemma_predicted += rb.alpha_factor * p.norm(*alpha, tau);
    row.lemma_measured = p.norm(next, s);
    // Float residues cannot drop below roundoff of the point itself.
    double floor = ScalarTraits<S>::exact ? 1e-300 : 64 * std::numeric_limits<double>::epsilon() * C;
    row.lemma_ok = row.lemma_measured <= row.lemma_predicted * (1 + 1e-12) + floor;
}

}  // namespace detail

// b_{n+1} = e^{-u_n}(a + b_n) - a, u_{n+1} = j(b_{n+1}).
template <class S, class P>
IterationResult<S, P> kolmogorov_iterate(const ActionProblem<S, P>& p, const P& b0, int steps, const Schedule& sched,
                                         IterationForm form = IterationForm::TwoSequence) {
    if (steps < 0) throw PreconditionError("steps must be nonnegative");
    IterationResult<S, P> res;
    auto& t = res.trace;
    t.strategy = form == IterationForm::TwoSequence ? "kolmogorov" : "kolmogorov-single";
    t.problem = p.name;
    t.scale = p.scale.name();
    t.schedule = sched.name();
    t.m = detail::m_constant(p, sched);
    P b = b0;
    Derivation<S> u_prev;
    for (int n = 0; n < steps; ++n) {
        TraceRow row;
        row.n = n;
        row.s_n = sched.s_at(n);
        row.sigma_n = sched.sigma_at(n);
        Derivation<S> u;
        if (form == IterationForm::SingleSequence && n > 0) {
            // u_n = j(e^{-u_{n-1}}(a + u_{n-1} a) - a)
            P x = p.act(-u_prev, p.base + p.infinitesimal(u_prev, p.base)) - p.base;
            u = p.inverse_j(x);
            b = x;
        }
        detail::fill_measure(p, b, row.s_n, row);
        if (b.is_zero()) {
            t.rows.push_back(row);
            t.early_exit = true;
            break;
        }
        if (form == IterationForm::TwoSequence || n == 0) u = p.inverse_j(b);
        P next = p.act(-u, p.base + b) - p.base;
        detail::annotate(p, sched, t.m, n, u, p.base, static_cast<const P*>(nullptr), next, row);
        if (n == sched.idle() + 1) t.smallness_held = row.induction_ok;
        t.rows.push_back(row);
        res.generators.push_back(u);
        u_prev = u;
        b = std::move(next);
        ++t.steps_executed;
    }
    detail::finish(p, b, sched.s_at(t.steps_executed), t);
    res.residual = b;
    res.base = p.base;
    res.transform = p.compose(res.generators);
    return res;
}

// Newton: each correction solves the linearized equation at the current
// point y_n = a + b_n, then y_{n+1} = e^{-u_n} y_n.
template <class S, class P>
IterationResult<S, P> newton_iterate(const ActionProblem<S, P>& p, const P& b0, int steps, const Schedule& sched) {
    if (!p.rebased_inverse)
        throw PreconditionError("newton: problem '" + p.name + "' provides no re-based inverse");
    IterationResult<S, P> res;
    auto& t = res.trace;
    t.strategy = "newton";
    t.problem = p.name;
    t.scale = p.scale.name();
    t.schedule = sched.name();
    t.m = detail::m_constant(p, sched);
    P b = b0;
    for (int n = 0; n < steps; ++n) {
        TraceRow row;
        row.n = n;
        row.s_n = sched.s_at(n);
        row.sigma_n = sched.sigma_at(n);
        detail::fill_measure(p, b, row.s_n, row);
        if (b.is_zero()) {
            t.rows.push_back(row);
            t.early_exit = true;
            break;
        }
        P y = p.base + b;
        Derivation<S> u = p.rebased_inverse(y, b);
        if (p.generator_bound) row.u_bound = p.generator_bound(u, row.s_n);
        row.u_certified = static_cast<bool>(p.generator_bound);
        t.rows.push_back(row);
        res.generators.push_back(u);
        b = p.act(-u, y) - p.base;
        ++t.steps_executed;
    }
    detail::finish(p, b, sched.s_at(t.steps_executed), t);
    res.residual = b;
    res.base = p.base;
    res.transform = p.compose(res.generators);
    return res;
}

// Picard: one generator w, corrected additively by j of the current
// residual; the transform is the single exponential of w.
template <class S, class P>
IterationResult<S, P> picard_iterate(const ActionProblem<S, P>& p, const P& b0, int steps, const Schedule& sched) {
    IterationResult<S, P> res;
    auto& t = res.trace;
    t.strategy = "picard";
    t.problem = p.name;
    t.scale = p.scale.name();
    t.schedule = sched.name();
    t.m = detail::m_constant(p, sched);
    P b = b0;
    Derivation<S> w;
    bool have_w = false;
    for (int n = 0; n < steps; ++n) {
        TraceRow row;
        row.n = n;
        row.s_n = sched.s_at(n);
        row.sigma_n = sched.sigma_at(n);
        detail::fill_measure(p, b, row.s_n, row);
        if (b.is_zero()) {
            t.rows.push_back(row);
            t.early_exit = true;
            break;
        }
        Derivation<S> d = p.inverse_j(b);
        w = have_w ? w + d : d;
        have_w = true;
        if (p.generator_bound) row.u_bound = p.generator_bound(d, row.s_n);
        row.u_certified = static_cast<bool>(p.generator_bound);
        t.rows.push_back(row);
        b = p.act(-w, p.base + b0) - p.base;
        ++t.steps_executed;
    }
    detail::finish(p, b, sched.s_at(t.steps_executed), t);
    res.residual = b;
    res.base = p.base;
    if (have_w) res.generators.push_back(w);
    res.transform = p.compose(res.generators);
    return res;
}

// a_{n+1} = a_n + alpha_n, b_{n+1} = e^{-u_n}(a_n + b_n) - a_{n+1},
// u_{n+1} = j(a_{n+1}) b_{n+1}, alpha_n = b_n - u_n a_n; u_0 = j(a) b.
template <class S, class P>
IterationResult<S, P> transversal_iterate(const ActionProblem<S, P>& p, const P& b0, int steps,
                                          const Schedule& sched) {
    if (!p.split || !p.inverse_at) throw PreconditionError("transversal: problem has no transversal projector");
    IterationResult<S, P> res;
    auto& t = res.trace;
    t.strategy = "transversal";
    t.problem = p.name;
    t.scale = p.scale.name();
    t.schedule = sched.name();
    t.m = detail::m_constant(p, sched);
    P a = p.base;
    P b = b0;
    P alpha_total = b0 - b0;
    for (int n = 0; n < steps; ++n) {
        TraceRow row;
        row.n = n;
        row.s_n = sched.s_at(n);
        row.sigma_n = sched.sigma_at(n);
        detail::fill_measure(p, b, row.s_n, row);
        if (b.is_zero()) {
            t.rows.push_back(row);
            t.early_exit = true;
            break;
        }
        Derivation<S> u = p.inverse_at(a, b);
        P alpha = b - p.infinitesimal(u, a);
        row.alpha_norm = row.s_n > 0 ? p.norm(alpha, row.s_n) : 0.0;
        P a_next = a + alpha;
        P next = p.act(-u, a + b) - a_next;
        detail::annotate(p, sched, t.m, n, u, a, &alpha, next, row);
        if (n == sched.idle() + 1) t.smallness_held = row.induction_ok;
        t.rows.push_back(row);
        res.generators.push_back(u);
        res.alphas.push_back(alpha);
        alpha_total = alpha_total + alpha;
        a = std::move(a_next);
        b = std::move(next);
        ++t.steps_executed;
    }
    detail::finish(p, b, sched.s_at(t.steps_executed), t);
    res.residual = b;
    res.base = a;
    res.alpha_total = alpha_total;
    res.transform = p.compose(res.generators);
    return res;
}

}  // namespace echelon
