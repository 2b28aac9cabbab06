#include "echelon/demos.hpp"

#include <functional>
#include <map>

#include "echelon/series_io.hpp"

namespace echelon {

namespace {

Json orders_json(const std::vector<int>& v) {
    Json a = Json::array();
    for (int o : v) {
        if (o == kInfiniteOrder) a.push_back(nullptr);
        else a.push_back(o);
    }
    return a;
}

template <class S>
DemoRun morse_demo(const std::string& name, const Series<S>& f, int steps, Strategy st) {
    auto r = morse_reduce(f, steps, st);
    DemoRun d{name, ScalarTraits<S>::name, r.run.trace, {}};
    d.summary["orders"] = orders_json(r.run.trace.orders_after_steps());
    Json psi = Json::array();
    for (const auto& p : r.psi) psi.push_back(series_to_json(p));
    d.summary["psi"] = psi;
    return d;
}

template <class S>
DemoRun siegel_demo(const std::string& name, const Derivation<S>& v, int cutoff, int steps) {
    auto r = siegel_linearize(v, cutoff, steps);
    DemoRun d{name, ScalarTraits<S>::name, r.run.trace, {}};
    d.summary["orders"] = orders_json(r.run.trace.orders_after_steps());
    d.summary["poincare"] = r.poincare;
    d.summary["min_divisor"] = r.min_divisor;
    double defect = 0;
    for (const auto& c : siegel_defect(v, r.lambda, r.h)) {
        auto low = c.filter([cutoff](const MultiIndex& a) { return total_degree(a) <= cutoff; });
        defect = std::max(defect, max_abs(low));
    }
    d.summary["defect"] = defect;
    return d;
}

template <class S>
DemoRun kam_demo(const std::string& name, const Series<S>& H, int steps, int cutoff) {
    auto r = kam_transversal_step(H, steps, cutoff, Schedule::thirds(0.05), true);
    DemoRun d{name, ScalarTraits<S>::name, r.run.trace, {}};
    d.summary["complement_t_orders"] = orders_json(r.run.trace.complement_after_steps());
    d.summary["diophantine"] = diophantine_to_json(r.cert, r.lambda);
    d.summary["reality_preserved"] = r.reality_preserved;
    d.summary["normal_form_terms"] = r.normal_form.size();
    return d;
}

template <class S>
DemoRun singular_demo(const std::string& name, const Series<S>& H, int steps) {
    auto r = singular_kam_step(H, steps);
    DemoRun d{name, ScalarTraits<S>::name, r.run.trace, {}};
    d.summary["complement_orders"] = orders_json(r.run.trace.complement_after_steps());
    d.summary["residual_in_I2"] = r.residual_in_I2;
    return d;
}

const std::map<std::string, std::function<DemoRun()>>& registry() {
    static const std::map<std::string, std::function<DemoRun()>> r = {
        {"morse-1d", [] { return morse_demo("morse-1d", morse_cubic_1d<Exact>(32), 5, Strategy::Kolmogorov); }},
        {"morse-1d-float", [] { return morse_demo("morse-1d-float", morse_cubic_1d<Complex>(24), 4, Strategy::Kolmogorov); }},
        {"morse-1d-picard", [] { return morse_demo("morse-1d-picard", morse_cubic_1d<Exact>(16), 5, Strategy::Picard); }},
        {"morse-1d-newton", [] { return morse_demo("morse-1d-newton", morse_cubic_1d<Exact>(32), 4, Strategy::Newton); }},
        {"morse-2d", [] { return morse_demo("morse-2d", morse_cubic_2d<Exact>(20), 4, Strategy::Kolmogorov); }},
        {"siegel-1d", [] { return siegel_demo("siegel-1d", siegel_field_1d<Exact>(10), 10, 4); }},
        {"siegel-2d", [] { return siegel_demo("siegel-2d", siegel_field_2d<Complex>(10), 10, 4); }},
        {"kam-golden", [] { return kam_demo("kam-golden", kam_golden_hamiltonian<Exact>(16, false), 4, 10); }},
        {"kam-golden-twist", [] { return kam_demo("kam-golden-twist", kam_golden_hamiltonian<Complex>(6, true), 3, 10); }},
        {"singular-kam", [] { return singular_demo("singular-kam", singular_hamiltonian<Exact>(12), 4); }},
    };
    return r;
}

// Induced norm of A - B from E_s to E_s2 over the monomial basis.
double difference_norm(const SeriesOperator<Complex>& A, const SeriesOperator<Complex>& B, const Series<Complex>& proto,
                       const std::vector<MultiIndex>& basis, const ScaleFamily& scale, double s, double s2) {
    double best = 0;
    for (const auto& a : basis) {
        auto e = proto.monomial_like(a, 1.0);
        best = std::max(best, norm_at(A(e) - B(e), scale, s2) / norm_at(e, scale, s));
    }
    return best;
}

}  // namespace

ProductDemo product_demo(bool harmonic, int count, double amp, int cap) {
    if (count < 2) throw PreconditionError("product_demo: count >= 2 required");
    ProductDemo d;
    d.sequence = harmonic ? "harmonic" : "geometric";
    const auto scale = ScaleFamily::majorant();
    const Signature sig{0, 1};
    Series<Complex> proto(sig, cap);
    std::vector<Derivation<Complex>> us;
    std::vector<BoundProfile> profiles;
    auto bound_at = [&](const Derivation<Complex>& u, double tau) {
        return *analytic_bound(SeriesOperator<Complex>::derivation(u), 1, tau, scale, sig, proto.truncation());
    };
    double worst = 0;
    for (int n = 0; n < count; ++n) {
        double ratio = harmonic ? amp / (n + 1) : std::pow(4.0, -(n + 2));
        // N^1_s(c z^2 d/dz) = |c| s^2
        Derivation<Complex> u(proto);
        u.component(0).set({2}, ratio / d.s);
        profiles.push_back(bound_at(u, d.s));
        d.N_s.push_back(profiles.back().N);
        worst = std::max(worst, d.N_s.back() / d.s);
        us.push_back(u);
    }
    // lambda, mu with sup 3N/((1-lambda)s) < 1 and sup 3N_{lambda s}/((1-mu) lambda s) < 1
    d.lambda = std::min(0.5, (1.0 - 3.0 * worst) / 2.0);
    if (!(d.lambda > 0)) throw PreconditionError("product_demo: condition (E) fails for the sequence");
    worst = 0;
    for (const auto& u : us) {
        d.N_ls.push_back(bound_at(u, d.lambda * d.s).N);
        worst = std::max(worst, d.N_ls.back() / (d.lambda * d.s));
    }
    d.mu = std::min(0.5, (1.0 - 3.0 * worst) / 2.0);
    auto r = infinite_product(us, profiles, d.s);
    d.cert = r.cert;

    double C = 1;
    for (double N : d.N_s) C /= 1.0 - 3.0 * N / ((1.0 - d.lambda) * d.s);
    for (double N : d.N_ls) d.K = std::max(d.K, 3.0 * C / (1.0 - d.mu - 3.0 * N / (d.lambda * d.s)));

    std::vector<MultiIndex> basis;
    for (int k = 0; k <= cap; ++k) basis.push_back(MultiIndex{k});
    const double s2 = d.lambda * d.mu * d.s;
    for (int n = 1; n < count; ++n)
        d.increments.push_back(difference_norm(r.partial[n], r.partial[n - 1], proto, basis, scale, d.s, s2));
    d.increments_decreasing = true;
    for (std::size_t i = 1; i < d.increments.size(); ++i)
        d.increments_decreasing = d.increments_decreasing && d.increments[i] < d.increments[i - 1];
    for (int n = 0; n < count; ++n) {
        double bound = 0;
        for (int m = n + 1; m < count; ++m) {
            bound += d.K * d.N_ls[m] / (d.lambda * d.s);
            double meas = difference_norm(r.partial[m], r.partial[n], proto, basis, scale, d.s, s2);
            d.worst_cauchy_ratio = std::max(d.worst_cauchy_ratio, meas / bound);
        }
    }
    auto gh = SeriesOperator<Complex>::composite({r.g, r.h});
    for (const auto& a : basis) {
        auto e = proto.monomial_like(a, 1.0);
        d.identity_defect = std::max(d.identity_defect, max_abs(gh(e) - e));
    }
    return d;
}

Json product_demo_json(const ProductDemo& d) {
    Json j;
    j["sequence"] = d.sequence;
    j["s"] = d.s;
    j["lambda"] = d.lambda;
    j["mu"] = d.mu;
    j["certificate"] = convergence_to_json(d.cert);
    j["N_s"] = d.N_s;
    j["K"] = d.K;
    j["increments"] = d.increments;
    j["worst_cauchy_ratio"] = d.worst_cauchy_ratio;
    j["increments_decreasing"] = d.increments_decreasing;
    j["identity_defect"] = d.identity_defect;
    return j;
}

std::vector<std::string> demo_names() {
    std::vector<std::string> v;
    for (const auto& [k, f] : registry()) v.push_back(k);
    return v;
}

DemoRun run_demo(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw ParseError("unknown demo '" + name + "'");
    return it->second();
}

std::vector<DemoRun> run_demo_suite() {
    std::vector<DemoRun> out;
    for (const auto& [k, f] : registry()) out.push_back(f());
    return out;
}

}  // namespace echelon
