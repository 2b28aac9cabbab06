// Runs the nine acceptance checks and prints one PASS/FAIL line each.
// Exit status is the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "echelon/demos.hpp"
#include "echelon/series_io.hpp"
#include "oracles.hpp"
#include "random_series.hpp"

using namespace echelon;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string list(const std::vector<int>& v) {
    std::ostringstream o;
    o << "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) o << ",";
        if (v[i] == kInfiniteOrder) o << "inf";
        else o << v[i];
    }
    o << "]";
    return o.str();
}

std::vector<int> head(std::vector<int> v, std::size_t n) {
    if (v.size() > n) v.resize(n);
    return v;
}

Outcome order_doubling() {
    auto t0 = std::chrono::steady_clock::now();
    auto one = morse_reduce(morse_cubic_1d<Exact>(32), 3);
    auto two = morse_reduce(morse_cubic_2d<Exact>(32), 3);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::vector<int> want{3, 7, 15};
    auto o1 = one.run.trace.orders_after_steps(), o2 = two.run.trace.orders_after_steps();
    bool ok = secs < 10;
    for (int i = 0; i < 3; ++i) ok = ok && o1[i] >= want[i] && o2[i] >= want[i];
    std::ostringstream d;
    d << "x^2+x^3 " << list(o1) << ", x^2+y^2+x^3 " << list(o2) << ", required >= " << list(want) << ", "
      << secs << " s";
    return {ok, d.str()};
}

double rel_gap(const Series<Complex>& got, const oracle::Poly<Complex>& want) {
    double scale = 1, d = 0;
    for (const auto& [e, c] : want) scale = std::max(scale, std::abs(c));
    for (const auto& [e, c] : want) d = std::max(d, std::abs(got.coeff(MultiIndex::from(e)) - c));
    for (const auto& [a, c] : got.coeffs())
        if (!want.count(a.to_vector())) d = std::max(d, std::abs(c));
    return d / scale;
}

template <class S>
oracle::Poly<S> as_poly(const Series<S>& f) {
    oracle::Poly<S> p;
    for (const auto& [a, v] : f.coeffs()) p[a.to_vector()] = v;
    return p;
}

Outcome siegel_oracle() {
    const int D = 10;
    double worst = 0;
    bool exact_ok = true;
    // float, n = 1 and n = 2
    {
        auto v = siegel_field_1d<Complex>(D);
        auto r = siegel_linearize(v, D, 4);
        auto h = oracle::siegel_conjugacy<Complex>({as_poly(v[0])}, r.lambda, D);
        worst = std::max(worst, rel_gap(r.h[0], h[0]));
    }
    {
        auto v = siegel_field_2d<Complex>(D);
        auto r = siegel_linearize(v, D, 4);
        auto h = oracle::siegel_conjugacy<Complex>({as_poly(v[0]), as_poly(v[1])}, r.lambda, D);
        for (int i = 0; i < 2; ++i) worst = std::max(worst, rel_gap(r.h[i], h[i]));
    }
    // exact, n = 1 (rational) and n = 2 (in Q(sqrt5))
    {
        auto v = siegel_field_1d<Exact>(D);
        auto r = siegel_linearize(v, D, 4);
        auto h = oracle::siegel_conjugacy<Exact>({as_poly(v[0])}, r.lambda, D);
        Series<Exact> want = r.h[0].zero_like();
        for (const auto& [e, c] : h[0]) want.set(MultiIndex::from(e), c);
        exact_ok = exact_ok && want == r.h[0];
    }
    {
        auto v = siegel_field_2d<Exact>(D);
        auto r = siegel_linearize(v, D, 4);
        auto h = oracle::siegel_conjugacy<Exact>({as_poly(v[0]), as_poly(v[1])}, r.lambda, D);
        for (int i = 0; i < 2; ++i) {
            Series<Exact> want = r.h[i].zero_like();
            for (const auto& [e, c] : h[i]) want.set(MultiIndex::from(e), c);
            exact_ok = exact_ok && want == r.h[i];
        }
    }
    std::ostringstream d;
    d << "float max relative gap " << worst << " (tol 1e-10), exact jets identical: " << (exact_ok ? "yes" : "no");
    return {worst <= 1e-10 && exact_ok, d.str()};
}

Outcome homological() {
    const int cutoff = 20;
    std::vector<Exact> lam{1, root_two<Exact>()};
    auto g = small_divisor_series(lam, cutoff);
    const Signature sig{2, 0};
    Series<Exact> a(sig, cutoff), b(sig, cutoff);
    a.set({0, 0}, lam[0]);
    b.set({0, 0}, lam[1]);
    Derivation<Exact> D(std::vector<Series<Exact>>{a, b});
    std::mt19937_64 rng(2024);
    int bad = 0, nonzero = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto f = testing::random_series<Exact>(rng, sig, Truncation::total(sig, cutoff), 15, 10, true);
        nonzero += !f.is_zero();
        bad += !(D.apply(hadamard(f, g)) == f);
    }
    std::ostringstream d;
    d << "100 random zero-mean series (" << nonzero << " nonzero), " << bad << " mismatches";
    return {bad == 0 && nonzero == 100, d.str()};
}

Outcome lemma() {
    int checks = 0, violations = 0;
    std::ostringstream d;
    for (const auto& run : run_demo_suite()) {
        checks += run.trace.lemma_checks();
        violations += run.trace.lemma_violations();
    }
    d << checks << " applicable steps across " << demo_names().size() << " demos, " << violations << " violations";
    return {violations == 0 && checks > 0, d.str()};
}

Outcome operator_calculus() {
    std::mt19937_64 rng(7);
    auto scale = ScaleFamily::majorant();
    int trials = 0, violations = 0;
    for (int p = 0; p < 1000; ++p) {
        auto f = testing::random_series<Complex>(rng, Signature{0, 1}, 12, 8);
        for (double s : {0.1, 0.3, 0.5, 0.7})
            for (double sg : {0.05, 0.1, 0.2}) {
                Series<Complex> dk = f;
                double fact = 1;
                for (int k = 1; k <= 4; ++k) {
                    dk = derive(dk, 0);
                    fact *= k;
                    ++trials;
                    violations += norm_at(dk, scale, s) > fact * std::pow(sg, -k) * norm_at(f, scale, s + sg) * (1 + 1e-12);
                }
            }
    }
    Series<Complex> z(Signature{0, 1}, 10), z2(Signature{0, 1}, 10), c1(Signature{0, 1}, 10), c2(Signature{0, 1}, 10);
    z.set({1}, 1.0);
    z2.set({2}, 1.0);
    c1.set({1}, 1.0);
    c2.set({1}, -0.5);
    double e1 = std::abs(exp(Derivation<Complex>(std::vector<Series<Complex>>{c1}))(z).coeff({1}) - std::exp(1.0));
    double e2 = std::abs(exp(Derivation<Complex>(std::vector<Series<Complex>>{c2}))(z2).coeff({2}) - std::exp(-1.0));
    // exact jets must give the identity exactly; in float the defect is
    // roundoff times the coefficient growth of exp(u), so u is kept at unit scale
    int exact_bad = 0;
    for (int t = 0; t < 50; ++t) {
        auto c = testing::random_series<Exact>(rng, Signature{0, 1}, 10, 4).filter(
            [](const MultiIndex& a) { return a[0] >= 2; });
        Derivation<Exact> u(std::vector<Series<Exact>>{c});
        auto x = testing::random_series<Exact>(rng, Signature{0, 1}, 10, 8);
        exact_bad += !(exp(-u)(exp(u)(x)) == x);
    }
    double id = 0, growth = 0;
    for (int t = 0; t < 50; ++t) {
        auto c = testing::random_series<Complex>(rng, Signature{0, 1}, 10, 4)
                     .filter([](const MultiIndex& a) { return a[0] >= 2; })
                     .map([](const MultiIndex&, const Complex& v) { return 0.25 * v; });
        Derivation<Complex> u(std::vector<Series<Complex>>{c});
        auto x = testing::random_series<Complex>(rng, Signature{0, 1}, 10, 8);
        auto y = exp(u)(x);
        growth = std::max(growth, max_abs(y) / max_abs(x));
        id = std::max(id, relative_distance(exp(-u)(y), x));
    }
    std::ostringstream d;
    d << "Cauchy " << violations << "/" << trials << " violations; |exp(z d)z - e z| " << e1
      << "; |exp(-(z/2)d)z^2 - z^2/e| " << e2 << "; exp(u)exp(-u): exact " << exact_bad << "/50 mismatches, float defect "
      << id << " (max growth " << growth << ")";
    return {violations == 0 && e1 <= 1e-12 && e2 <= 1e-12 && exact_bad == 0 && id <= 1e-12, d.str()};
}

Outcome product() {
    auto g = product_demo(false);
    auto h = product_demo(true);
    bool ok = g.cert.verdict == Verdict::Converged && g.increments_decreasing && g.worst_cauchy_ratio <= 1.0 &&
              g.identity_defect <= 1e-12 && h.cert.verdict != Verdict::Converged;
    std::ostringstream d;
    d << "geometric: " << verdict_name(g.cert.verdict) << ", increments decreasing " << (g.increments_decreasing ? "yes" : "no")
      << ", worst |g_m-g_n|/bound " << g.worst_cauchy_ratio << ", |gh-Id| " << g.identity_defect
      << "; harmonic: " << verdict_name(h.cert.verdict);
    return {ok, d.str()};
}

Outcome kam() {
    auto H = kam_golden_hamiltonian<Exact>(16, false);
    auto thirds = kam_transversal_step(H, 4, 10, Schedule::thirds(0.05), true);
    auto halving = kam_transversal_step(H, 4, 10, Schedule::halving(0.05), true);
    auto o = thirds.run.trace.complement_after_steps();
    bool ok = o.size() == 4;
    for (int n = 1; n <= 4 && ok; ++n) ok = o[n - 1] >= (1 << n);
    bool same = thirds.run.alpha_total == halving.run.alpha_total;
    std::ostringstream d;
    d << "complement t-orders " << list(o) << " vs 2^n, alpha_total schedule-independent: " << (same ? "yes" : "no");
    return {ok && same, d.str()};
}

Outcome strategies() {
    auto k = morse_reduce(morse_cubic_1d<Exact>(32), 4);
    auto p = morse_reduce(morse_cubic_1d<Exact>(16), 4, Strategy::Picard);
    auto ok_ = head(k.run.trace.orders_after_steps(), 4), op = head(p.run.trace.orders_after_steps(), 4);
    bool ok = true;
    std::vector<int> wk, wp;
    for (int n = 1; n <= 4; ++n) {
        wk.push_back((1 << (n + 1)) - 1);
        wp.push_back(n + 2);
        ok = ok && ok_[n - 1] == wk.back() && op[n - 1] == wp.back();
    }
    std::ostringstream d;
    d << "kolmogorov " << list(ok_) << " vs " << list(wk) << ", picard " << list(op) << " vs " << list(wp);
    return {ok, d.str()};
}

Outcome diophantine() {
    auto r = min_small_divisor(std::vector<Exact>{1, 1}, 1, 10);
    bool a = r.resonant && !r.pass && r.witness == MultiIndex{1, -1};
    // (2,-1) is itself resonant; C is read as the minimum over nonzero divisors.
    auto i = min_small_divisor(std::vector<Exact>{1, 2}, 0, 10);
    bool b = i.C_nonresonant == 1.0;
    bool c = true;
    for (const auto& lam : {std::vector<Exact>{1, 3}, std::vector<Exact>{Exact(mpq_class(2, 3)), Exact(mpq_class(5, 7))},
                            std::vector<Exact>{1, golden<Exact>()}}) {
        auto base = min_small_divisor(lam, 1, 12);
        for (const Exact& k : {Exact(2), Exact(mpq_class(-3, 5)), Exact(Surd(0), Surd(7))}) {
            std::vector<Exact> sc;
            for (const auto& l : lam) sc.push_back(k * l);
            auto s = min_small_divisor(sc, 1, 12);
            bool same_divisor = base.resonant ? s.divisor == Exact(0) : s.divisor == k * base.divisor;
            c = c && s.witness == base.witness && s.resonant == base.resonant && same_divisor &&
                std::abs(s.C - k.abs() * base.C) <= 1e-12 * s.C;
        }
    }
    std::ostringstream d;
    d << "(1,1) resonant at " << r.witness.str() << ": " << (a ? "yes" : "no") << "; (1,2) tau=0 nonresonant min "
      << i.C_nonresonant << " (resonant at " << i.witness.str() << "); scale invariance " << (c ? "holds" : "fails");
    return {a && b && c, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"order doubling", order_doubling},
        {"linearization oracle", siegel_oracle},
        {"homological identity", homological},
        {"lemma compliance", lemma},
        {"operator calculus", operator_calculus},
        {"infinite product", product},
        {"transversal step", kam},
        {"strategy comparison", strategies},
        {"diophantine scan", diophantine},
    };
    int failed = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome o;
        try {
            o = checks[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
    return failed;
}
