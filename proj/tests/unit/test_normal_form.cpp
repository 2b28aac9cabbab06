#include <cmath>

#include "doctest.h"
#include "echelon/demos.hpp"
#include "echelon/normal_form.hpp"
#include "oracles.hpp"

using namespace echelon;

namespace {

std::vector<int> orders(const IterationTrace& t) { return t.orders_after_steps(); }

oracle::Poly<Complex> to_poly(const Series<Complex>& f) {
    oracle::Poly<Complex> p;
    for (const auto& [a, v] : f.coeffs()) p[a.to_vector()] = v;
    return p;
}

oracle::Poly<Exact> to_poly(const Series<Exact>& f) {
    oracle::Poly<Exact> p;
    for (const auto& [a, v] : f.coeffs()) p[a.to_vector()] = v;
    return p;
}

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("Morse residual orders") {
    auto k = morse_reduce(morse_cubic_1d<Exact>(32), 5);
    CHECK(orders(k.run.trace) == std::vector<int>{4, 6, 10, 18, kInfiniteOrder});
    auto n = morse_reduce(morse_cubic_1d<Exact>(32), 4, Strategy::Newton);
    CHECK(orders(n.run.trace) == std::vector<int>{4, 6, 10, 18});
    auto single = morse_reduce(morse_cubic_1d<Exact>(32), 4, Strategy::KolmogorovSingle);
    CHECK(orders(single.run.trace) == std::vector<int>{4, 6, 10, 18});
    // Picard gains one degree per step: ord(b_n) = n + 3
    auto p = morse_reduce(morse_cubic_1d<Exact>(16), 5, Strategy::Picard);
    CHECK(orders(p.run.trace) == std::vector<int>{4, 5, 6, 7, 8});
    // every order strictly increases
    for (const auto* r : {&k, &n, &single, &p}) {
        auto o = orders(r->run.trace);
        for (std::size_t i = 1; i < o.size(); ++i) CHECK(o[i] > o[i - 1]);
    }
}

TEST_CASE("Newton and Kolmogorov produce the same orders") {
    auto k = morse_reduce(morse_cubic_2d<Exact>(14), 3);
    auto n = morse_reduce(morse_cubic_2d<Exact>(14), 3, Strategy::Newton);
    CHECK(orders(k.run.trace) == orders(n.run.trace));
}

TEST_CASE("Morse coordinate change against x sqrt(1+x)") {
    const int cap = 24;
    auto r = morse_reduce(morse_cubic_1d<Exact>(cap), 5);
    REQUIRE(r.run.trace.final_order == kInfiniteOrder);
    auto oc = oracle::x_sqrt_one_plus_x(cap);
    const auto& phi = r.phi[0];
    for (int d = 0; d < cap; ++d) CHECK(phi.coeff({d}) == Exact(oc[d]));
    // f(psi) = x^2 below the cap
    auto f = morse_cubic_1d<Exact>(cap);
    auto fpsi = substitute(f, r.psi).filter([cap](const MultiIndex& a) { return total_degree(a) < cap; });
    auto Q = f.monomial_like({2}, Exact(1));
    CHECK(fpsi == Q);
    // float mode agrees to roundoff
    auto rf = morse_reduce(morse_cubic_1d<Complex>(cap), 5);
    for (int d = 0; d < cap; ++d) CHECK(std::abs(rf.phi[0].coeff({d}) - oc[d].get_d()) < 1e-8);
}

TEST_CASE("already quadratic") {
    Series<Exact> f(Signature{0, 1}, 10);
    f.set({2}, 1);
    auto r = morse_reduce(f, 3);
    for (const auto& u : r.run.generators) CHECK(u.is_zero());
    CHECK(r.psi[0] == f.monomial_like({1}, Exact(1)));
    CHECK(r.run.trace.final_order == kInfiniteOrder);
}

TEST_CASE("two-dimensional Morse") {
    // same orders as in one variable: the y^2 direction carries no residual
    auto r = morse_reduce(morse_cubic_2d<Exact>(20), 2);
    CHECK(orders(r.run.trace) == std::vector<int>{4, 6});
    auto f = morse_cubic_2d<Exact>(20);
    Series<Exact> Q(Signature{0, 2}, 20);
    Q.set({2, 0}, 1);
    Q.set({0, 2}, 1);
    auto full = morse_reduce(f, 5);
    REQUIRE(full.run.trace.final_order > 20);
    auto fpsi = substitute(f, full.psi).filter([](const MultiIndex& a) { return total_degree(a) < 20; });
    CHECK(fpsi == Q);
}

TEST_CASE("degenerate Hessian") {
    Series<Exact> f(Signature{0, 2}, 6);
    f.set({2, 0}, 1);
    f.set({0, 3}, 1);
    CHECK_THROWS_AS(morse_reduce(f, 2), PreconditionError);
}

TEST_CASE("Siegel 1-d against the oracle") {
    const int D = 10;
    auto r = siegel_linearize(siegel_field_1d<Exact>(D), D, 4);
    CHECK(r.poincare);
    CHECK(r.run.trace.final_order == kInfiniteOrder);
    auto v = siegel_field_1d<Exact>(D);
    oracle::Poly<Exact> nl;
    nl[{2}] = Exact(1);
    nl[{1}] = Exact(1);
    auto h = oracle::siegel_conjugacy<Exact>({nl}, {Exact(1)}, D);
    // the conjugacy of z + z^2 is w/(1-w)
    for (int d = 1; d <= D; ++d) {
        CHECK(r.h[0].coeff({d}) == h[0][{d}]);
        CHECK(h[0][{d}] == Exact(1));
    }
    for (const auto& c : siegel_defect(v, r.lambda, r.h))
        CHECK(c.filter([D](const MultiIndex& a) { return total_degree(a) <= D; }).is_zero());
}

TEST_CASE("Siegel 2-d against the oracle") {
    const int D = 8;
    auto v = siegel_field_2d<Complex>(D);
    auto r = siegel_linearize(v, D, 4);
    CHECK(r.poincare);
    std::vector<oracle::Poly<Complex>> vp{to_poly(v[0]), to_poly(v[1])};
    auto h = oracle::siegel_conjugacy<Complex>(vp, r.lambda, D);
    for (int i = 0; i < 2; ++i) {
        for (const auto& [e, c] : h[i]) CHECK(std::abs(r.h[i].coeff(MultiIndex::from(e)) - c) < 1e-10);
        for (const auto& [a, c] : r.h[i].coeffs()) {
            auto it = h[i].find(a.to_vector());
            CHECK(std::abs(c - (it == h[i].end() ? Complex{} : it->second)) < 1e-10);
        }
    }
    auto ve = siegel_field_2d<Exact>(D);
    auto re = siegel_linearize(ve, D, 4);
    auto he = oracle::siegel_conjugacy<Exact>({to_poly(ve[0]), to_poly(ve[1])}, re.lambda, D);
    for (int i = 0; i < 2; ++i)
        for (const auto& [e, c] : he[i]) CHECK(re.h[i].coeff(MultiIndex::from(e)) == c);
}

TEST_CASE("Siegel: Newton agrees with Kolmogorov") {
    auto v = siegel_field_2d<Exact>(8);
    auto k = siegel_linearize(v, 8, 4);
    auto n = siegel_linearize(v, 8, 4, Strategy::Newton);
    for (int i = 0; i < 2; ++i) CHECK(k.h[i] == n.h[i]);
}

TEST_CASE("linear field is its own normal form") {
    Series<Exact> a(Signature{0, 2}, 6), b(Signature{0, 2}, 6);
    a.set({1, 0}, 1);
    b.set({0, 1}, golden<Exact>());
    auto r = siegel_linearize(Derivation<Exact>(std::vector<Series<Exact>>{a, b}), 6, 2);
    CHECK(r.h[0] == a.monomial_like({1, 0}, Exact(1)));
    CHECK(r.h[1] == a.monomial_like({0, 1}, Exact(1)));
}

TEST_CASE("resonant field") {
    Series<Exact> a(Signature{0, 2}, 6), b(Signature{0, 2}, 6);
    a.set({1, 0}, 2);
    a.set({0, 2}, 1);
    b.set({0, 1}, 1);
    try {
        siegel_linearize(Derivation<Exact>(std::vector<Series<Exact>>{a, b}), 6, 2);
        FAIL("expected a resonance");
    } catch (const ResonanceError& e) {
        CHECK(e.witness() == std::vector<int>{0, 2});
        CHECK(e.slot() == 0);
    }
}

TEST_CASE("residual bound arithmetic") {
    auto r = residual_bound(1.0, 1.0, 0.0 + 1e-300, 1.0 / 6.0);
    CHECK(r.applicable);
    CHECK(r.quadratic == doctest::Approx(1.0));
    CHECK(r.alpha_factor == doctest::Approx(1.0));
    CHECK_FALSE(residual_bound(1.0, 1.0, 0.5, 1.0).applicable);
    CHECK_FALSE(residual_bound(1.0, 0.5, 0.5, 0.0).applicable);
}

TEST_CASE("schedules stay positive") {
    for (auto sched : {Schedule::halving(0.05), Schedule::halving(0.1, 2), Schedule::thirds(0.05),
                       Schedule::thirds(0.05, 1, 1)}) {
        double last = sched.s0();
        for (int n = 0; n < 60; ++n) {
            double s = sched.s_at(n);
            CHECK(s > sched.s * 0.999);
            CHECK(s <= last);
            last = s;
        }
    }
}

TEST_CASE("lemma compliance") {
    for (const auto& name : demo_names()) {
        CAPTURE(name);
        auto d = run_demo(name);
        CHECK(d.trace.lemma_violations() == 0);
        for (const auto& row : d.trace.rows)
            if (row.lemma_applicable) CHECK(row.lemma_ok);
    }
}

}  // TEST_SUITE
