#include <cmath>

#include "doctest.h"
#include "echelon/demos.hpp"
#include "echelon/kam.hpp"
#include "random_series.hpp"

using namespace echelon;
using testing::random_series;

namespace {

// Random jet of low weight inside a roomy truncation, so brackets of three
// of them are never cut.
template <class S>
Series<S> small_jet(std::mt19937_64& rng, int n, int terms) {
    auto f = random_series<S>(rng, kam_signature(n), kam_truncation(n, 1), terms, 2);
    return f.with_truncation(kam_truncation(n, 8));
}

Series<Exact> mode(int n, std::initializer_list<int> e, Exact c = Exact(1), int t_order = 8) {
    Series<Exact> f(kam_signature(n), kam_truncation(n, t_order));
    f.set(MultiIndex(e), c);
    return f;
}

}  // namespace

TEST_SUITE("kam") {

TEST_CASE("Poisson bracket identities") {
    std::mt19937_64 rng(41);
    for (int n : {1, 2}) {
        for (int trial = 0; trial < 30; ++trial) {
            auto f = small_jet<Exact>(rng, n, 4), g = small_jet<Exact>(rng, n, 4), h = small_jet<Exact>(rng, n, 4);
            CHECK(poisson_bracket(f, g) == -poisson_bracket(g, f));
            auto jac = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) +
                       poisson_bracket(h, poisson_bracket(f, g));
            CHECK(jac.is_zero());
            CHECK(poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h));
            CHECK(hamiltonian_field(f).apply(g) == poisson_bracket(f, g));
        }
    }
}

TEST_CASE("modes are eigenvectors of the frequency bracket") {
    const int n = 2;
    auto lx = mode(n, {0, 0, 1, 0, 0}) + mode(n, {0, 0, 0, 1, 0}, golden<Exact>());
    for (auto k : {std::pair{1, 0}, std::pair{2, -3}, std::pair{-1, 1}}) {
        auto e = mode(n, {k.first, k.second, 0, 0, 0});
        Exact kl = Exact(k.first) + Exact(k.second) * golden<Exact>();
        CHECK(poisson_bracket(e, lx) == e * kl);
        CHECK(poisson_bracket(lx, e) == e * (-kl));
    }
    // xi_1 commutes with everything independent of theta_1
    std::mt19937_64 rng(42);
    auto xi1 = mode(n, {0, 0, 1, 0, 0});
    for (int trial = 0; trial < 20; ++trial) {
        auto f = small_jet<Exact>(rng, n, 6).filter([](const MultiIndex& a) { return a[0] == 0; });
        CHECK(poisson_bracket(xi1, f).is_zero());
    }
}

TEST_CASE("average") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        auto H = small_jet<Exact>(rng, 2, 10);
        auto A = average(H);
        CHECK(average(A) == A);
        CHECK(average(t_multiply(H)) == t_multiply(A));
        for (const auto& [a, c] : A.coeffs()) CHECK((a[0] == 0 && a[1] == 0));
    }
}

TEST_CASE("isochronic check") {
    auto tw = isochronic_check(kam_golden_hamiltonian<Exact>(4, true));
    CHECK(tw.det == Exact(mpq_class(1, 4)));
    CHECK_FALSE(tw.degenerate);
    CHECK(tw.fiber_dimension == 0);
    auto flat = isochronic_check(kam_golden_hamiltonian<Exact>(4, false));
    CHECK(flat.det == Exact(0));
    CHECK(flat.degenerate);
    CHECK(flat.fiber_dimension == 2);
    // n = 1: xi + xi^2 / 2
    auto one = isochronic_check(mode(1, {0, 1, 0}) + mode(1, {0, 2, 0}, Exact(mpq_class(1, 2))));
    CHECK(one.det == Exact(mpq_class(1, 2)));
}

TEST_CASE("deformation axiom") {
    std::mt19937_64 rng(44);
    std::vector<Series<Complex>> probes;
    for (int k = 0; k < 30; ++k)
        probes.push_back(random_series<Complex>(rng, kam_signature(2), kam_truncation(2, 3), 6, 2));
    for (double s : {0.05, 0.2, 0.6}) CHECK(deformation_ratio(probes, kam_scale(2), s) <= s * s * (1 + 1e-12));
}

TEST_CASE("homological equation") {
    const int n = 2;
    auto a = mode(n, {0, 0, 1, 0, 0}) + mode(n, {0, 0, 0, 1, 0}, golden<Exact>());
    auto comp = [](const Series<Exact>& x) { return kam_split(x).second; };
    // pure mode: h = r / (k, lambda)
    auto r = mode(n, {1, 1, 0, 0, 1});
    auto h = homological_solve(a, r);
    CHECK(h == r * (Exact(1) + golden<Exact>()).inverse());
    CHECK(comp(poisson_bracket(h, a) - r).is_zero());
    // constants and angle means lie in F
    auto c = mode(n, {0, 0, 0, 0, 1}, Exact(5)) + mode(n, {0, 0, 1, 0, 1});
    CHECK(homological_solve(a, c).is_zero());
    // with a quadratic part alpha the bracket matches modulo F
    auto a2 = a + mode(n, {0, 0, 2, 0, 0}, Exact(mpq_class(1, 2))) + mode(n, {1, 0, 1, 1, 0}, Exact(3)) +
              mode(n, {-1, 0, 1, 1, 0}, Exact(3));
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        auto rr = random_series<Exact>(rng, kam_signature(n), kam_truncation(n, 3), 8, 3);
        rr = rr.with_truncation(kam_truncation(n, 8)).filter([](const MultiIndex& m) { return m[2] + m[3] <= 1; });
        auto hh = homological_solve(a2, rr);
        auto defect = comp(poisson_bracket(hh, a2) - rr);
        CHECK(defect.is_zero());
    }
    // resonant frequency
    auto res = mode(n, {0, 0, 1, 0, 0}) + mode(n, {0, 0, 0, 1, 0}, Exact(2));
    CHECK_THROWS_AS(homological_solve(res, mode(n, {2, -1, 0, 0, 1})), ResonanceError);
}

TEST_CASE("one KAM step in one degree of freedom") {
    // xi + t (z + 1/z)
    const int n = 1;
    auto H = mode(n, {0, 1, 0}, Exact(1), 6) + mode(n, {1, 0, 1}, Exact(1), 6) + mode(n, {-1, 0, 1}, Exact(1), 6);
    auto r = kam_transversal_step(H, 1, 10, Schedule::thirds(0.05), true);
    CHECK(r.run.trace.final_complement_order >= 2);
    CHECK(r.reality_preserved);
    auto r2 = kam_transversal_step(H, 3, 10);
    auto o = r2.run.trace.complement_after_steps();
    for (std::size_t i = 1; i < o.size(); ++i) CHECK((o[i] > o[i - 1] || o[i] == kInfiniteOrder));
}

TEST_CASE("unperturbed Hamiltonian") {
    auto H = kam_golden_hamiltonian<Exact>(6, false).filter([](const MultiIndex& a) { return a[4] == 0; });
    auto r = kam_transversal_step(H, 2, 10);
    for (const auto& u : r.run.generators) CHECK(u.is_zero());
    CHECK(r.normal_form == H);
}

TEST_CASE("golden Hamiltonian") {
    auto H = kam_golden_hamiltonian<Exact>(8, false);
    auto third = kam_transversal_step(H, 3, 10, Schedule::thirds(0.05), true);
    CHECK(third.reality_preserved);
    // t-orders of the residual outside F
    CHECK(third.run.trace.complement_after_steps() == std::vector<int>{2, 4, 8});
    auto half = kam_transversal_step(H, 3, 10, Schedule::halving(0.05), true);
    CHECK(half.run.alpha_total == third.run.alpha_total);
    CHECK(half.normal_form == third.normal_form);
    auto f = kam_transversal_step(kam_golden_hamiltonian<Complex>(6, true), 3, 10, Schedule::thirds(0.05), true);
    CHECK(f.reality_preserved);
    CHECK(reality_defect(f.normal_form) < 1e-9);
}

TEST_CASE("KAM preconditions") {
    const int n = 1;
    // angle term at t^0
    auto bad = mode(n, {0, 1, 0}, Exact(1), 4) + mode(n, {1, 0, 0}, Exact(1), 4);
    CHECK_THROWS_AS(kam_transversal_step(bad, 1, 5), PreconditionError);
    Series<Exact> not_torus(Signature{0, 2}, 4);
    CHECK_THROWS_AS(kam_transversal_step(not_torus, 1, 5), SignatureMismatch);
}

TEST_CASE("singular normal form") {
    // lambda q p + q^3: h = q^3 / (3 lambda)
    Series<Exact> H(Signature{0, 2}, 8);
    H.set({1, 1}, 2);
    H.set({3, 0}, 1);
    auto cube = H.monomial_like({3, 0}, Exact(1));
    auto h = singular_divide(std::vector<Exact>{2}, cube, 0.0);
    CHECK(h == H.monomial_like({3, 0}, Exact(mpq_class(1, 6))));
    CHECK(canonical_bracket(h, H.monomial_like({1, 1}, Exact(2))) == cube);
    auto r = singular_kam_step(H, 3);
    CHECK(r.residual_in_I2);
    auto full = singular_kam_step(singular_hamiltonian<Exact>(12), 4);
    CHECK(full.residual_in_I2);
    CHECK(full.run.trace.complement_after_steps() == std::vector<int>{4, 7, 11, kInfiniteOrder});
    Series<Exact> res(Signature{0, 2}, 6);
    res.set({1, 1}, 1);
    res.set({2, 0}, 1);
    CHECK_THROWS_AS(singular_kam_step(res, 1), PreconditionError);
}

}  // TEST_SUITE
