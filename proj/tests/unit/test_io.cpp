#include <fstream>
#include <sstream>

#include "doctest.h"
#include "echelon/demos.hpp"
#include "echelon/series_io.hpp"
#include "random_series.hpp"

using namespace echelon;
using testing::random_series;

namespace {

Json load(const std::string& name) {
    std::ifstream in(std::string(ECHELON_FIXTURES) + "/" + name);
    REQUIRE(in.good());
    return Json::parse(in);
}

template <class S>
Series<S> reparse(const Series<S>& f) {
    return series_from_json<S>(Json::parse(series_to_json(f).dump()));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("series round trip") {
    std::mt19937_64 rng(51);
    for (auto sig : {Signature{0, 2}, Signature{2, 0}, Signature{1, 2}}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto e = random_series<Exact>(rng, sig, 6, 10);
            e.add_to(MultiIndex(sig.slots()), golden<Exact>() * Exact(Surd(0), Surd(mpq_class(1, 3))));
            CHECK(reparse(e) == e);
            auto f = random_series<Complex>(rng, sig, 6, 10);
            CHECK(reparse(f) == f);
        }
    }
    Truncation t{{0, 1, 2}, 7, {3, -1, -1}};
    Series<Exact> w(Signature{1, 2}, t);
    w.set({-3, 1, 2}, Exact(mpq_class(5, 7)));
    auto back = reparse(w);
    CHECK(back == w);
    CHECK(back.truncation() == t);
}

TEST_CASE("field, Hamiltonian and operator round trips") {
    std::mt19937_64 rng(52);
    const Signature sig{0, 2};
    Derivation<Exact> u(std::vector<Series<Exact>>{random_series<Exact>(rng, sig, 5, 6),
                                                   random_series<Exact>(rng, sig, 5, 6)});
    CHECK(field_from_json<Exact>(Json::parse(field_to_json(u).dump())) == u);
    Derivation<Complex> uf(std::vector<Series<Complex>>{random_series<Complex>(rng, sig, 5, 6),
                                                        random_series<Complex>(rng, sig, 5, 6)});
    CHECK(field_from_json<Complex>(Json::parse(field_to_json(uf).dump())) == uf);

    auto H = kam_golden_hamiltonian<Exact>(8, false);
    CHECK(hamiltonian_from_json<Exact>(load("kam_golden.json")) == H);
    CHECK(hamiltonian_from_json<Exact>(hamiltonian_to_json(H)) == H);
    auto Hf = kam_golden_hamiltonian<Complex>(5, true);
    CHECK(hamiltonian_from_json<Complex>(hamiltonian_to_json(Hf)) == Hf);

    auto g = random_series<Exact>(rng, sig, 5, 6);
    std::vector<SeriesOperator<Exact>> ops{
        SeriesOperator<Exact>::identity(), SeriesOperator<Exact>::derivation(u),
        SeriesOperator<Exact>::multiplication(g), SeriesOperator<Exact>::hadamard(g),
        SeriesOperator<Exact>::composite({SeriesOperator<Exact>::derivation(u), SeriesOperator<Exact>::multiplication(g)}),
        exp(Derivation<Exact>(std::vector<Series<Exact>>{g.filter([](const MultiIndex& a) { return total_degree(a) >= 2; }),
                                                          g.zero_like()}))};
    auto x = random_series<Exact>(rng, sig, 5, 8);
    for (const auto& op : ops) {
        auto j = operator_to_json(op);
        auto back = operator_from_json<Exact>(Json::parse(j.dump()));
        CHECK(operator_to_json(back) == j);
        CHECK(back(x) == op(x));
    }
    Series<Exact> tor(Signature{2, 0}, 4);
    tor.set({1, -1}, 1);
    auto diag = SeriesOperator<Exact>::diagonal(angular_power_rule<Exact>(2));
    auto dback = operator_from_json<Exact>(operator_to_json(diag));
    CHECK(dback(tor) == tor * Exact(3));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(series_from_json<Exact>(Json::parse(R"({"cap": 3})")), ParseError);
    CHECK_THROWS_AS(series_from_json<Exact>(Json::parse(R"({"signature": [0, 1]})")), ParseError);
    CHECK_THROWS_AS(series_from_json<Exact>(Json::parse(R"({"signature": [0, 1], "cap": 3, "coeffs": [{"idx": [1], "re": true}]})")),
                    ParseError);
    CHECK_THROWS_AS(Surd::parse("1/2+sqrt("), ParseError);
    CHECK_THROWS_AS(field_from_json<Exact>(Json::parse(R"({"signature": [0, 2], "cap": 3, "components": [[]]})")),
                    ParseError);
    CHECK_THROWS_AS(operator_from_json<Exact>(Json::parse(R"({"type": "rotation"})")), ParseError);
    CHECK_THROWS_AS(operator_from_json<Exact>(Json::parse(R"({"kind": "identity"})")), ParseError);
    CHECK_THROWS_AS(hamiltonian_from_json<Exact>(Json::parse(R"({"slots": {"angles": 2, "actions": 1}, "t_order": 3, "coeffs": []})")),
                    ParseError);
    CHECK_THROWS_AS(series_from_json<Exact>(Json::parse(R"({"signature": [0, 1], "cap": 3, "coeffs": [{"idx": [1, 1], "re": 1}]})")),
                    ParseError);
}

TEST_CASE("scalar literals") {
    CHECK(Surd::parse("1/2+1/2*sqrt(5)") == golden<Exact>().real());
    CHECK(Surd::parse("sqrt(2)") == Surd::sqrt_of(2));
    CHECK(Surd::parse("0.25") == Surd(mpq_class(1, 4)));
    CHECK(Surd::parse("-3") == Surd(-3));
    CHECK(Surd::parse(Surd::parse("-7/3-2/9*sqrt(11)").str()) == Surd::parse("-7/3-2/9*sqrt(11)"));
}

TEST_CASE("linearization fixture") {
    auto v = field_from_json<Exact>(load("siegel1d.json"));
    auto expect = field_from_json<Exact>(load("siegel1d_conjugacy.json"));
    auto r = siegel_linearize(v, v.truncation().cap, 4);
    CHECK(r.h[0] == expect[0]);
}

TEST_CASE("deterministic output") {
    for (const std::string name : {"morse-1d-float", "siegel-2d", "kam-golden-twist"}) {
        auto a = run_demo(name), b = run_demo(name);
        CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
        CHECK(trace_to_json(a.trace).dump() == trace_to_json(b.trace).dump());
        CHECK(a.summary.dump() == b.summary.dump());
    }
    auto p = product_demo_json(product_demo(false)), q = product_demo_json(product_demo(false));
    CHECK(p.dump() == q.dump());
}

}  // TEST_SUITE
