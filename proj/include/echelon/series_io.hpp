#pragma once

#include <string>
#include <vector>

#include "echelon/derivation.hpp"
#include "echelon/iteration.hpp"
#include "echelon/kam.hpp"
#include "echelon/operator.hpp"
#include "echelon/small_divisors.hpp"
#include "json.hpp"

namespace echelon {

using Json = nlohmann::json;

// Series literal:
//   {"signature":[m,p], "cap":D, "weights":[...]?, "slot_caps":[...]?,
//    "coeffs":[{"idx":[...], "re":x, "im":y}, ...]}
// Float mode writes numbers, exact mode strings such as "1/2+1/2*sqrt(5)".
// Either form is accepted on input; "im" may be omitted.

namespace detail {

template <class S>
S parse_scalar(const Json& re, const Json* im) {
    auto part = [](const Json& v) -> Exact {
        if (v.is_string()) return Exact(Surd::parse(v.get<std::string>()));
        if (v.is_number_integer()) return Exact(static_cast<long>(v.get<long long>()));
        if (v.is_number()) return Exact::from_complex({v.get<double>(), 0.0});
        throw ParseError("coefficient must be a number or a string");
    };
    if constexpr (ScalarTraits<S>::exact) {
        Exact r = part(re);
        if (im) r += part(*im) * Exact(Surd(0), Surd(1));
        return r;
    } else {
        auto dbl = [&](const Json& v) {
            if (v.is_number()) return v.get<double>();
            return part(v).to_complex().real();
        };
        return Complex(dbl(re), im ? dbl(*im) : 0.0);
    }
}

template <class S>
void put_scalar(Json& out, const S& v) {
    if constexpr (ScalarTraits<S>::exact) {
        out["re"] = v.real().str();
        if (!v.imag().is_zero()) out["im"] = v.imag().str();
    } else {
        out["re"] = v.real();
        if (v.imag() != 0.0) out["im"] = v.imag();
    }
}

inline Truncation parse_truncation(const Json& j, const Signature& sig) {
    if (!j.contains("cap")) throw ParseError("series literal needs \"cap\"");
    Truncation t = Truncation::total(sig, j.at("cap").get<int>());
    if (j.contains("weights")) t.weights = j.at("weights").get<std::vector<int>>();
    if (j.contains("slot_caps")) t.slot_caps = j.at("slot_caps").get<std::vector<int>>();
    if (static_cast<int>(t.weights.size()) != sig.slots()) throw ParseError("\"weights\" length does not match signature");
    if (!t.slot_caps.empty() && static_cast<int>(t.slot_caps.size()) != sig.slots())
        throw ParseError("\"slot_caps\" length does not match signature");
    for (int w : t.weights)
        if (w < 0) throw ParseError("negative truncation weight");
    return t;
}

inline Signature parse_signature(const Json& j) {
    if (!j.contains("signature")) throw ParseError("series literal needs \"signature\"");
    auto v = j.at("signature").get<std::vector<int>>();
    if (v.size() != 2 || v[0] < 0 || v[1] < 0 || v[0] + v[1] < 1 || v[0] + v[1] > kMaxSlots)
        throw ParseError("\"signature\" must be [fourier, taylor] with 1..8 slots");
    return {v[0], v[1]};
}

template <class S>
void fill_coeffs(Series<S>& f, const Json& arr) {
    if (!arr.is_array()) throw ParseError("\"coeffs\" must be an array");
    for (const auto& c : arr) {
        auto idx = c.at("idx").get<std::vector<int>>();
        if (static_cast<int>(idx.size()) != f.signature().slots())
            throw ParseError("coefficient index length does not match signature");
        f.add_to(MultiIndex::from(idx), parse_scalar<S>(c.at("re"), c.contains("im") ? &c.at("im") : nullptr));
    }
}

template <class S>
Json coeffs_json(const Series<S>& f) {
    Json arr = Json::array();
    for (const auto& [a, v] : f.coeffs()) {
        Json c;
        c["idx"] = a.to_vector();
        put_scalar(c, v);
        arr.push_back(std::move(c));
    }
    return arr;
}

inline void put_truncation(Json& j, const Signature& sig, const Truncation& t) {
    j["cap"] = t.cap;
    if (!(t.weights == Truncation::total(sig, t.cap).weights)) j["weights"] = t.weights;
    bool any = false;
    for (int c : t.slot_caps) any = any || c >= 0;
    if (any) j["slot_caps"] = t.slot_caps;
}

}  // namespace detail

template <class S>
Json series_to_json(const Series<S>& f) {
    Json j;
    j["signature"] = {f.signature().fourier, f.signature().taylor};
    detail::put_truncation(j, f.signature(), f.truncation());
    j["coeffs"] = detail::coeffs_json(f);
    return j;
}

template <class S>
Series<S> series_from_json(const Json& j) {
    try {
        Signature sig = detail::parse_signature(j);
        Series<S> f(sig, detail::parse_truncation(j, sig));
        if (j.contains("coeffs")) detail::fill_coeffs(f, j.at("coeffs"));
        return f;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed series literal: ") + e.what());
    }
}

// Vector-field literal: series header plus "components":[coeffs, ...].
template <class S>
Json field_to_json(const Derivation<S>& u) {
    Json j;
    j["signature"] = {u.signature().fourier, u.signature().taylor};
    detail::put_truncation(j, u.signature(), u.truncation());
    Json comps = Json::array();
    for (const auto& c : u.components()) comps.push_back(detail::coeffs_json(c));
    j["components"] = std::move(comps);
    return j;
}

template <class S>
Derivation<S> field_from_json(const Json& j) {
    try {
        Signature sig = detail::parse_signature(j);
        Truncation t = detail::parse_truncation(j, sig);
        const auto& comps = j.at("components");
        if (!comps.is_array() || static_cast<int>(comps.size()) != sig.slots())
            throw ParseError("\"components\" needs one coefficient list per slot");
        std::vector<Series<S>> cs;
        for (const auto& c : comps) {
            Series<S> f(sig, t);
            detail::fill_coeffs(f, c);
            cs.push_back(std::move(f));
        }
        return Derivation<S>(std::move(cs));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed vector-field literal: ") + e.what());
    }
}

// Hamiltonian literal: {"slots":{"angles":n,"actions":n,"t":1}, "t_order":T?,
// "coeffs":[...]} with indices ordered (angles, actions, t). The jet is
// kam_truncation(n, T); t_order < 0 takes T from the file.

template <class S>
Series<S> hamiltonian_from_json(const Json& j, int t_order = -1) {
    try {
        const auto& sl = j.at("slots");
        int n = sl.at("angles").get<int>();
        int m = sl.at("actions").get<int>();
        int t = sl.value("t", 1);
        if (n < 1 || m != n || t != 1 || 2 * n + 1 > kMaxSlots)
            throw ParseError("Hamiltonian slots must be {angles:n, actions:n, t:1} with 2n+1 <= 8");
        if (t_order < 0) {
            if (!j.contains("t_order")) throw ParseError("Hamiltonian needs \"t_order\" (or --t-order)");
            t_order = j.at("t_order").get<int>();
        }
        if (t_order < 1) throw ParseError("t_order must be >= 1");
        Series<S> H(Signature{n, n + 1}, kam_truncation(n, t_order));
        detail::fill_coeffs(H, j.at("coeffs"));
        return H;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed Hamiltonian literal: ") + e.what());
    }
}

template <class S>
Json hamiltonian_to_json(const Series<S>& H) {
    const int n = H.signature().fourier;
    Json j;
    j["slots"] = {{"angles", n}, {"actions", n}, {"t", 1}};
    j["t_order"] = t_cap(H, KamLayout::of(H.signature()));
    j["coeffs"] = detail::coeffs_json(H);
    return j;
}

// Operator literal: {"type": identity | derivation | multiplication |
// hadamard | diag | composite | exponential, ...}. A derivation carries
// "coeffs": one series literal per slot; multiplication and hadamard carry
// "g"; diag carries "rule": {"name", "params"}.
template <class S>
Json operator_to_json(const SeriesOperator<S>& op) {
    Json j;
    switch (op.kind()) {
        case OpKind::Identity: j["type"] = "identity"; break;
        case OpKind::Derivation: {
            j["type"] = "derivation";
            Json cs = Json::array();
            for (const auto& c : op.as_derivation().components()) cs.push_back(series_to_json(c));
            j["coeffs"] = std::move(cs);
            break;
        }
        case OpKind::Multiplication:
            j["type"] = "multiplication";
            j["g"] = series_to_json(op.multiplier());
            break;
        case OpKind::Hadamard:
            j["type"] = "hadamard";
            j["g"] = series_to_json(op.multiplier());
            break;
        case OpKind::Diagonal:
            j["type"] = "diag";
            j["rule"] = {{"name", op.rule().name}, {"params", op.rule().params}};
            break;
        case OpKind::Composite: {
            j["type"] = "composite";
            Json parts = Json::array();
            for (const auto& p : op.parts()) parts.push_back(operator_to_json(p));
            j["parts"] = std::move(parts);
            break;
        }
        case OpKind::Exponential: {
            const auto& e = op.exp_data();
            j["type"] = "exponential";
            j["mode"] = exp_mode_name(e.mode);
            j["terms"] = e.terms;
            j["tail_tol"] = e.tail_tol;
            j["inner"] = operator_to_json(e.inner);
            break;
        }
    }
    return j;
}

template <class S>
SeriesOperator<S> operator_from_json(const Json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "identity") return SeriesOperator<S>::identity();
        if (type == "derivation") {
            std::vector<Series<S>> cs;
            for (const auto& c : j.at("coeffs")) cs.push_back(series_from_json<S>(c));
            if (cs.empty() || static_cast<int>(cs.size()) != cs[0].signature().slots())
                throw ParseError("derivation needs one series per slot");
            for (const auto& c : cs)
                if (!(c.signature() == cs[0].signature()) || !(c.truncation() == cs[0].truncation()))
                    throw ParseError("derivation components must share signature and truncation");
            return SeriesOperator<S>::derivation(Derivation<S>(std::move(cs)));
        }
        if (type == "multiplication") return SeriesOperator<S>::multiplication(series_from_json<S>(j.at("g")));
        if (type == "hadamard") return SeriesOperator<S>::hadamard(series_from_json<S>(j.at("g")));
        if (type == "diag") {
            const auto& r = j.at("rule");
            if (r.at("name").get<std::string>() != "angular-power") throw ParseError("unknown diagonal rule");
            return SeriesOperator<S>::diagonal(angular_power_rule<S>(static_cast<int>(r.at("params").at(0).get<double>())));
        }
        if (type == "composite") {
            std::vector<SeriesOperator<S>> parts;
            for (const auto& p : j.at("parts")) parts.push_back(operator_from_json<S>(p));
            return SeriesOperator<S>::composite(std::move(parts));
        }
        if (type == "exponential") {
            auto inner = operator_from_json<S>(j.at("inner"));
            if (inner.kind() == OpKind::Derivation) return exp(inner.as_derivation());
            return exp(inner, BoundProfile{1, 0.0, 0.0, false});
        }
        throw ParseError("unknown operator type '" + type + "'");
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed operator literal: ") + e.what());
    }
}

template <class S>
Json diophantine_to_json(const DiophantineCert<S>& c, const std::vector<S>& lambda) {
    Json j;
    Json lam = Json::array();
    for (const auto& l : lambda) {
        Json x;
        detail::put_scalar(x, l);
        lam.push_back(x);
    }
    j["lambda"] = lam;
    j["tau"] = c.tau;
    j["cutoff"] = c.cutoff;
    j["C"] = c.C;
    j["required_C"] = c.required_C;
    j["resonant"] = c.resonant;
    j["pass"] = c.pass;
    j["witness"] = c.witness.to_vector();
    j["C_nonresonant"] = c.C_nonresonant;
    if (c.nonresonant_witness.size() > 0) j["nonresonant_witness"] = c.nonresonant_witness.to_vector();
    Json d;
    detail::put_scalar(d, c.divisor);
    j["divisor"] = d;
    return j;
}

Json convergence_to_json(const ConvergenceCert& c);

// Columns: n, s_n, sigma_n, residual_norm, u_bound, residual_order, then
// the lemma and transversal annotations.
std::string trace_to_csv(const IterationTrace& t);
Json trace_to_json(const IterationTrace& t);

}  // namespace echelon
