#include "echelon/series_io.hpp"

#include <cstdio>
#include <sstream>

namespace echelon {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string ord(int o) { return o == kInfiniteOrder ? "inf" : std::to_string(o); }

Json ord_json(int o) { return o == kInfiniteOrder ? Json(nullptr) : Json(o); }

}  // namespace

Json convergence_to_json(const ConvergenceCert& c) {
    Json j;
    j["s"] = c.s;
    j["ratios"] = c.ratios;
    j["partial_sums"] = c.partial_sums;
    j["verdict"] = verdict_name(c.verdict);
    j["tail_bound"] = c.tail_bound;
    j["violated_at"] = c.violated_at;
    j["rule"] = c.rule;
    Json rows = Json::array();
    for (std::size_t n = 0; n < c.ratios.size(); ++n)
        rows.push_back({{"n", n}, {"N1", c.ratios[n] * c.s}, {"partial_sum", c.partial_sums[n]}});
    j["rows"] = std::move(rows);
    return j;
}

std::string trace_to_csv(const IterationTrace& t) {
    std::ostringstream os;
    os << "n,s_n,sigma_n,residual_norm,u_bound,residual_order,aux_order,complement_order,alpha_norm,"
          "lemma_applicable,lemma_predicted,lemma_measured,lemma_ok,induction_ok\n";
    for (const auto& r : t.rows) {
        os << r.n << ',' << num(r.s_n) << ',' << num(r.sigma_n) << ',' << num(r.residual_norm) << ','
           << num(r.u_bound) << ',' << ord(r.residual_order) << ',' << ord(r.aux_order) << ','
           << ord(r.complement_order) << ',' << num(r.alpha_norm) << ',' << r.lemma_applicable << ','
           << num(r.lemma_predicted) << ',' << num(r.lemma_measured) << ',' << r.lemma_ok << ','
           << (r.induction_checked ? (r.induction_ok ? "1" : "0") : "") << '\n';
    }
    return os.str();
}

Json trace_to_json(const IterationTrace& t) {
    Json j;
    j["strategy"] = t.strategy;
    j["problem"] = t.problem;
    j["scale"] = t.scale;
    j["schedule"] = t.schedule;
    j["m"] = t.m;
    j["smallness_held"] = t.smallness_held;
    j["early_exit"] = t.early_exit;
    j["steps_executed"] = t.steps_executed;
    j["final_order"] = ord_json(t.final_order);
    j["final_complement_order"] = ord_json(t.final_complement_order);
    j["final_norm"] = t.final_norm;
    j["lemma_checks"] = t.lemma_checks();
    j["lemma_violations"] = t.lemma_violations();
    Json orders = Json::array();
    for (int o : t.orders_after_steps()) orders.push_back(ord_json(o));
    j["orders_after_steps"] = orders;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json x;
        x["n"] = r.n;
        x["s_n"] = r.s_n;
        x["sigma_n"] = r.sigma_n;
        x["residual_norm"] = r.residual_norm;
        x["u_bound"] = r.u_bound;
        x["u_certified"] = r.u_certified;
        x["residual_order"] = ord_json(r.residual_order);
        x["aux_order"] = ord_json(r.aux_order);
        x["complement_order"] = ord_json(r.complement_order);
        if (r.alpha_norm == r.alpha_norm) x["alpha_norm"] = r.alpha_norm;
        x["lemma_applicable"] = r.lemma_applicable;
        if (r.lemma_applicable) {
            x["lemma_C"] = r.lemma_C;
            x["lemma_predicted"] = r.lemma_predicted;
            x["lemma_measured"] = r.lemma_measured;
            x["lemma_ok"] = r.lemma_ok;
        }
        if (r.induction_checked) x["induction_ok"] = r.induction_ok;
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    return j;
}

}  // namespace echelon
