// echelon: command-line front end for the normal-form library.
//
// Every command writes its artifacts to --out (default $ECHELON_OUT, else
// ./echelon-out) under <command>-<hash>.*, where the hash is FNV-1a over the
// command, its resolved options and the bytes of its input files.
//
// Exit codes: 0 ok, 2 parse error, 3 precondition violated, 4 resonance,
// 5 convergence abort.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "echelon/demos.hpp"
#include "echelon/kam.hpp"
#include "echelon/normal_form.hpp"
#include "echelon/series_io.hpp"

namespace fs = std::filesystem;
using namespace echelon;

namespace {

enum Exit { kOk = 0, kParse = 2, kPrecondition = 3, kResonance = 4, kAbort = 5 };

struct Options {
    std::string out;
    bool exact = false;
    std::string strategy = "kolmogorov";
    std::string schedule;
    std::string input;
    std::string lambda;
    int cutoff = 10;
    int steps = 4;
    int t_order = -1;
    int tau = 1;
    double required_C = 0;
    bool real = false;
    bool siegel = false;
    std::string C_grid = "10,1,0.1,0.01,0.001";
    int samples = 10000;
    std::uint64_t seed = 1;
    int dim = 2;
    std::string sequence = "geometric";
    int count = 12;
    double amp = 0.2;
    std::string demo;
    bool list = false;
};

class Run {
public:
    Run(std::string command, const Options& o) : command_(std::move(command)), opt_(o) {}

    void key(const std::string& k, const std::string& v) { keys_[k] = v; }
    template <class T>
    void key(const std::string& k, const T& v) {
        std::ostringstream os;
        os << v;
        keys_[k] = os.str();
    }

    std::string read_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot read input file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        keys_["input-bytes"] = ss.str();
        return ss.str();
    }

    Json read_json(const std::string& path) {
        std::string text = read_input(path);
        try {
            return Json::parse(text);
        } catch (const Json::exception& e) {
            throw ParseError("'" + path + "' is not valid JSON: " + e.what());
        }
    }

    std::string stem() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&](const std::string& s) {
            for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
            h = (h ^ 0xff) * 1099511628211ull;
        };
        mix(command_);
        for (const auto& [k, v] : keys_) {
            mix(k);
            mix(v);
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return command_ + "-" + buf;
    }

    std::string write(const std::string& suffix, const std::string& body) {
        fs::create_directories(opt_.out);
        fs::path p = fs::path(opt_.out) / (stem() + suffix);
        std::ofstream f(p, std::ios::binary);
        f << body;
        if (!f) throw PreconditionError("cannot write '" + p.string() + "'");
        return p.string();
    }
    std::string write_json(const std::string& suffix, const Json& j) { return write(suffix, j.dump(2) + "\n"); }

    const std::string& command() const { return command_; }

private:
    std::string command_;
    const Options& opt_;
    std::map<std::string, std::string> keys_;
};

template <class S>
std::vector<S> parse_lambda(const std::string& text) {
    std::vector<S> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Exact v(Surd::parse(item));
        out.push_back(ScalarTraits<S>::from_exact(v));
    }
    if (out.empty()) throw ParseError("--lambda needs at least one value");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ParseError("bad number '" + item + "'");
        }
    }
    return out;
}

Json orders(const std::vector<int>& v) {
    Json a = Json::array();
    for (int o : v) a.push_back(o == kInfiniteOrder ? Json(nullptr) : Json(o));
    return a;
}

Schedule schedule_for(const std::string& name, const Schedule& fallback) {
    if (name.empty()) return fallback;
    if (name == "halving") return Schedule::halving(fallback.s);
    if (name == "thirds") return Schedule::thirds(fallback.s);
    throw ParseError("unknown schedule '" + name + "'");
}

void emit(Run& run, const Json& result, const std::string& trace_csv = "") {
    Json summary = result;
    summary["artifacts"]["result"] = run.write_json(".json", result);
    if (!trace_csv.empty()) summary["artifacts"]["trace"] = run.write("-trace.csv", trace_csv);
    std::cout << summary.dump(2) << "\n";
}

template <class S>
int cmd_linearize(const Options& o) {
    Run run("linearize", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("strategy", o.strategy);
    run.key("cutoff", o.cutoff);
    run.key("steps", o.steps);
    run.key("schedule", o.schedule);
    auto v = field_from_json<S>(run.read_json(o.input));
    auto r = siegel_linearize(v, o.cutoff, o.steps, parse_strategy(o.strategy),
                              schedule_for(o.schedule, Schedule::halving(0.05)));
    Json res;
    res["mode"] = ScalarTraits<S>::name;
    res["strategy"] = r.run.trace.strategy;
    res["poincare_domain"] = r.poincare;
    res["min_divisor"] = r.min_divisor;
    Json h = Json::array();
    for (const auto& c : r.h) h.push_back(series_to_json(c));
    res["conjugacy"] = h;
    res["residual"] = field_to_json(r.run.residual);
    res["orders"] = orders(r.run.trace.orders_after_steps());
    res["trace"] = trace_to_json(r.run.trace);
    emit(run, res, trace_to_csv(r.run.trace));
    return kOk;
}

template <class S>
int cmd_morse(const Options& o) {
    Run run("morse", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("strategy", o.strategy);
    run.key("steps", o.steps);
    run.key("schedule", o.schedule);
    auto f = series_from_json<S>(run.read_json(o.input));
    auto r = morse_reduce(f, o.steps, parse_strategy(o.strategy), schedule_for(o.schedule, Schedule::halving(0.05)));
    Json res;
    res["mode"] = ScalarTraits<S>::name;
    res["strategy"] = r.run.trace.strategy;
    res["quadratic_part"] = series_to_json(r.setup.base);
    Json psi = Json::array(), phi = Json::array();
    for (const auto& c : r.psi) psi.push_back(series_to_json(c));
    for (const auto& c : r.phi) phi.push_back(series_to_json(c));
    res["psi"] = psi;
    res["phi"] = phi;
    res["residual"] = series_to_json(r.run.residual);
    res["orders"] = orders(r.run.trace.orders_after_steps());
    res["trace"] = trace_to_json(r.run.trace);
    emit(run, res, trace_to_csv(r.run.trace));
    return kOk;
}

template <class S>
int cmd_kam(const Options& o) {
    Run run("kam-step", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("cutoff", o.cutoff);
    run.key("steps", o.steps);
    run.key("t-order", o.t_order);
    run.key("real", o.real);
    run.key("schedule", o.schedule);
    auto H = hamiltonian_from_json<S>(run.read_json(o.input), o.t_order);
    auto r = kam_transversal_step(H, o.steps, o.cutoff, schedule_for(o.schedule, Schedule::thirds(0.05)), o.real);
    auto iso = isochronic_check(H);
    Json res;
    res["mode"] = ScalarTraits<S>::name;
    res["diophantine"] = diophantine_to_json(r.cert, r.lambda);
    res["normal_form"] = hamiltonian_to_json(r.normal_form);
    res["alpha_total"] = hamiltonian_to_json(r.run.alpha_total);
    res["complement_t_orders"] = orders(r.run.trace.complement_after_steps());
    res["reality_preserved"] = r.reality_preserved;
    res["isochronic"] = {{"degenerate", iso.degenerate}, {"fiber_dimension", iso.fiber_dimension}};
    res["trace"] = trace_to_json(r.run.trace);
    emit(run, res, trace_to_csv(r.run.trace));
    return kOk;
}

template <class S>
int cmd_singular(const Options& o) {
    Run run("singular-kam", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("steps", o.steps);
    run.key("schedule", o.schedule);
    auto H = series_from_json<S>(run.read_json(o.input));
    auto r = singular_kam_step(H, o.steps, schedule_for(o.schedule, Schedule::thirds(0.05)));
    Json res;
    res["mode"] = ScalarTraits<S>::name;
    res["normal_form"] = series_to_json(r.normal_form);
    res["alpha_total"] = series_to_json(r.run.alpha_total);
    res["residual_in_I2"] = r.residual_in_I2;
    res["complement_orders"] = orders(r.run.trace.complement_after_steps());
    res["trace"] = trace_to_json(r.run.trace);
    emit(run, res, trace_to_csv(r.run.trace));
    return kOk;
}

template <class S>
int cmd_diophantine(const Options& o) {
    Run run("diophantine", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("lambda", o.lambda);
    run.key("tau", o.tau);
    run.key("cutoff", o.cutoff);
    run.key("C", o.required_C);
    auto lambda = parse_lambda<S>(o.lambda);
    auto c = min_small_divisor(lambda, o.tau, o.cutoff, o.required_C);
    Json res = diophantine_to_json(c, lambda);
    res["mode"] = ScalarTraits<S>::name;
    res["status"] = c.resonant ? "resonant" : (c.pass ? "pass" : "fail");
    emit(run, res);
    return c.resonant ? kResonance : kOk;
}

template <class S>
int cmd_divisors(const Options& o) {
    Run run("divisors", o);
    run.key("mode", ScalarTraits<S>::name);
    run.key("lambda", o.lambda);
    run.key("cutoff", o.cutoff);
    run.key("siegel", o.siegel);
    auto lambda = parse_lambda<S>(o.lambda);
    std::ostringstream csv;
    int resonant = 0;
    std::size_t rows = 0;
    auto value = [](const S& v) {
        if constexpr (ScalarTraits<S>::exact) {
            return v.is_real() ? v.real().str() : v.real().str() + "+i*(" + v.imag().str() + ")";
        } else {
            std::ostringstream os;
            os.precision(17);
            os << v.real();
            if (v.imag() != 0.0) os << (v.imag() < 0 ? "" : "+") << v.imag() << "i";
            return os.str();
        }
    };
    auto idx = [](const MultiIndex& m) {
        std::string s;
        for (int k = 0; k < m.size(); ++k) s += (k ? " " : "") + std::to_string(m[k]);
        return s;
    };
    if (o.siegel) {
        csv << "j,i,value,magnitude,resonant\n";
        for (const auto& d : siegel_divisors(lambda, o.cutoff)) {
            csv << idx(d.j) << ',' << d.i << ',' << value(d.value) << ',' << d.magnitude << ',' << d.resonant << '\n';
            resonant += d.resonant;
            ++rows;
        }
    } else {
        csv << "i,value,magnitude,resonant\n";
        const double tol = default_res_tol(lambda);
        for (const auto& i : half_lattice(static_cast<int>(lambda.size()), o.cutoff)) {
            S v = pairing(lambda, i);
            double m = ScalarTraits<S>::abs(v);
            bool res = ScalarTraits<S>::exact ? ScalarTraits<S>::is_zero(v) : m <= tol;
            csv << idx(i) << ',' << value(v) << ',' << m << ',' << res << '\n';
            resonant += res;
            ++rows;
        }
    }
    Json res;
    res["mode"] = ScalarTraits<S>::name;
    res["kind"] = o.siegel ? "siegel" : "torus";
    res["rows"] = rows;
    res["resonant"] = resonant;
    res["artifacts"]["table"] = run.write(".csv", csv.str());
    emit(run, res);
    return kOk;
}

int cmd_measure(const Options& o) {
    Run run("measure-demo", o);
    run.key("tau", o.tau);
    run.key("C", o.C_grid);
    run.key("cutoff", o.cutoff);
    run.key("samples", o.samples);
    run.key("seed", o.seed);
    run.key("n", o.dim);
    auto rows = measure_demo(o.tau, parse_doubles(o.C_grid), o.samples, o.seed, o.cutoff, o.dim);
    std::ostringstream csv;
    csv.precision(17);
    csv << "C,passed,samples,fraction\n";
    Json table = Json::array();
    for (const auto& r : rows) {
        csv << r.C << ',' << r.passed << ',' << r.samples << ',' << r.fraction << '\n';
        table.push_back({{"C", r.C}, {"passed", r.passed}, {"samples", r.samples}, {"fraction", r.fraction}});
    }
    Json res;
    res["tau"] = o.tau;
    res["cutoff"] = o.cutoff;
    res["seed"] = o.seed;
    res["n"] = o.dim;
    res["rows"] = table;
    res["artifacts"]["table"] = run.write(".csv", csv.str());
    emit(run, res);
    return kOk;
}

int cmd_product(const Options& o) {
    Run run("product-demo", o);
    run.key("sequence", o.sequence);
    run.key("count", o.count);
    run.key("amp", o.amp);
    if (o.sequence != "geometric" && o.sequence != "harmonic") throw ParseError("--sequence must be geometric or harmonic");
    auto d = product_demo(o.sequence == "harmonic", o.count, o.amp);
    emit(run, product_demo_json(d));
    return kOk;
}

int cmd_demo(const Options& o) {
    if (o.list) {
        for (const auto& n : demo_names()) std::cout << n << "\n";
        return kOk;
    }
    std::vector<std::string> names = o.demo.empty() ? demo_names() : std::vector<std::string>{o.demo};
    Json all = Json::array();
    int violations = 0;
    for (const auto& n : names) {
        Run run("demo", o);
        run.key("name", n);
        auto d = run_demo(n);
        Json j;
        j["name"] = d.name;
        j["mode"] = d.mode;
        j["summary"] = d.summary;
        j["lemma_checks"] = d.trace.lemma_checks();
        j["lemma_violations"] = d.trace.lemma_violations();
        j["artifacts"]["result"] = run.write_json(".json", j);
        j["artifacts"]["trace"] = run.write("-trace.csv", trace_to_csv(d.trace));
        violations += d.trace.lemma_violations();
        all.push_back({{"name", d.name},
                       {"lemma_checks", d.trace.lemma_checks()},
                       {"lemma_violations", d.trace.lemma_violations()},
                       {"artifacts", j["artifacts"]}});
    }
    std::cout << Json{{"demos", all}, {"lemma_violations", violations}}.dump(2) << "\n";
    return kOk;
}

Json error_json(const std::string& kind, const std::string& msg) {
    return {{"error", {{"kind", kind}, {"message", msg}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normal forms of vector fields, functions and Hamiltonians on truncated series jets"};
    app.require_subcommand(1);
    Options o;
    const char* env = std::getenv("ECHELON_OUT");
    o.out = env && *env ? env : "echelon-out";
    app.add_option("--out", o.out, "output directory (default $ECHELON_OUT or ./echelon-out)");

    auto add_exact = [&](CLI::App* c) { c->add_flag("--exact", o.exact, "exact rational / quadratic-surd coefficients"); };
    auto add_iter = [&](CLI::App* c) {
        c->add_option("--steps", o.steps, "iteration steps")->check(CLI::NonNegativeNumber);
        c->add_option("--schedule", o.schedule, "scale schedule: halving | thirds");
    };

    auto* lin = app.add_subcommand("linearize", "linearize a vector field with diagonal linear part");
    lin->add_option("--field", o.input, "vector-field literal (JSON)")->required();
    lin->add_option("--cutoff", o.cutoff, "total-degree cutoff")->check(CLI::Range(2, 200));
    lin->add_option("--strategy", o.strategy, "kolmogorov | kolmogorov-single | newton | picard");
    add_iter(lin);
    add_exact(lin);

    auto* mor = app.add_subcommand("morse", "reduce a function to its quadratic part");
    mor->add_option("--fn", o.input, "series literal (JSON)")->required();
    mor->add_option("--strategy", o.strategy, "kolmogorov | kolmogorov-single | newton | picard");
    add_iter(mor);
    add_exact(mor);

    auto* kam = app.add_subcommand("kam-step", "transversal iteration for a torus Hamiltonian");
    kam->add_option("--ham", o.input, "Hamiltonian literal (JSON)")->required();
    kam->add_option("--cutoff", o.cutoff, "lattice cutoff of the diophantine scan")->check(CLI::PositiveNumber);
    kam->add_option("--t-order", o.t_order, "t-order of the jet (default: from the file)")->check(CLI::PositiveNumber);
    kam->add_flag("--real", o.real, "require and check reality symmetry");
    add_iter(kam);
    add_exact(kam);

    auto* sing = app.add_subcommand("singular-kam", "transversal iteration at a hyperbolic fixed point");
    sing->add_option("--ham", o.input, "series literal on (q, p) slots (JSON)")->required();
    add_iter(sing);
    add_exact(sing);

    auto* dio = app.add_subcommand("diophantine", "diophantine constant of a frequency vector");
    dio->add_option("--lambda", o.lambda, "comma-separated frequencies, e.g. 1,1/2+1/2*sqrt(5)")->required();
    dio->add_option("--tau", o.tau, "exponent")->check(CLI::NonNegativeNumber);
    dio->add_option("--cutoff", o.cutoff, "lattice cutoff")->check(CLI::PositiveNumber);
    dio->add_option("--C", o.required_C, "required constant");
    add_exact(dio);

    auto* div = app.add_subcommand("divisors", "table of small divisors");
    div->add_option("--lambda", o.lambda, "comma-separated frequencies")->required();
    div->add_option("--cutoff", o.cutoff, "lattice cutoff")->check(CLI::PositiveNumber);
    div->add_flag("--siegel", o.siegel, "divisors (j,lambda) - lambda_i instead of (lambda,i)");
    add_exact(div);

    auto* prod = app.add_subcommand("product-demo", "infinite product of exponentials");
    prod->add_option("--sequence", o.sequence, "geometric | harmonic");
    prod->add_option("--count", o.count, "number of factors")->check(CLI::Range(2, 64));
    prod->add_option("--amp", o.amp, "harmonic amplitude N/s = amp/(n+1)")->check(CLI::PositiveNumber);

    auto* meas = app.add_subcommand("measure-demo", "Monte-Carlo fraction of diophantine frequencies");
    meas->add_option("--tau", o.tau, "exponent")->check(CLI::NonNegativeNumber);
    meas->add_option("--C", o.C_grid, "comma-separated constants");
    meas->add_option("--cutoff", o.cutoff, "lattice cutoff")->check(CLI::PositiveNumber);
    meas->add_option("--samples", o.samples, "sample count")->check(CLI::PositiveNumber);
    meas->add_option("--seed", o.seed, "RNG seed");
    meas->add_option("--n", o.dim, "dimension")->check(CLI::Range(1, 8));

    auto* demo = app.add_subcommand("demo", "run the worked examples");
    demo->add_option("--name", o.demo, "single demo to run");
    demo->add_flag("--list", o.list, "list demo names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << error_json("parse", e.what()).dump(2) << "\n";
        return kParse;
    }

    try {
        if (*lin) return o.exact ? cmd_linearize<Exact>(o) : cmd_linearize<Complex>(o);
        if (*mor) return o.exact ? cmd_morse<Exact>(o) : cmd_morse<Complex>(o);
        if (*kam) return o.exact ? cmd_kam<Exact>(o) : cmd_kam<Complex>(o);
        if (*sing) return o.exact ? cmd_singular<Exact>(o) : cmd_singular<Complex>(o);
        if (*dio) return o.exact ? cmd_diophantine<Exact>(o) : cmd_diophantine<Complex>(o);
        if (*div) return o.exact ? cmd_divisors<Exact>(o) : cmd_divisors<Complex>(o);
        if (*prod) return cmd_product(o);
        if (*meas) return cmd_measure(o);
        if (*demo) return cmd_demo(o);
    } catch (const ParseError& e) {
        std::cout << error_json("parse", e.what()).dump(2) << "\n";
        return kParse;
    } catch (const ResonanceError& e) {
        Json j = error_json("resonance", e.what());
        j["error"]["witness"] = e.witness();
        if (e.slot() >= 0) j["error"]["slot"] = e.slot();
        std::cout << j.dump(2) << "\n";
        return kResonance;
    } catch (const ConvergenceAbort& e) {
        Json j = error_json("convergence-abort", e.what());
        j["error"]["step"] = e.step();
        std::cout << j.dump(2) << "\n";
        return kAbort;
    } catch (const PreconditionError& e) {
        std::cout << error_json("precondition", e.what()).dump(2) << "\n";
        return kPrecondition;
    } catch (const std::exception& e) {
        std::cout << error_json("internal", e.what()).dump(2) << "\n";
        return 1;
    }
    return kOk;
}
