#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

#include "qintcart/classical.hpp"
#include "qintcart/determining.hpp"
#include "qintcart/parse.hpp"
#include "qintcart/rng.hpp"
#include "qintcart/version.hpp"

namespace {

using namespace qintcart;
using nlohmann::json;

constexpr int kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitBlowup = 3;

uint64_t default_seed() {
    if (const char* env = std::getenv("QINTCART_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CLI::ValidationError("QINTCART_SEED", "not an unsigned integer");
        }
    }
    return 0;
}

std::vector<std::string> select_cases(const std::string& filter, bool all) {
    std::vector<std::string> out;
    for (const std::string& id : catalog_ids())
        if (all || id.rfind(filter, 0) == 0) out.push_back(id);
    return out;
}

std::string one_line_summary(const CaseSpec& spec) {
    auto clip = [](std::string s, size_t n) {
        if (s.size() > n) s = s.substr(0, n - 3) + "...";
        return s;
    };
    std::string omega = "(" + to_string(spec.omega[0]) + ", " + to_string(spec.omega[1]) + ", " +
                        to_string(spec.omega[2]) + ")";
    std::string free;
    for (const auto& [name, b] : spec.params)
        if (!b) free += (free.empty() ? "" : ",") + name;
    if (free.empty()) free = "-";
    return "Omega=" + clip(omega, 58) + "  V=" + clip(to_string(spec.field.V), 36) +
           "  free: " + free;
}

int cmd_list(const std::string& filter, const std::string& format) {
    std::vector<std::string> ids = select_cases(filter, filter.empty());
    if (ids.empty()) {
        std::cerr << "no catalog entries match '" << filter << "'\n";
        return kExitConfig;
    }
    if (format == "json") {
        json rows = json::array();
        for (const std::string& id : ids)
            rows.push_back({{"id", id}, {"summary", one_line_summary(make_case(id))}});
        std::cout << json{{"schema", std::string(kSchema)}, {"cases", rows}}.dump(2) << "\n";
    } else {
        for (const std::string& id : ids) {
            printf("%-6s %s\n", id.c_str(), one_line_summary(make_case(id)).c_str());
        }
    }
    return kExitPass;
}

struct VerifyArgs {
    std::string case_id;
    bool all = false;
    std::string perturb;
    uint64_t seed = 0;
    int trials = 20;
    double tol = 1e-9;
    std::string format = "text";
};

CaseSpec build_spec(const std::string& id, const std::string& perturb) {
    CaseSpec spec = make_case(id);
    if (!perturb.empty()) {
        size_t cut = perturb.find_first_of("+-");
        if (cut == std::string::npos || cut == 0)
            throw catalog_error("--perturb expects TARGET+EXPR or TARGET-EXPR, e.g. V+x*y");
        spec = perturb_case(spec, perturb.substr(0, cut), "0" + perturb.substr(cut));
    }
    return spec;
}

int cmd_verify(const VerifyArgs& a) {
    std::vector<std::string> ids;
    if (a.all) ids = catalog_ids();
    else if (!a.case_id.empty()) ids.push_back(a.case_id);
    else {
        std::cerr << "verify needs --case ID or --all\n";
        return kExitConfig;
    }

    std::vector<std::future<VerificationReport>> jobs;
    for (const std::string& id : ids) {
        uint64_t case_seed = derive_seed(a.seed, "case", Rng::hash_string(id));
        jobs.push_back(std::async(std::launch::async, [=, &a] {
            return verify_case(build_spec(id, a.perturb), a.trials, a.tol, case_seed);
        }));
    }

    bool all_pass = true;
    json reports = json::array();
    for (auto& j : jobs) {
        VerificationReport rep = j.get();
        all_pass = all_pass && rep.pass;
        if (a.format == "json") reports.push_back(json::parse(report_to_json(rep)));
        else std::cout << rep.text();
    }
    if (a.format == "json") {
        std::cout << json{{"schema", std::string(kSchema)},
                          {"seed", a.seed},
                          {"verdict", all_pass ? "pass" : "fail"},
                          {"reports", reports}}
                         .dump(2)
                  << "\n";
    } else if (ids.size() > 1) {
        std::cout << (all_pass ? "all cases pass\n" : "FAILURES present\n");
    }
    return all_pass ? kExitPass : kExitFail;
}

int cmd_determining(const std::string& substitute, bool latex, const std::string& format,
                    int trials, double tol, uint64_t seed) {
    ResidualSystem sys = generate(CartesianAnsatz::general());
    if (!substitute.empty()) {
        CaseSpec spec = make_case(substitute);
        std::vector<Expr> reduced = substitute_case(sys, spec);
        EvalPoint base;
        Rng prng(derive_seed(seed, "params", Rng::hash_string(spec.id)));
        SymbolSet syms;
        for (const Expr& e : reduced) {
            SymbolSet s = collect_symbols(e);
            syms.params.insert(s.params.begin(), s.params.end());
        }
        for (const std::string& p : syms.params) base.params.emplace(p, prng.annulus());

        bool all_zero = true;
        json rows = json::array();
        for (size_t k = 0; k < reduced.size(); ++k) {
            const Residual& r = sys.rows[k];
            ZeroTestConfig cfg{trials, tol, derive_seed(seed, "subst", k)};
            ZeroTestResult zt = is_zero(reduced[k], cfg, &base);
            all_zero = all_zero && zt.zero;
            if (format == "json") {
                rows.push_back({{"commutator", std::string(commutator_name(r.source))},
                                {"order", r.order},
                                {"index", {r.index[0], r.index[1], r.index[2]}},
                                {"pass", zt.zero},
                                {"worst_residual", zt.worst}});
            } else {
                printf("[%s] order %d d^(%d,%d,%d): %s (worst %.3g)\n",
                       std::string(commutator_name(r.source)).c_str(), r.order, r.index[0],
                       r.index[1], r.index[2], zt.zero ? "zero" : "NONZERO", zt.worst);
            }
        }
        if (format == "json")
            std::cout << json{{"schema", std::string(kSchema)},
                              {"case", spec.id},
                              {"verdict", all_zero ? "pass" : "fail"},
                              {"residuals", rows}}
                             .dump(2)
                      << "\n";
        else
            std::cout << (all_zero ? "all residuals reduce to zero\n"
                                   : "NONZERO residuals remain\n");
        return all_zero ? kExitPass : kExitFail;
    }
    if (latex) {
        std::cout << residuals_to_latex(sys);
        return kExitPass;
    }
    if (format == "json") {
        std::cout << residuals_to_json(sys) << "\n";
    } else {
        for (const Residual& r : sys.rows)
            printf("[%s] order %d d^(%d,%d,%d): %s = 0\n",
                   std::string(commutator_name(r.source)).c_str(), r.order, r.index[0],
                   r.index[1], r.index[2], to_string(r.normalized).c_str());
    }
    return kExitPass;
}

struct SimArgs {
    std::string case_id;
    std::string profiles;      // "u1=x^2,u2=y^2"
    std::vector<std::string> params; // name=value
    std::map<std::string, double> ode_consts; // --C, --C1, ... aliases
    double t_final = 100.0;
    double rtol = 1e-10;
    int samples = 1024;
    double drift_bound = 1e-6;
    double f0 = 1.0, f0p = 0.0, g0 = 1.0, g0p = 0.0;
    double profile_range = 25.0;
    double profile_rtol = 1e-12;
    std::string state;
    std::string out = "trajectory";
    uint64_t seed = 0;
    std::string format = "text";
};

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        // commas inside parentheses belong to the value
        size_t depth_scan = pos;
        int depth = 0;
        for (; depth_scan < text.size(); ++depth_scan) {
            char c = text[depth_scan];
            if (c == '(') ++depth;
            else if (c == ')') --depth;
            else if (c == ',' && depth == 0) break;
        }
        comma = depth_scan;
        std::string item = text.substr(pos, comma - pos);
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw catalog_error("expected name=value in '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
        pos = comma == text.size() ? comma : comma + 1;
    }
    return out;
}

// quadratic/linear/constant coefficients of a rule's replacement as a
// polynomial in the function value, with parameters already bound
std::array<double, 3> rule_poly(const RewriteRule& rule, const EvalPoint& params) {
    Expr t = Expr::param("qintcart_rule_t");
    Expr poly = substitute_functions(rule.replacement, {{rule.fn, t}});
    Expr d1 = diff_param(poly, "qintcart_rule_t");
    Expr d2 = diff_param(d1, "qintcart_rule_t");
    EvalPoint pt = params;
    pt.params["qintcart_rule_t"] = 0.0;
    auto real_of = [&](const Expr& e) {
        std::complex<double> v = eval(e, pt);
        if (std::abs(v.imag()) > 1e-12)
            throw catalog_error("rule coefficients must be real for simulation");
        return v.real();
    };
    return {real_of(d2) / 2.0, real_of(d1), real_of(poly)};
}

int cmd_simulate(const SimArgs& a) {
    if (a.case_id.empty()) {
        std::cerr << "simulate needs --case ID\n";
        return kExitConfig;
    }
    CaseSpec spec = make_case(a.case_id);

    ProfileBindings pb;
    for (const std::string& kv : a.params) {
        auto m = parse_kv(kv);
        for (const auto& [name, val] : m) pb.params[name] = std::stod(val);
    }
    for (const auto& [name, val] : a.ode_consts) pb.params[name] = val;
    if (!a.profiles.empty())
        for (const auto& [name, text] : parse_kv(a.profiles)) pb.closed[name] = parse(text);

    // every case parameter must have a real value
    for (const auto& [name, binding] : spec.params) {
        if (binding || pb.params.count(name)) continue;
        std::cerr << "parameter " << name << " needs a value (--param " << name << "=...)\n";
        return kExitConfig;
    }

    EvalPoint pp;
    pp.params = pb.params;

    // ruled functions without a closed profile are integrated from their ODE
    for (const RewriteRule& rule : spec.rules) {
        if (pb.closed.count(rule.fn)) continue;
        std::array<double, 3> c;
        try {
            c = rule_poly(rule, pp);
        } catch (const eval_error& e) {
            std::cerr << "cannot set up profile for " << rule.fn << ": " << e.what() << "\n";
            return kExitConfig;
        }
        bool is_f = rule.fn == "f";
        auto prof = integrate_profile(c[0], c[1], c[2], is_f ? a.f0 : a.g0,
                                      is_f ? a.f0p : a.g0p, -a.profile_range, a.profile_range,
                                      a.profile_rtol);
        pb.numeric[rule.fn] = prof;
    }

    ClassicalSystem sys;
    try {
        sys = make_classical_system(spec, pb);
    } catch (const expr_error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    for (const Expr* obs : {&sys.H, &sys.Q, &sys.P}) {
        for (const FnKey& k : collect_symbols(*obs).fns) {
            if (!sys.bindings.fn_profiles.count(k.name)) {
                std::cerr << "abstract function " << k.name
                          << " needs a profile (--profile " << k.name << "=...)\n";
                return kExitConfig;
            }
        }
    }

    PhaseState s0;
    if (!a.state.empty()) {
        std::stringstream ss(a.state);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != 6) {
            std::cerr << "--state expects 6 comma-separated numbers\n";
            return kExitConfig;
        }
        for (int j = 0; j < 3; ++j) {
            s0.q[j] = vals[j];
            s0.p[j] = vals[3 + j];
        }
    } else {
        Rng rng(derive_seed(a.seed, "state"));
        for (int j = 0; j < 3; ++j) {
            s0.q[j] = rng.uniform(-1.0, 1.0);
            s0.p[j] = rng.uniform(-1.0, 1.0);
        }
    }

    TrajectoryLog log;
    try {
        log = integrate_trajectory(sys, s0, a.t_final, a.rtol, a.samples);
    } catch (const eval_error& e) {
        std::cerr << "trajectory aborted: " << e.what() << "\n";
        return kExitBlowup;
    }

    std::ofstream csv(a.out + ".csv");
    csv << log.csv();
    std::ofstream js(a.out + ".json");
    js << trajectory_to_json(log);

    if (a.format == "json") {
        std::cout << json{{"schema", std::string(kSchema)},
                          {"case", spec.id},
                          {"seed", a.seed},
                          {"drift", {{"H", log.drift[0]}, {"Q", log.drift[1]}, {"P", log.drift[2]}}},
                          {"blowup", log.blew_up ? json(log.blowup_time) : json()},
                          {"files", {a.out + ".csv", a.out + ".json"}}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "case " << spec.id << "  t_final " << a.t_final << "  rtol " << a.rtol
                  << "\n";
        std::cout << "drift  H " << log.drift[0] << "  Q " << log.drift[1] << "  P "
                  << log.drift[2] << "\n";
        if (log.blew_up) std::cout << "blow-up at t = " << log.blowup_time << "\n";
        std::cout << "wrote " << a.out << ".csv, " << a.out << ".json\n";
    }
    if (log.blew_up) return kExitBlowup;
    return log.max_drift() < a.drift_bound ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric verification kernel for 3D integrable systems in magnetic "
                 "fields (Cartesian class)"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    bool seed_given = false;

    // list
    std::string list_filter, list_format = "text";
    CLI::App* list = app.add_subcommand("list", "show the case catalog");
    list->add_option("--case", list_filter, "id prefix filter");
    list->add_option("--format", list_format, "text|json")->check(CLI::IsMember({"text", "json"}));

    // verify
    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "check [H,Q]=[H,P]=[Q,P]=0 for catalog cases");
    verify->add_option("--case", va.case_id, "case id");
    verify->add_flag("--all", va.all, "verify the whole catalog");
    verify->add_option("--perturb", va.perturb, "tamper before verifying, e.g. V+x*y");
    verify->add_option("--trials", va.trials, "random points per zero test")->check(CLI::PositiveNumber);
    verify->add_option("--tol", va.tol, "relative residual tolerance");
    verify->add_option("--seed", seed, "PRNG seed (env QINTCART_SEED)")->each([&](const std::string&) { seed_given = true; });
    verify->add_option("--format", va.format, "text|json")->check(CLI::IsMember({"text", "json"}));

    // determining
    std::string det_substitute, det_format = "json";
    bool det_latex = false;
    int det_trials = 20;
    double det_tol = 1e-9;
    CLI::App* det = app.add_subcommand("determining", "emit the determining PDE system");
    det->add_option("--substitute", det_substitute, "substitute a case and report residuals");
    det->add_flag("--latex", det_latex, "emit a LaTeX fragment");
    det->add_option("--format", det_format, "text|json")->check(CLI::IsMember({"text", "json"}));
    det->add_option("--trials", det_trials, "random points per zero test")->check(CLI::PositiveNumber);
    det->add_option("--tol", det_tol, "relative residual tolerance");
    det->add_option("--seed", seed, "PRNG seed")->each([&](const std::string&) { seed_given = true; });

    // simulate
    SimArgs sa;
    CLI::App* sim = app.add_subcommand("simulate", "integrate a classical trajectory");
    sim->add_option("--case", sa.case_id, "case id");
    sim->add_option("--profile", sa.profiles, "closed profiles, e.g. u1=x^2,u2=y^2,u3=z^2");
    sim->add_option("--param", sa.params, "parameter values, e.g. a1=1,k1=0.5")->take_all();
    for (const char* c : {"C", "C1", "C2", "C3", "C4", "C5", "C6"})
        sim->add_option(std::string("--") + c, sa.ode_consts[c], "ODE/potential constant");
    sim->add_option("--t-final", sa.t_final, "integration time");
    sim->add_option("--rtol", sa.rtol, "trajectory relative tolerance");
    sim->add_option("--samples", sa.samples, "log samples")->check(CLI::Range(2, 1000000));
    sim->add_option("--drift-bound", sa.drift_bound, "conservation drift bound for exit 0");
    sim->add_option("--f0", sa.f0, "f(0)");
    sim->add_option("--f0p", sa.f0p, "f'(0)");
    sim->add_option("--g0", sa.g0, "g(0)");
    sim->add_option("--g0p", sa.g0p, "g'(0)");
    sim->add_option("--profile-range", sa.profile_range, "tabulation half-range for ODE profiles");
    sim->add_option("--profile-rtol", sa.profile_rtol, "profile integration tolerance");
    sim->add_option("--state", sa.state, "initial state x,y,z,p1,p2,p3 (seeded if absent)");
    sim->add_option("--out", sa.out, "output file prefix");
    sim->add_option("--seed", seed, "PRNG seed")->each([&](const std::string&) { seed_given = true; });
    sim->add_option("--format", sa.format, "text|json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (!seed_given) seed = default_seed();
        if (*list) return cmd_list(list_filter, list_format);
        if (*verify) {
            va.seed = seed;
            return cmd_verify(va);
        }
        if (*det) return cmd_determining(det_substitute, det_latex, det_format, det_trials,
                                         det_tol, seed);
        if (*sim) {
            sa.seed = seed;
            return cmd_simulate(sa);
        }
    } catch (const parse_error& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const expr_error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
