#include <json.hpp>

#include "qintcart/classical.hpp"
#include "qintcart/determining.hpp"
#include "qintcart/parse.hpp"
#include "qintcart/version.hpp"

namespace qintcart {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json complex_json(std::complex<double> v) { return json::array({v.real(), v.imag()}); }

json witness_json(const Witness& w) {
    json vars = json::object();
    for (Axis a : kAxes) {
        const auto& v = w.point.vars[static_cast<int>(a)];
        if (v) vars[std::string(1, axis_name(a))] = complex_json(*v);
    }
    json params = json::object();
    for (const auto& [name, v] : w.point.params) params[name] = complex_json(v);
    json fns = json::object();
    for (const auto& [key, v] : w.point.fn_values) fns[key.str()] = complex_json(v);
    json out{{"vars", vars}, {"params", params}, {"fns", fns},
             {"value", complex_json(w.value)}, {"scale", w.scale}};
    if (w.point.hbar) out["hbar"] = *w.point.hbar;
    return out;
}

} // namespace

std::string case_to_json(const CaseSpec& spec) {
    json params = json::object();
    for (const auto& [name, binding] : spec.params)
        params[name] = binding ? json(to_string(*binding)) : json("free");

    json rules = json::array();
    for (const RewriteRule& r : spec.rules)
        rules.push_back({{"fn", r.fn},
                         {"var", std::string(1, axis_name(r.formal))},
                         {"order", 2},
                         {"replacement", to_string(r.replacement)}});

    json eq4 = json::array();
    for (const Expr& e : spec.eq4_fns) eq4.push_back(to_string(e));

    json doc{{"schema", std::string(kSchema)},
             {"id", spec.id},
             {"params", params},
             {"field", {{"V", to_string(spec.field.V)},
                        {"A", {to_string(spec.field.A[0]), to_string(spec.field.A[1]),
                               to_string(spec.field.A[2])}}}},
             {"Q", print_momentum(spec.Q)},
             {"P", print_momentum(spec.P)},
             {"rules", rules},
             {"eq4", eq4}};
    return doc.dump(2);
}

CaseSpec case_from_json(const std::string& text) {
    json doc = json::parse(text);
    CaseSpec spec;
    spec.id = doc.at("id").get<std::string>();
    for (const auto& [name, v] : doc.at("params").items()) {
        std::string s = v.get<std::string>();
        spec.params[name] = s == "free" ? std::optional<Expr>{} : std::optional<Expr>{parse(s)};
    }
    spec.field.V = parse(doc.at("field").at("V").get<std::string>());
    for (int j = 0; j < 3; ++j)
        spec.field.A[j] = parse(doc.at("field").at("A").at(j).get<std::string>());
    spec.Q = parse_momentum(doc.at("Q").get<std::string>());
    spec.P = parse_momentum(doc.at("P").get<std::string>());
    for (const auto& r : doc.at("rules")) {
        std::string var = r.at("var").get<std::string>();
        Axis formal = var == "x" ? Axis::x : (var == "y" ? Axis::y : Axis::z);
        spec.rules.push_back(
            RewriteRule::make(r.at("fn").get<std::string>(), formal,
                              parse(r.at("replacement").get<std::string>())));
    }
    if (doc.contains("eq4")) {
        for (int j = 0; j < 6; ++j) spec.eq4_fns[j] = parse(doc.at("eq4").at(j).get<std::string>());
    }
    // the printed field is not part of the document; rebuild it from A
    spec.omega = curl(spec.field.A);
    auto res = eq4_residuals(spec.eq4_fns[0], spec.eq4_fns[1], spec.eq4_fns[2], spec.eq4_fns[3],
                             spec.eq4_fns[4], spec.eq4_fns[5]);
    spec.constraint_residuals.assign(res.begin(), res.end());
    return spec;
}

std::string report_to_json(const VerificationReport& r) {
    json params = json::object();
    for (const auto& [name, v] : r.parameter_sample) params[name] = complex_json(v);

    json comms = json::object();
    for (const CommutatorReport& cr : r.commutators) {
        json c{{"pass", cr.pass},
               {"worst_residual", cr.worst},
               {"worst_index", {cr.worst_index[0], cr.worst_index[1], cr.worst_index[2]}}};
        c["witness"] = cr.witness ? witness_json(*cr.witness) : json();
        comms[cr.name] = c;
    }

    json doc{{"schema", std::string(kSchema)},
             {"engine", std::string(kEngineVersion)},
             {"case", r.case_id},
             {"seed", r.seed},
             {"trials", r.trials},
             {"tol", r.tol},
             {"params", params},
             {"commutators", comms},
             {"eq4", {{"pass", r.eq4_pass}, {"worst_residual", r.eq4_worst}}},
             {"curl", {{"pass", r.curl_pass}, {"worst_residual", r.curl_worst}}},
             {"omega", {r.omega_printed[0], r.omega_printed[1], r.omega_printed[2]}},
             {"complex_field", r.complex_field},
             {"verdict", r.pass ? "pass" : "fail"}};
    return doc.dump(2);
}

std::string residuals_to_json(const ResidualSystem& system) {
    json rows = json::array();
    for (const Residual& r : system.rows)
        rows.push_back({{"commutator", std::string(commutator_name(r.source))},
                        {"order", r.order},
                        {"index", {r.index[0], r.index[1], r.index[2]}},
                        {"residual", to_string(r.normalized)},
                        {"raw", to_string(r.raw)}});
    json doc{{"schema", std::string(kSchema)}, {"residuals", rows}};
    return doc.dump(2);
}

std::string trajectory_to_json(const TrajectoryLog& log) {
    json t = json::array(), states = json::array(), H = json::array(), Q = json::array(),
         P = json::array();
    for (size_t k = 0; k < log.t.size(); ++k) {
        t.push_back(log.t[k]);
        states.push_back(log.states[k]);
        H.push_back(log.observables[k][0]);
        Q.push_back(log.observables[k][1]);
        P.push_back(log.observables[k][2]);
    }
    json doc{{"schema", std::string(kSchema)},
             {"columns", {"x", "y", "z", "p1", "p2", "p3"}},
             {"t", t},
             {"states", states},
             {"observables", {{"H", H}, {"Q", Q}, {"P", P}}},
             {"drift", {{"H", log.drift[0]}, {"Q", log.drift[1]}, {"P", log.drift[2]}}},
             {"blowup", log.blew_up ? json(log.blowup_time) : json()}};
    return doc.dump(2);
}

} // namespace qintcart
