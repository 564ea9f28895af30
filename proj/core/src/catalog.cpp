#include "qintcart/catalog.hpp"

#include <algorithm>
#include <sstream>

#include "qintcart/parse.hpp"
#include "qintcart/rng.hpp"

namespace qintcart {

std::array<Expr, 3> curl(const std::array<Expr, 3>& A) {
    return {diff(A[2], Axis::y) - diff(A[1], Axis::z),
            diff(A[0], Axis::z) - diff(A[2], Axis::x),
            diff(A[1], Axis::x) - diff(A[0], Axis::y)};
}

EMField gauge_transform(const EMField& field, const Expr& F) {
    EMField out;
    out.V = field.V;
    for (Axis a : kAxes)
        out.A[static_cast<int>(a)] = field.A[static_cast<int>(a)] + diff(F, a);
    return out;
}

DiffOp hamiltonian_op(const EMField& field) {
    MomentumPolynomial kinetic(MomentumOrdering::left);
    for (Axis a : kAxes) {
        MultiIndex m{0, 0, 0};
        m[static_cast<int>(a)] = 2;
        kinetic.set(m, Expr::rational(1, 2));
    }
    kinetic.set({0, 0, 0}, field.V);

    MomentumPolynomial coupling(MomentumOrdering::symmetrized);
    for (Axis a : kAxes)
        if (!field.A[static_cast<int>(a)].is_zero_const())
            coupling.set(unit_index(a), field.A[static_cast<int>(a)]);

    return add(from_momentum(kinetic), from_momentum(coupling));
}

namespace {

Expr E(const std::string& s) { return parse(s); }

MomentumPolynomial substitute_mp(const MomentumPolynomial& mp,
                                 const std::map<std::string, Expr>& fns,
                                 const std::map<std::string, Expr>& params) {
    MomentumPolynomial out(mp.ordering());
    for (const auto& [idx, c] : mp.terms())
        out.set(idx, substitute_params(substitute_functions(c, fns), params));
    return out;
}

struct RawCase {
    EMField field;
    MomentumPolynomial Q{MomentumOrdering::left};
    MomentumPolynomial P{MomentumOrdering::left};
    std::vector<RewriteRule> rules;
    std::array<Expr, 3> omega;
    std::array<Expr, 6> eq4; // f2, f3, g1, g3, r1, r2
    std::vector<std::string> free_params;
    std::vector<std::pair<std::string, std::string>> constraints; // subcase-fixed params
};

struct Family6 {
    const char *u2, *u3, *w1, *w3, *v1, *v2, *u1, *w2, *v3;
};

const Family6& family6(char which) {
    static const Family6 f61{
        "a3*(r1*cosh(a1*x)+k1*sinh(a1*x))",
        "a2*(r1*sinh(a1*x)+k1*cosh(a1*x))",
        "a3*(r2*cosh(a2*y)+k2*sinh(a2*y))",
        "a1*(r2*sinh(a2*y)+k2*cosh(a2*y))",
        "a2*(r3*cosh(a3*z)+k3*sinh(a3*z))",
        "a1*(r3*sinh(a3*z)+k3*cosh(a3*z))",
        "a2^2*a3^2/4*((r1^2+k1^2)*cosh(2*a1*x)+2*r1*k1*sinh(2*a1*x))+C*(r1*cosh(a1*x)+k1*sinh(a1*x))",
        "a1^2*a3^2/4*((r2^2+k2^2)*cosh(2*a2*y)+2*r2*k2*sinh(2*a2*y))+C*(r2*cosh(a2*y)+k2*sinh(a2*y))",
        "a1^2*a2^2/4*((r3^2+k3^2)*cosh(2*a3*z)+2*r3*k3*sinh(2*a3*z))+C1*(r3*cosh(a3*z)+k3*sinh(a3*z))"};
    static const Family6 f62{
        "a3*(r1*sin(a1*x)-k1*cos(a1*x))",
        "a2*(r1*cos(a1*x)+k1*sin(a1*x))",
        "a3*(r2*sin(a2*y)-k2*cos(a2*y))",
        "a1*(r2*cos(a2*y)+k2*sin(a2*y))",
        "a2*(r3*cosh(a3*z)+k3*sinh(a3*z))",
        "a1*(r3*sinh(a3*z)+k3*cosh(a3*z))",
        "a2^2*a3^2/4*((r1^2-k1^2)*cos(2*a1*x)+2*r1*k1*sin(2*a1*x))+C*(r1*sin(a1*x)-k1*cos(a1*x))",
        "a1^2*a3^2/4*((r2^2-k2^2)*cos(2*a2*y)+2*r2*k2*sin(2*a2*y))+C*(r2*sin(a2*y)-k2*cos(a2*y))",
        "-a1^2*a2^2/4*((r3^2+k3^2)*cosh(2*a3*z)+2*r3*k3*sinh(2*a3*z))+C1*(r3*cosh(a3*z)+k3*sinh(a3*z))"};
    static const Family6 f63{
        "a3*(r1*cos(a1*x)+k1*sin(a1*x))",
        "i*a2*(r1*sin(a1*x)-k1*cos(a1*x))",
        "a3*(r2*cos(a2*y)+k2*sin(a2*y))",
        "i*a1*(r2*sin(a2*y)-k2*cos(a2*y))",
        "a2*(r3*cos(a3*z)+k3*sin(a3*z))",
        "i*a1*(r3*sin(a3*z)-k3*cos(a3*z))",
        "-a2^2*a3^2/4*((r1^2-k1^2)*cos(2*a1*x)+2*r1*k1*sin(2*a1*x))+C*(r1*cos(a1*x)+k1*sin(a1*x))",
        "-a1^2*a3^2/4*((r2^2-k2^2)*cos(2*a2*y)+2*r2*k2*sin(2*a2*y))+C*(r2*cos(a2*y)+k2*sin(a2*y))",
        "-a1^2*a2^2/4*((r3^2-k3^2)*cos(2*a3*z)+2*r3*k3*sin(2*a3*z))+C1*(r3*sin(a3*z)-k3*cos(a3*z))"};
    static const Family6 f64{
        "a3*(r1*cosh(a1*x)+k1*sinh(a1*x))",
        "-i*a2*(r1*sinh(a1*x)+k1*cosh(a1*x))",
        "a3*(r2*cosh(a2*y)+k2*sinh(a2*y))",
        "-i*a1*(r2*sinh(a2*y)+k2*cosh(a2*y))",
        "a2*(r3*cos(a3*z)+k3*sin(a3*z))",
        "i*a1*(r3*sin(a3*z)-k3*cos(a3*z))",
        "a2^2*a3^2/4*((r1^2+k1^2)*cosh(2*a1*x)+2*r1*k1*sinh(2*a1*x))+C*(r1*cosh(a1*x)+k1*sinh(a1*x))",
        "a1^2*a3^2/4*((r2^2+k2^2)*cosh(2*a2*y)+2*r2*k2*sinh(2*a2*y))+C*(r2*cosh(a2*y)+k2*sinh(a2*y))",
        "a1^2*a2^2/4*((r3^2-k3^2)*cos(2*a3*z)+2*r3*k3*sin(2*a3*z))+C1*(r3*sin(a3*z)-k3*cos(a3*z))"};
    switch (which) {
        case '1': return f61;
        case '2': return f62;
        case '3': return f63;
        default: return f64;
    }
}

std::vector<std::pair<std::string, std::string>> subcase_constraints(char family, char sub) {
    using T = std::vector<std::pair<std::string, std::string>>;
    if (sub == 'a') return T{{"C", "0"}, {"C1", "0"}};
    switch (family) {
        case '1':
            switch (sub) {
                case 'b': return T{{"r1", "k1"}, {"r2", "k2"}, {"r3", "k3"}, {"C1", "C"}};
                case 'c': return T{{"r1", "k1"}, {"r2", "-k2"}, {"r3", "-k3"}, {"C1", "C"}};
                case 'd': return T{{"r1", "-k1"}, {"r2", "k2"}, {"r3", "-k3"}, {"C1", "-C"}};
                default:  return T{{"r1", "-k1"}, {"r2", "-k2"}, {"r3", "k3"}, {"C1", "-C"}};
            }
        case '2':
            switch (sub) {
                case 'b': return T{{"r1", "i*k1"}, {"r2", "-i*k2"}, {"r3", "-k3"}, {"C1", "i*C"}};
                case 'c': return T{{"r1", "i*k1"}, {"r2", "i*k2"}, {"r3", "k3"}, {"C1", "i*C"}};
                case 'd': return T{{"r1", "-i*k1"}, {"r2", "-i*k2"}, {"r3", "k3"}, {"C1", "-i*C"}};
                default:  return T{{"r1", "-i*k1"}, {"r2", "i*k2"}, {"r3", "-k3"}, {"C1", "-i*C"}};
            }
        case '3':
            switch (sub) {
                case 'b': return T{{"r1", "i*k1"}, {"r2", "-i*k2"}, {"r3", "i*k3"}, {"C1", "i*C"}};
                case 'c': return T{{"r1", "-i*k1"}, {"r2", "-i*k2"}, {"r3", "-i*k3"}, {"C1", "i*C"}};
                case 'd': return T{{"r1", "-i*k1"}, {"r2", "i*k2"}, {"r3", "i*k3"}, {"C1", "-i*C"}};
                default:  return T{{"r1", "i*k1"}, {"r2", "i*k2"}, {"r3", "-i*k3"}, {"C1", "-i*C"}};
            }
        default:
            switch (sub) {
                case 'b': return T{{"r1", "-k1"}, {"r2", "-k2"}, {"r3", "-i*k3"}, {"C1", "C"}};
                case 'c': return T{{"r1", "k1"}, {"r2", "-k2"}, {"r3", "i*k3"}, {"C1", "C"}};
                case 'd': return T{{"r1", "k1"}, {"r2", "k2"}, {"r3", "-i*k3"}, {"C1", "-C"}};
                default:  return T{{"r1", "-k1"}, {"r2", "k2"}, {"r3", "i*k3"}, {"C1", "-C"}};
            }
    }
}

RawCase raw_case_6(char family, char sub) {
    const Family6& f = family6(family);
    std::map<std::string, Expr> fns{
        {"u1", E(f.u1)}, {"u2", E(f.u2)}, {"u3", E(f.u3)},
        {"w1", E(f.w1)}, {"w2", E(f.w2)}, {"w3", E(f.w3)},
        {"v1", E(f.v1)}, {"v2", E(f.v2)}, {"v3", E(f.v3)}};

    std::map<std::string, Expr> constraint_subst;
    auto table = subcase_constraints(family, sub);
    for (const auto& [name, rhs] : table) constraint_subst.emplace(name, E(rhs));

    auto build = [&](const std::string& s) {
        return substitute_params(substitute_functions(E(s), fns), constraint_subst);
    };

    RawCase rc;
    rc.field.V =
        build("-1/4*(u1(x)+w2(y)+v3(z)+w1(y)*u2''(x)+v1(z)*u3''(x)+u2(x)*w1''(y)"
              "+v2(z)*w3''(y)+u3(x)*v1''(z)+w3(y)*v2''(z))");
    rc.field.A = {build("(w1'(y)+v1'(z))/4"), build("(u2'(x)+v2'(z))/4"),
                  build("(u3'(x)+w3'(y))/4")};
    rc.omega = {build("(w3''(y)-v2''(z))/4"), build("(v1''(z)-u3''(x))/4"),
                build("(u2''(x)-w1''(y))/4")};
    rc.Q = substitute_mp(
        parse_momentum("p1^2+u2'(x)*p2+u3'(x)*p3-1/2*(w1(y)*u2''(x)+v1(z)*u3''(x)+u1(x))"),
        fns, constraint_subst);
    rc.P = substitute_mp(
        parse_momentum("p2^2+w1'(y)*p1+w3'(y)*p3-1/2*(u2(x)*w1''(y)+v2(z)*w3''(y)+w2(y))"),
        fns, constraint_subst);
    rc.eq4 = {build("u2'(x)"), build("u3'(x)"), build("w1'(y)"),
              build("w3'(y)"), build("v1'(z)"), build("v2'(z)")};

    if (sub == 'a')
        rc.free_params = {"a1", "a2", "a3", "r1", "r2", "r3", "k1", "k2", "k3"};
    else
        rc.free_params = {"a1", "a2", "a3", "k1", "k2", "k3", "C"};
    for (const auto& [name, rhs] : table) rc.constraints.emplace_back(name, rhs);
    return rc;
}

RawCase raw_case(const std::string& id) {
    RawCase rc;
    if (id == "1") {
        rc.field.V = E("u1(x)+u2(y)+u3(z)");
        rc.field.A = {Expr(), Expr(), Expr()};
        rc.omega = {Expr(), Expr(), Expr()};
        rc.Q = parse_momentum("p1^2+2*u1(x)");
        rc.P = parse_momentum("p2^2+2*u2(y)");
        rc.eq4 = {Expr(), Expr(), Expr(), Expr(), Expr(), Expr()};
        return rc;
    }
    if (id == "2") {
        rc.field.V = E("v3(z)");
        rc.field.A = {E("v1(z)"), E("v2(z)"), Expr()};
        rc.omega = {E("-v2'(z)"), E("v1'(z)"), Expr()};
        rc.Q = parse_momentum("p1^2");
        rc.P = parse_momentum("p2^2");
        rc.eq4 = {Expr(), Expr(), Expr(), Expr(), E("4*v1(z)"), E("4*v2(z)")};
        return rc;
    }
    if (id == "3") {
        rc.field.V = E("u1(x)+u2(y)");
        rc.field.A = {Expr(), Expr(), E("f(x)+g(y)")};
        rc.omega = {E("g'(y)"), E("-f'(x)"), Expr()};
        rc.Q = parse_momentum("p1^2+4*f(x)*p3+2*u1(x)");
        rc.P = parse_momentum("p2^2+4*g(y)*p3+2*u2(y)");
        rc.eq4 = {Expr(), E("4*f(x)"), Expr(), E("4*g(y)"), Expr(), Expr()};
        return rc;
    }
    if (id == "4") {
        rc.field.V = E("-(C3*f(x)+C3*g(y)+2*C2*f(x)^2+2*C1*g(y)^2+r(z)"
                       "+4*g(y)*f''(x)+4*f(x)*g''(y))");
        rc.field.A = {E("g'(y)"), E("f'(x)"), Expr()};
        rc.omega = {Expr(), Expr(), E("f''(x)-g''(y)")};
        rc.Q = parse_momentum("p1^2+4*f'(x)*p2-2*(4*g(y)*f''(x)+2*C2*f(x)^2+C3*f(x))");
        rc.P = parse_momentum("p2^2+4*g'(y)*p1-2*(4*f(x)*g''(y)+2*C1*g(y)^2+C3*g(y))");
        rc.rules.push_back(RewriteRule::make("f", Axis::x, E("C*f(x)^2+C1*f(x)+C4")));
        rc.rules.push_back(RewriteRule::make("g", Axis::y, E("C*g(y)^2+C2*g(y)+C5")));
        rc.eq4 = {E("4*f'(x)"), Expr(), E("4*g'(y)"), Expr(), Expr(), Expr()};
        rc.free_params = {"C", "C1", "C2", "C3", "C4", "C5"};
        return rc;
    }
    if (id == "5") {
        rc.field.V = E("-(C3*f(x)+C3*g(y)+2*C2*f(x)^2+2*C1*g(y)^2"
                       "+4*g(y)*f''(x)+4*f(x)*g''(y))");
        rc.field.A = {E("g'(y)"), E("f'(x)"), E("C*f(x)+C*g(y)")};
        rc.omega = {E("C*g'(y)"), E("-C*f'(x)"), E("f''(x)-g''(y)")};
        rc.Q = parse_momentum(
            "p1^2+4*(f'(x)*p2+C*f(x)*p3)-2*(4*g(y)*f''(x)+2*C2*f(x)^2+C3*f(x))");
        rc.P = parse_momentum(
            "p2^2+4*(g'(y)*p1+C*g(y)*p3)-2*(4*f(x)*g''(y)+2*C1*g(y)^2+C3*g(y))");
        rc.rules.push_back(RewriteRule::make("f", Axis::x, E("C6*f(x)^2+C1*f(x)+C4")));
        rc.rules.push_back(RewriteRule::make("g", Axis::y, E("C6*g(y)^2+C2*g(y)+C5")));
        rc.eq4 = {E("4*f'(x)"), E("4*C*f(x)"), E("4*g'(y)"), E("4*C*g(y)"), Expr(), Expr()};
        rc.free_params = {"C", "C1", "C2", "C3", "C4", "C5", "C6"};
        return rc;
    }
    if (id.size() == 4 && id[0] == '6' && id[1] == '.' && id[2] >= '1' && id[2] <= '4' &&
        id[3] >= 'a' && id[3] <= 'e')
        return raw_case_6(id[2], id[3]);
    throw catalog_error("unknown case id '" + id + "'");
}

std::array<Expr, 3> eq4_residuals_of(const std::array<Expr, 6>& s) {
    const Expr &f2 = s[0], &f3 = s[1], &g1 = s[2], &g3 = s[3], &r1 = s[4], &r2 = s[5];
    return {f2 * diff(g3, Axis::y) - g1 * diff(f3, Axis::x),
            r1 * diff(f2, Axis::x) - f3 * diff(r2, Axis::z),
            r2 * diff(g1, Axis::y) - g3 * diff(r1, Axis::z)};
}

} // namespace

const std::vector<std::string>& catalog_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v{"1", "2", "3", "4", "5"};
        for (const char* fam : {"6.1", "6.2", "6.3", "6.4"})
            for (char sub = 'a'; sub <= 'e'; ++sub) {
                std::string id = std::string(fam) + sub;
                if (id == "6.3a" || id == "6.4a") continue; // shared-'a' families
                v.push_back(id);
            }
        return v;
    }();
    return ids;
}

const std::vector<std::string>& all_case_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v{"1", "2", "3", "4", "5"};
        for (const char* fam : {"6.1", "6.2", "6.3", "6.4"})
            for (char sub = 'a'; sub <= 'e'; ++sub) v.push_back(std::string(fam) + sub);
        return v;
    }();
    return ids;
}

CaseSpec make_case(const std::string& id, const std::map<std::string, Expr>& bindings) {
    RawCase rc = raw_case(id);

    std::map<std::string, Expr> subst;
    for (const auto& [name, value] : bindings) {
        bool is_free =
            std::find(rc.free_params.begin(), rc.free_params.end(), name) != rc.free_params.end();
        if (is_free) {
            subst.emplace(name, value);
            continue;
        }
        bool constrained = false;
        for (const auto& [cname, rhs] : rc.constraints) {
            if (cname != name) continue;
            constrained = true;
            if (value != E(rhs)) // a structurally identical re-statement is tolerated
                throw catalog_error("parameter '" + name + "' is fixed to " + rhs +
                                    " by subcase " + id);
        }
        if (!constrained) throw catalog_error("case " + id + " has no parameter '" + name + "'");
    }

    CaseSpec spec;
    spec.id = id;
    spec.field.V = substitute_params(rc.field.V, subst);
    for (int j = 0; j < 3; ++j) {
        spec.field.A[j] = substitute_params(rc.field.A[j], subst);
        spec.omega[j] = substitute_params(rc.omega[j], subst);
    }
    spec.Q = substitute_mp(rc.Q, {}, subst);
    spec.P = substitute_mp(rc.P, {}, subst);
    for (const RewriteRule& r : rc.rules)
        spec.rules.push_back(
            RewriteRule::make(r.fn, r.formal, substitute_params(r.replacement, subst)));
    for (int j = 0; j < 6; ++j) spec.eq4_fns[j] = substitute_params(rc.eq4[j], subst);
    auto res = eq4_residuals_of(spec.eq4_fns);
    spec.constraint_residuals.assign(res.begin(), res.end());

    for (const std::string& p : rc.free_params) {
        auto it = subst.find(p);
        spec.params[p] = it == subst.end() ? std::optional<Expr>{} : std::optional<Expr>{it->second};
    }

    if (!(spec.Q.coefficient({2, 0, 0}).is_one_const()))
        throw catalog_error("case " + id + ": Q must lead with p1^2");
    if (!(spec.P.coefficient({0, 2, 0}).is_one_const()))
        throw catalog_error("case " + id + ": P must lead with p2^2");
    return spec;
}

CaseSpec perturb_case(const CaseSpec& spec, const std::string& target, const std::string& delta) {
    CaseSpec out = spec;
    out.id = spec.id + "~" + target;
    if (target == "V") out.field.V = spec.field.V + E(delta);
    else if (target == "A1") out.field.A[0] = spec.field.A[0] + E(delta);
    else if (target == "A2") out.field.A[1] = spec.field.A[1] + E(delta);
    else if (target == "A3") out.field.A[2] = spec.field.A[2] + E(delta);
    else if (target == "Q") {
        MomentumPolynomial d = parse_momentum(delta);
        for (const auto& [idx, c] : d.terms()) out.Q.accumulate(idx, c);
    } else if (target == "P") {
        MomentumPolynomial d = parse_momentum(delta);
        for (const auto& [idx, c] : d.terms()) out.P.accumulate(idx, c);
    } else {
        throw catalog_error("unknown perturbation target '" + target + "'");
    }
    return out;
}

VerificationReport verify_case(const CaseSpec& spec, int trials, double tol, uint64_t seed) {
    VerificationReport rep;
    rep.case_id = spec.id;
    rep.seed = seed;
    rep.trials = trials;
    rep.tol = tol;

    // one parameter sample per run, shared by every zero test
    SymbolSet syms;
    auto merge = [&syms](const Expr& e) {
        SymbolSet s = collect_symbols(e);
        syms.params.insert(s.params.begin(), s.params.end());
    };
    merge(spec.field.V);
    for (const Expr& a : spec.field.A) merge(a);
    for (const auto& [idx, c] : spec.Q.terms()) merge(c);
    for (const auto& [idx, c] : spec.P.terms()) merge(c);
    for (const RewriteRule& r : spec.rules) merge(r.replacement);
    for (const Expr& o : spec.omega) merge(o);

    Rng prng(derive_seed(seed, "params", Rng::hash_string(spec.id)));
    EvalPoint base;
    for (const std::string& p : syms.params) {
        std::complex<double> v = prng.annulus();
        base.params.emplace(p, v);
        rep.parameter_sample.emplace(p, v);
    }

    DiffOp H = hamiltonian_op(spec.field);
    DiffOp Qo = from_momentum(spec.Q);
    DiffOp Po = from_momentum(spec.P);

    struct Pair {
        const char* name;
        const DiffOp* a;
        const DiffOp* b;
    };
    const Pair pairs[3] = {{"HQ", &H, &Qo}, {"HP", &H, &Po}, {"QP", &Qo, &Po}};

    for (int k = 0; k < 3; ++k) {
        CommutatorReport cr;
        cr.name = pairs[k].name;
        DiffOp comm = commutator(*pairs[k].a, *pairs[k].b);
        uint64_t ordinal = 0;
        for (const auto& [idx, c] : comm.terms()) {
            Expr r = reduce(c, spec.rules);
            ZeroTestConfig cfg{trials, tol, derive_seed(seed, pairs[k].name, ordinal++)};
            ZeroTestResult zt = is_zero(r, cfg, &base);
            if (zt.worst >= cr.worst) {
                cr.worst = zt.worst;
                cr.worst_index = idx;
            }
            if (!zt.zero && !cr.witness) {
                cr.pass = false;
                cr.witness = zt.witness;
            }
        }
        rep.commutators[k] = std::move(cr);
    }

    uint64_t ordinal = 0;
    for (const Expr& r : spec.constraint_residuals) {
        Expr red = reduce(r, spec.rules);
        ZeroTestConfig cfg{trials, tol, derive_seed(seed, "eq4", ordinal++)};
        ZeroTestResult zt = is_zero(red, cfg, &base);
        rep.eq4_worst = std::max(rep.eq4_worst, zt.worst);
        if (!zt.zero) rep.eq4_pass = false;
    }

    std::array<Expr, 3> rot = curl(spec.field.A);
    for (int j = 0; j < 3; ++j) {
        Expr r = reduce(rot[j] - spec.omega[j], spec.rules);
        ZeroTestConfig cfg{trials, tol, derive_seed(seed, "curl", static_cast<uint64_t>(j))};
        ZeroTestResult zt = is_zero(r, cfg, &base);
        rep.curl_worst = std::max(rep.curl_worst, zt.worst);
        if (!zt.zero) rep.curl_pass = false;
        rep.omega_printed[j] = to_string(spec.omega[j]);
    }

    rep.complex_field = contains_imaginary(spec.field.V);
    for (const Expr& a : spec.field.A) rep.complex_field = rep.complex_field || contains_imaginary(a);

    rep.pass = rep.eq4_pass && rep.curl_pass;
    for (const CommutatorReport& cr : rep.commutators) rep.pass = rep.pass && cr.pass;
    return rep;
}

std::string VerificationReport::text() const {
    std::ostringstream os;
    os << "case " << case_id << (pass ? "  PASS" : "  FAIL") << "  (seed " << seed
       << ", trials " << trials << ", tol " << tol << ")\n";
    for (const CommutatorReport& cr : commutators) {
        os << "  [" << cr.name[0] << "," << cr.name[1] << "]  " << (cr.pass ? "pass" : "FAIL")
           << "  worst residual " << cr.worst << " at d^(" << int(cr.worst_index[0]) << ","
           << int(cr.worst_index[1]) << "," << int(cr.worst_index[2]) << ")\n";
        if (cr.witness) {
            os << "      witness |value| = " << std::abs(cr.witness->value) << " at";
            for (Axis a : kAxes) {
                const auto& v = cr.witness->point.vars[static_cast<int>(a)];
                if (v) os << " " << axis_name(a) << "=(" << v->real() << "," << v->imag() << ")";
            }
            os << "\n";
        }
    }
    os << "  eq4 residuals  " << (eq4_pass ? "pass" : "FAIL") << "  worst " << eq4_worst << "\n";
    os << "  curl(A) == Omega  " << (curl_pass ? "pass" : "FAIL") << "  worst " << curl_worst
       << "\n";
    os << "  Omega = (" << omega_printed[0] << ", " << omega_printed[1] << ", "
       << omega_printed[2] << ")\n";
    if (complex_field) os << "  note: field has complex components\n";
    if (!parameter_sample.empty()) {
        os << "  parameters:";
        for (const auto& [name, v] : parameter_sample)
            os << " " << name << "=(" << v.real() << "," << v.imag() << ")";
        os << "\n";
    }
    return os.str();
}

} // namespace qintcart
