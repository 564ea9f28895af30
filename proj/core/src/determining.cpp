#include "qintcart/determining.hpp"

#include <sstream>

#include "qintcart/parse.hpp"

namespace qintcart {

std::string_view commutator_name(CommutatorTag t) {
    switch (t) {
        case CommutatorTag::HQ: return "HQ";
        case CommutatorTag::HP: return "HP";
        case CommutatorTag::QP: return "QP";
    }
    return "?";
}

CartesianAnsatz CartesianAnsatz::general() {
    auto tri = [](const char* name) { return Expr::fn(name, 7, {0, 0, 0}); };
    CartesianAnsatz a;
    a.f = {tri("f1"), tri("f2"), tri("f3")};
    a.g = {tri("g1"), tri("g2"), tri("g3")};
    a.gamma1 = tri("gam1");
    a.gamma2 = tri("gam2");
    a.field.V = tri("V");
    a.field.A = {tri("A1"), tri("A2"), tri("A3")};
    return a;
}

std::vector<const Residual*> ResidualSystem::of_order(int order) const {
    std::vector<const Residual*> out;
    for (const Residual& r : rows)
        if (r.order == order) out.push_back(&r);
    return out;
}

Expr normalize_hbar(const Expr& residual) {
    if (residual.is_zero_const()) return residual;
    long long m = hbar_min_degree(residual);
    if (m <= 0) return residual;
    Expr factor = Expr::pow(Expr::imaginary(), m) * Expr::pow(Expr::hbar(), -m);
    // scale term by term so each one's hbar power merges
    if (residual.kind() == Kind::add) {
        std::vector<Expr> terms;
        terms.reserve(residual.children().size());
        for (const Expr& t : residual.children()) terms.push_back(t * factor);
        return Expr::add(std::move(terms));
    }
    return residual * factor;
}

ResidualSystem generate(const CartesianAnsatz& ansatz) {
    MomentumPolynomial q(MomentumOrdering::left);
    q.set({2, 0, 0}, Expr::integer(1));
    for (Axis a : kAxes) q.accumulate(unit_index(a), ansatz.f[static_cast<int>(a)]);
    q.accumulate({0, 0, 0}, ansatz.gamma1);

    MomentumPolynomial p(MomentumOrdering::left);
    p.set({0, 2, 0}, Expr::integer(1));
    for (Axis a : kAxes) p.accumulate(unit_index(a), ansatz.g[static_cast<int>(a)]);
    p.accumulate({0, 0, 0}, ansatz.gamma2);

    DiffOp H = hamiltonian_op(ansatz.field);
    DiffOp Q = from_momentum(q);
    DiffOp P = from_momentum(p);

    ResidualSystem sys;
    auto emit = [&sys](CommutatorTag tag, const DiffOp& comm) {
        for (const auto& [idx, c] : comm.terms())
            sys.rows.push_back(Residual{tag, index_order(idx), idx, normalize_hbar(c), c});
    };
    emit(CommutatorTag::HQ, commutator(H, Q));
    emit(CommutatorTag::HP, commutator(H, P));
    emit(CommutatorTag::QP, commutator(Q, P));
    return sys;
}

std::vector<Expr> substitute_case(const ResidualSystem& system, const CaseSpec& spec) {
    for (const auto& [idx, c] : spec.Q.terms())
        if (index_order(idx) == 2 && idx != MultiIndex{2, 0, 0})
            throw catalog_error("case " + spec.id + " is not in Cartesian ansatz form");
    for (const auto& [idx, c] : spec.P.terms())
        if (index_order(idx) == 2 && idx != MultiIndex{0, 2, 0})
            throw catalog_error("case " + spec.id + " is not in Cartesian ansatz form");

    std::map<std::string, Expr> fns;
    fns.emplace("f1", spec.Q.coefficient({1, 0, 0}));
    fns.emplace("f2", spec.Q.coefficient({0, 1, 0}));
    fns.emplace("f3", spec.Q.coefficient({0, 0, 1}));
    fns.emplace("gam1", spec.Q.coefficient({0, 0, 0}));
    fns.emplace("g1", spec.P.coefficient({1, 0, 0}));
    fns.emplace("g2", spec.P.coefficient({0, 1, 0}));
    fns.emplace("g3", spec.P.coefficient({0, 0, 1}));
    fns.emplace("gam2", spec.P.coefficient({0, 0, 0}));
    fns.emplace("V", spec.field.V);
    fns.emplace("A1", spec.field.A[0]);
    fns.emplace("A2", spec.field.A[1]);
    fns.emplace("A3", spec.field.A[2]);

    std::vector<Expr> out;
    out.reserve(system.rows.size());
    for (const Residual& r : system.rows)
        out.push_back(reduce(substitute_functions(r.raw, fns), spec.rules));
    return out;
}

std::vector<Expr> general_solution_residuals(const GeneralSolutionOptions& opt) {
    Expr s = parse("s(x,y,z)");
    Expr k1 = parse("k1(x,z)");
    Expr k2 = parse("k2(y,z)");
    Expr g1 = opt.misplace_g1 ? parse("g1(x)") : parse("g1(y)");

    Expr A1 = (diff(s, Axis::x) + diff(k1, Axis::x) + g1 + parse("r1(z)")) / Expr::integer(4);
    Expr A2 =
        (diff(s, Axis::y) + diff(k2, Axis::y) + parse("f2(x)") + parse("r2(z)")) / Expr::integer(4);
    Expr A3 = (diff(s, Axis::z) + diff(k1, Axis::z) + diff(k2, Axis::z) + parse("f3(x)") +
               parse("g3(y)") + (opt.include_r3_term ? parse("r3'(z)") : Expr())) /
              Expr::integer(4);

    Expr f1 = diff(s, Axis::x) + diff(k1, Axis::x);
    Expr g2 = diff(s, Axis::y) + diff(k2, Axis::y);

    Expr four = Expr::integer(4);
    return {
        parse("f2'(x)") + diff(f1, Axis::y) - four * diff(A2, Axis::x),
        parse("g3'(y)") + diff(g2, Axis::z) - four * diff(A3, Axis::y),
        four * diff(A1, Axis::x) - diff(f1, Axis::x),
        parse("f3'(x)") + diff(f1, Axis::z) - four * diff(A3, Axis::x),
        diff(parse("g1(y)"), Axis::y) + diff(g2, Axis::x) - four * diff(A1, Axis::y),
        four * diff(A2, Axis::y) - diff(g2, Axis::y),
        diff(f1, Axis::y) - diff(g2, Axis::x),
    };
}

bool check_A_general_solution() {
    for (const Expr& r : general_solution_residuals())
        if (!is_zero(r).zero) return false;
    return true;
}

std::array<Expr, 3> eq4_residuals(const Expr& f2, const Expr& f3, const Expr& g1,
                                  const Expr& g3, const Expr& r1, const Expr& r2) {
    auto check = [](const Expr& e, Axis allowed, const char* name) {
        SymbolSet s = collect_symbols(e);
        if (s.axes & ~axis_bit(allowed))
            throw expr_error(std::string(name) + " may depend only on " +
                             std::string(1, axis_name(allowed)));
    };
    check(f2, Axis::x, "f2");
    check(f3, Axis::x, "f3");
    check(g1, Axis::y, "g1");
    check(g3, Axis::y, "g3");
    check(r1, Axis::z, "r1");
    check(r2, Axis::z, "r2");
    return {f2 * diff(g3, Axis::y) - g1 * diff(f3, Axis::x),
            r1 * diff(f2, Axis::x) - f3 * diff(r2, Axis::z),
            r2 * diff(g1, Axis::y) - g3 * diff(r1, Axis::z)};
}

std::array<Axis, 3> permutation_axis_map(int column) {
    switch (column) {
        case 1: return {Axis::x, Axis::y, Axis::z};
        case 2: return {Axis::z, Axis::x, Axis::y};
        case 3: return {Axis::y, Axis::z, Axis::x};
        case 4: return {Axis::x, Axis::z, Axis::y};
        case 5: return {Axis::y, Axis::x, Axis::z};
        case 6: return {Axis::z, Axis::y, Axis::x};
        default: throw expr_error("permutation column must be 1..6");
    }
}

namespace {

MomentumPolynomial rename_axes_mp(const MomentumPolynomial& mp, const std::array<Axis, 3>& m) {
    MomentumPolynomial out(mp.ordering());
    for (const auto& [idx, c] : mp.terms()) {
        MultiIndex t{0, 0, 0};
        for (Axis a : kAxes)
            t[static_cast<int>(m[static_cast<int>(a)])] = idx[static_cast<int>(a)];
        out.set(t, rename_axes(c, m));
    }
    return out;
}

// sextuple slot of the general-solution function living in component c,
// depending on axis b (c and b as 0-based indices, b != c)
int eq4_slot(int c, int b) {
    if (c == 1 && b == 0) return 0; // f2
    if (c == 2 && b == 0) return 1; // f3
    if (c == 0 && b == 1) return 2; // g1
    if (c == 2 && b == 1) return 3; // g3
    if (c == 0 && b == 2) return 4; // r1
    if (c == 1 && b == 2) return 5; // r2
    return -1;
}

} // namespace

CaseSpec permute(const CaseSpec& spec, int column) {
    std::array<Axis, 3> m = permutation_axis_map(column);
    CaseSpec out;
    out.id = column == 1 ? spec.id : spec.id + "@p" + std::to_string(column);
    out.params = spec.params;
    out.rules = spec.rules;

    out.field.V = rename_axes(spec.field.V, m);
    for (int j = 0; j < 3; ++j)
        out.field.A[static_cast<int>(m[j])] = rename_axes(spec.field.A[j], m);
    out.Q = rename_axes_mp(spec.Q, m);
    out.P = rename_axes_mp(spec.P, m);
    out.omega = curl(out.field.A);

    for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 3; ++b) {
            int from = eq4_slot(c, b);
            if (from < 0) continue;
            int to = eq4_slot(static_cast<int>(m[c]), static_cast<int>(m[b]));
            out.eq4_fns[to] = rename_axes(spec.eq4_fns[from], m);
        }
    auto res = eq4_residuals(out.eq4_fns[0], out.eq4_fns[1], out.eq4_fns[2], out.eq4_fns[3],
                             out.eq4_fns[4], out.eq4_fns[5]);
    out.constraint_residuals.assign(res.begin(), res.end());
    return out;
}

std::string residuals_to_latex(const ResidualSystem& system) {
    std::ostringstream os;
    os << "\\begin{align*}\n";
    for (const Residual& r : system.rows) {
        os << "[" << (r.source == CommutatorTag::QP ? "Q,P"
                      : r.source == CommutatorTag::HQ ? "H,Q" : "H,P")
           << "]\\,\\partial^{(" << int(r.index[0]) << "," << int(r.index[1]) << ","
           << int(r.index[2]) << ")} &:\\quad " << to_latex(r.normalized) << " = 0 \\\\\n";
    }
    os << "\\end{align*}\n";
    return os.str();
}

} // namespace qintcart
