#pragma once

#include "qintcart/catalog.hpp"

namespace qintcart {

// The general Cartesian ansatz Q = p1^2 + f.p + gamma1, P = p2^2 + g.p +
// gamma2 over a fully abstract field. general() uses the trivariate unknowns
// f1,f2,f3, g1,g2,g3, gam1, gam2, V, A1,A2,A3.
struct CartesianAnsatz {
    std::array<Expr, 3> f;
    std::array<Expr, 3> g;
    Expr gamma1, gamma2;
    EMField field;

    static CartesianAnsatz general();
};

enum class CommutatorTag : uint8_t { HQ, HP, QP };
std::string_view commutator_name(CommutatorTag t);

struct Residual {
    CommutatorTag source;
    int order = 0;
    MultiIndex index{0, 0, 0};
    Expr normalized; // common (-i*hbar)^m factor divided out
    Expr raw;
};

struct ResidualSystem {
    std::vector<Residual> rows;

    bool empty() const { return rows.empty(); }
    std::vector<const Residual*> of_order(int order) const;
};

// Builds H, Q, P from the ansatz, commutes all three pairs and splits by
// momentum order. The system is empty iff all commutators vanish identically.
ResidualSystem generate(const CartesianAnsatz& ansatz);

// Divides out the largest common power of (-i*hbar); reporting helper.
Expr normalize_hbar(const Expr& residual);

// Substitutes a catalog case into the general unknowns (f_i, g_i, gamma's, V,
// A_i), applies the case rules, and returns the reduced residuals.
std::vector<Expr> substitute_case(const ResidualSystem& system, const CaseSpec& spec);

// The highest-power first-order relations obeyed by the general solution
//   4A1 = s_x + k1_x + g1(y) + r1(z),
//   4A2 = s_y + k2_y + f2(x) + r2(z),
//   4A3 = s_z + k1_z + k2_z + f3(x) + g3(y) + r3'(z),
// with f1 = s_x + k1_x and g2 = s_y + k2_y. Options exist for the test-side
// negative controls.
struct GeneralSolutionOptions {
    bool include_r3_term = true;   // keep the pure-gauge r3'(z) part of A3
    bool misplace_g1 = false;      // replace g1(y) by g1(x) in A1 (must fail)
};
std::vector<Expr> general_solution_residuals(const GeneralSolutionOptions& opt = {});
bool check_A_general_solution();

// Eq-(4) residuals (left minus right):
//   f2(x) g3'(y) - g1(y) f3'(x),
//   r1(z) f2'(x) - f3(x) r2'(z),
//   r2(z) g1'(y) - g3(y) r1'(z).
// Each argument must depend only on its designated variable.
std::array<Expr, 3> eq4_residuals(const Expr& f2, const Expr& f3, const Expr& g1,
                                  const Expr& g3, const Expr& r1, const Expr& r2);

// One of the six simultaneous permutations of (A components, variables,
// eq-(4) functions); column 1 is the identity. Acts on the field, the
// integrals and the eq-(4) sextuple; the permuted pair still commutes.
CaseSpec permute(const CaseSpec& spec, int column);
std::array<Axis, 3> permutation_axis_map(int column);

// JSON array [{commutator, order, index, residual, raw}] and a LaTeX align*
// fragment for the dump.
std::string residuals_to_json(const ResidualSystem& system);
std::string residuals_to_latex(const ResidualSystem& system);

} // namespace qintcart
