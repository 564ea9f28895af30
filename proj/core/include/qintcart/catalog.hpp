#pragma once

#include <optional>

#include "qintcart/diffop.hpp"

namespace qintcart {

struct catalog_error : expr_error {
    using expr_error::expr_error;
};

// Electromagnetic potentials (V, A). Catalog entries contain only x,y,z,
// parameters and abstract functions here; hbar and i enter when operators are
// built (complex parameter constraints in some 6.x subcases do inject i).
struct EMField {
    Expr V;
    std::array<Expr, 3> A;
};

// Curl of A: (d2 A3 - d3 A2, d3 A1 - d1 A3, d1 A2 - d2 A1), exact.
std::array<Expr, 3> curl(const std::array<Expr, 3>& A);

// A -> A + grad F, V unchanged; leaves curl(A) invariant.
EMField gauge_transform(const EMField& field, const Expr& F);

// One catalog entry: an integrable field with its pair of second-order
// integrals. Q carries leading term p1^2 and P leading term p2^2 (permuted
// entries move the leading axes). The eq4 sextuple lists the functions
// (f2, f3, g1, g3, r1, r2) of the gauge-normalized vector potential
// A = ((g1+r1)/4, (f2+r2)/4, (f3+g3)/4).
struct CaseSpec {
    std::string id;
    std::map<std::string, std::optional<Expr>> params; // nullopt = free
    EMField field;
    MomentumPolynomial Q{MomentumOrdering::left};
    MomentumPolynomial P{MomentumOrdering::left};
    std::vector<RewriteRule> rules;
    std::array<Expr, 3> omega;     // magnetic field as printed
    std::array<Expr, 6> eq4_fns;   // f2, f3, g1, g3, r1, r2
    std::vector<Expr> constraint_residuals; // eq-(4) left minus right sides
};

// Canonical catalog ids (23 entries: 1..5, 6.1a..6.4e with the shared-'a'
// trig/hyperbolic families listed once under 6.1a/6.2a).
const std::vector<std::string>& catalog_ids();
// Every printed subcase, including the 6.3a/6.4a aliases of the 'a' families.
const std::vector<std::string>& all_case_ids();

// Builds the printed case. Bindings assign expressions (usually numbers) to
// free parameters; parameters fixed by a subcase constraint may not be
// overridden (structurally identical re-statements are tolerated).
CaseSpec make_case(const std::string& id, const std::map<std::string, Expr>& bindings = {});

// H = 1/2 p^2 + V + A_i p_i + p_i A_i as a normal-ordered operator.
DiffOp hamiltonian_op(const EMField& field);

// Additive tampering for negative controls: target is one of
// V, A1, A2, A3, Q, P (Q/P deltas are momentum polynomials).
CaseSpec perturb_case(const CaseSpec& spec, const std::string& target, const std::string& delta);

struct CommutatorReport {
    std::string name; // HQ, HP, QP
    bool pass = true;
    double worst = 0.0;
    MultiIndex worst_index{0, 0, 0};
    std::optional<Witness> witness;
};

struct VerificationReport {
    std::string case_id;
    uint64_t seed = 0;
    int trials = 20;
    double tol = 1e-9;
    std::map<std::string, std::complex<double>> parameter_sample;
    std::array<CommutatorReport, 3> commutators; // HQ, HP, QP
    bool eq4_pass = true;
    double eq4_worst = 0.0;
    bool curl_pass = true;
    double curl_worst = 0.0;
    std::array<std::string, 3> omega_printed;
    bool complex_field = false; // i occurs in V or A after constraints
    bool pass = false;

    std::string text() const;
};

// Builds H from the field, forms [H,Q], [H,P], [Q,P], reduces every
// coefficient with the case rules and zero-tests it. Free parameters are
// sampled once per call (seeded); reports the per-commutator worst residual
// and a witness on failure, plus the eq-(4) and curl cross-checks.
VerificationReport verify_case(const CaseSpec& spec, int trials = 20, double tol = 1e-9,
                               uint64_t seed = 0);

// JSON document {id, params, field:{V,A}, Q, P, rules} with expressions as
// grammar strings.
std::string case_to_json(const CaseSpec& spec);
CaseSpec case_from_json(const std::string& json_text);

std::string report_to_json(const VerificationReport& r);

} // namespace qintcart
