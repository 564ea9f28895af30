#pragma once

#include <map>

#include "qintcart/expr.hpp"

namespace qintcart {

struct diffop_error : expr_error {
    using expr_error::expr_error;
};

// Derivative multi-index (a1,a2,a3) for d^a1_x d^a2_y d^a3_z.
using MultiIndex = std::array<uint8_t, 3>;

inline int index_order(MultiIndex a) { return a[0] + a[1] + a[2]; }
inline MultiIndex unit_index(Axis a) {
    MultiIndex m{0, 0, 0};
    m[static_cast<int>(a)] = 1;
    return m;
}

// Normal-ordered differential operator: finite map multi-index -> coefficient,
// all derivatives to the right of coefficient functions. Total order is capped
// at 4 (commutators of second-order operators need at most 4 before
// cancellation). Structurally zero coefficients are never stored.
//
// Momentum convention p_j = -i*hbar*d_j. With M_i = eps_{ikl} x_k p_l the
// bracket table reads [M1,M2]=i*hbar*M3 (cyclic), [M_i,p_j]=i*hbar*eps_{ijk}p_k,
// [x_j,p_j]=i*hbar; unit tests pin [M3,p1]=i*hbar*p2.
class DiffOp {
public:
    DiffOp() = default;

    static DiffOp identity(Expr coefficient);
    static DiffOp partial(Axis a);  // d_a
    static DiffOp momentum(Axis a); // -i*hbar*d_a

    const std::map<MultiIndex, Expr>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int order() const;
    Expr coefficient(MultiIndex idx) const; // zero when absent

    void set(MultiIndex idx, Expr coefficient); // drops structural zeros
    void accumulate(MultiIndex idx, const Expr& delta);

    friend bool operator==(const DiffOp& a, const DiffOp& b);

private:
    std::map<MultiIndex, Expr> terms_;
};

DiffOp add(const DiffOp& a, const DiffOp& b);
DiffOp sub(const DiffOp& a, const DiffOp& b);
DiffOp scale(const DiffOp& a, const Expr& left_factor);

// Exact operator product via the Leibniz rule
//   c d^a ∘ e d^b = c * sum_{g<=a} C(a,g) (d^g e) d^{a-g+b}.
// Requires order(a)+order(b) <= 4.
DiffOp compose(const DiffOp& a, const DiffOp& b);

// compose(a,b) - compose(b,a); exact coefficients, structural pruning only.
DiffOp commutator(const DiffOp& a, const DiffOp& b);
// Variant that additionally drops coefficients passing the randomized zero test.
DiffOp commutator(const DiffOp& a, const DiffOp& b, const ZeroTestConfig& prune);

// Groups coefficients by |multi-index|; the union reconstructs the operator.
std::map<int, std::vector<std::pair<MultiIndex, Expr>>> split_by_order(const DiffOp& o);

// Applies the operator to a scalar expression: sum c_a d^a(phi). Used by tests
// as the independent application oracle for compose.
Expr apply_op(const DiffOp& o, const Expr& phi);

// Applies the rewrite rules to every coefficient.
DiffOp reduce_coefficients(const DiffOp& o, std::span<const RewriteRule> rules);

// Renames variables and permutes derivative axes simultaneously.
DiffOp rename_axes(const DiffOp& o, const std::array<Axis, 3>& image);

// ---- momentum polynomials -------------------------------------------------------

// Ordering of coefficient functions against momentum factors.
enum class MomentumOrdering : uint8_t {
    left,       // sum c_a p^a, coefficients left of all momenta
    symmetrized // sum (c_a p^a + p^a c_a), Weyl pairs as in A.p + p.A
};

// Polynomial in p1,p2,p3 with Expr coefficients; converts exactly to a DiffOp.
class MomentumPolynomial {
public:
    explicit MomentumPolynomial(MomentumOrdering ordering = MomentumOrdering::left)
        : ordering_(ordering) {}

    MomentumOrdering ordering() const { return ordering_; }
    const std::map<MultiIndex, Expr>& terms() const { return terms_; }
    Expr coefficient(MultiIndex idx) const;
    void set(MultiIndex idx, Expr coefficient);
    void accumulate(MultiIndex idx, const Expr& delta);

    friend bool operator==(const MomentumPolynomial& a, const MomentumPolynomial& b);

private:
    MomentumOrdering ordering_;
    std::map<MultiIndex, Expr> terms_;
};

// Substitutes p_j = -i*hbar*d_j and normal-orders.
DiffOp from_momentum(const MomentumPolynomial& mp);

// Writes the operator as a left-ordered momentum polynomial (coefficients pick
// up (i/hbar)^|a| factors, which cancel for operators built from momenta).
MomentumPolynomial to_momentum(const DiffOp& o);

// Momentum polynomial as an expression over the reserved parameters p1,p2,p3.
Expr momentum_expr(const MomentumPolynomial& mp);
std::string print_momentum(const MomentumPolynomial& mp);
std::string print_momentum(const DiffOp& o);

// Thin front-end over expr parsing: reads "p1^2 + 4*f'(x)*p2" style text.
// Momenta must occur polynomially (not inside functions or negative powers).
MomentumPolynomial parse_momentum(std::string_view text);

// Q = a_ik M_i M_k + b_ik (p_i M_k + M_k p_i) + c_ik p_i p_k + f_i p_i + gamma
// with M_i = eps_{ikl} x_k p_l; a and c must be symmetric.
DiffOp build_bilinear(const std::array<std::array<Expr, 3>, 3>& a,
                      const std::array<std::array<Expr, 3>, 3>& b,
                      const std::array<std::array<Expr, 3>, 3>& c,
                      const std::array<Expr, 3>& f, const Expr& gamma);

} // namespace qintcart
