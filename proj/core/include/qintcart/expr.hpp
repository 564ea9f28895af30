#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qintcart/rational.hpp"

namespace qintcart {

enum class Axis : uint8_t { x = 0, y = 1, z = 2 };

inline char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }
inline uint8_t axis_bit(Axis a) { return static_cast<uint8_t>(1u << static_cast<int>(a)); }
constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

enum class Builtin : uint8_t { sin, cos, sinh, cosh, exp };
std::string_view builtin_name(Builtin b);
std::optional<Builtin> builtin_from_name(std::string_view s);

// Node kinds, in canonical ordering rank.
enum class Kind : uint8_t {
    constant,
    imaginary,
    hbar,
    param,
    var,
    fn,       // abstract function instance with a derivative multi-index
    apply,    // builtin application
    pow,      // integer exponent
    add,
    mul,
};

namespace detail { struct Node; }

// Immutable symbolic expression over x,y,z, named parameters, i, hbar,
// abstract functions with derivative towers, and the builtins
// sin/cos/sinh/cosh/exp. Construction canonicalizes: Add/Mul are flattened,
// like terms and factors combined, rational constants folded exactly, and
// children sorted by a deterministic total order, so structural equality is
// meaningful and parse(print(e)) == e.
class Expr {
public:
    Expr(); // the constant 0

    static Expr integer(long long n);
    static Expr rational(long long num, long long den);
    static Expr real(double d);
    static Expr number(const Number& n);
    static Expr imaginary();
    static Expr hbar();
    static Expr param(std::string name);
    static Expr var(Axis a);
    static Expr fn(std::string name, Axis arg, int order = 0);
    static Expr fn(std::string name, uint8_t deps, std::array<uint8_t, 3> order);
    static Expr apply(Builtin b, Expr arg);
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr pow(Expr base, long long exponent);

    Kind kind() const;
    const Number& number_value() const;            // constant
    const std::string& name() const;               // param / fn
    Axis axis() const;                             // var
    uint8_t fn_deps() const;                       // fn: bitmask of axes
    const std::array<uint8_t, 3>& fn_order() const;// fn: derivative multi-index
    int fn_total_order() const;
    Builtin builtin() const;                       // apply
    long long exponent() const;                    // pow
    const std::vector<Expr>& children() const;     // add/mul terms; apply/pow: [arg]

    bool is_zero_const() const;
    bool is_one_const() const;
    uint64_t hash() const;

    const detail::Node* raw() const { return node_.get(); }

    friend bool operator==(const Expr& a, const Expr& b) { return equal(a, b); }
    friend bool operator!=(const Expr& a, const Expr& b) { return !equal(a, b); }

    static bool equal(const Expr& a, const Expr& b);
    static int compare(const Expr& a, const Expr& b); // canonical total order

private:
    explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::Node> node_;
    friend struct detail::Node;
    friend class ExprBuilder;
};

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return Expr::compare(a, b) < 0; }
};

// Arithmetic sugar.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
inline Expr operator+(long long a, const Expr& b) { return Expr::integer(a) + b; }
inline Expr operator*(long long a, const Expr& b) { return Expr::integer(a) * b; }
inline Expr operator-(long long a, const Expr& b) { return Expr::integer(a) - b; }

// ---- structural queries -----------------------------------------------------

// Identity of an abstract-function instance up to derivative order.
struct FnKey {
    std::string name;
    uint8_t deps = 0;
    std::array<uint8_t, 3> order{0, 0, 0};

    bool operator<(const FnKey& o) const {
        if (name != o.name) return name < o.name;
        if (deps != o.deps) return deps < o.deps;
        return order < o.order;
    }
    bool operator==(const FnKey& o) const {
        return name == o.name && deps == o.deps && order == o.order;
    }
    std::string str() const;
};

struct SymbolSet {
    uint8_t axes = 0;                 // bitmask
    bool has_hbar = false;
    bool has_imaginary = false;
    std::set<std::string> params;
    std::set<FnKey> fns;
};

SymbolSet collect_symbols(const Expr& e);
bool contains_imaginary(const Expr& e);

// Minimum degree of hbar across additive terms (0 for hbar-free expressions).
long long hbar_min_degree(const Expr& e);

// ---- calculus and substitution ----------------------------------------------

Expr diff(const Expr& e, Axis v);
// Derivative with respect to a named parameter (used for momentum symbols in
// the classical module; abstract-function arguments never contain parameters).
Expr diff_param(const Expr& e, const std::string& name);

// Simultaneous variable relabeling a -> image[a]; must be a permutation.
Expr rename_axes(const Expr& e, const std::array<Axis, 3>& image);

Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& bindings);
// Replaces every AbstractFn instance named in the map by the corresponding
// derivative of the given expression.
Expr substitute_functions(const Expr& e, const std::map<std::string, Expr>& bindings);

// ---- rewrite rules ------------------------------------------------------------

// Second-order closure rule f'' = replacement(f, f', params); higher orders
// reduce by differentiating the replacement.
struct RewriteRule {
    std::string fn;
    Axis formal = Axis::x;
    Expr replacement;

    static RewriteRule make(std::string fn, Axis formal, Expr replacement);
};

Expr reduce(const Expr& e, std::span<const RewriteRule> rules, int max_passes = 64);

// ---- evaluation ---------------------------------------------------------------

struct eval_error : expr_error {
    using expr_error::expr_error;
};

// Numeric profile for an abstract univariate function (tabulated ODE solutions
// in the classical module).
struct FnProfile {
    virtual ~FnProfile() = default;
    virtual std::complex<double> value(double x, int order) const = 0;
};

struct EvalPoint {
    std::array<std::optional<std::complex<double>>, 3> vars;
    std::map<std::string, std::complex<double>> params;
    std::optional<double> hbar; // real > 0
    std::map<FnKey, std::complex<double>> fn_values;
    std::map<std::string, std::shared_ptr<const FnProfile>> fn_profiles;
};

std::complex<double> eval(const Expr& e, const EvalPoint& pt, bool memoize = true);

// ---- randomized zero testing ---------------------------------------------------

struct ZeroTestConfig {
    int trials = 20;
    double tol = 1e-9;
    uint64_t seed = 0;
};

struct Witness {
    EvalPoint point;
    std::complex<double> value;
    double scale = 1.0; // 1 + magnitude of the largest additive term
};

struct ZeroTestResult {
    bool zero = true;
    double worst = 0.0; // max over trials of |value| / scale
    std::optional<Witness> witness;
    explicit operator bool() const { return zero; }
};

// Evaluates e at seeded random points (complex annulus per free symbol, hbar
// real positive); true iff every |value| < tol * (1 + largest additive term).
// Symbols bound in `base` are held fixed across trials.
ZeroTestResult is_zero(const Expr& e, const ZeroTestConfig& cfg = {},
                       const EvalPoint* base = nullptr);

// ---- printing -------------------------------------------------------------------

std::string to_string(const Expr& e);
std::string to_latex(const Expr& e);

} // namespace qintcart
