#include "qintcart/expr.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>

namespace qintcart {

std::string_view builtin_name(Builtin b) {
    switch (b) {
        case Builtin::sin: return "sin";
        case Builtin::cos: return "cos";
        case Builtin::sinh: return "sinh";
        case Builtin::cosh: return "cosh";
        case Builtin::exp: return "exp";
    }
    return "?";
}

std::optional<Builtin> builtin_from_name(std::string_view s) {
    if (s == "sin") return Builtin::sin;
    if (s == "cos") return Builtin::cos;
    if (s == "sinh") return Builtin::sinh;
    if (s == "cosh") return Builtin::cosh;
    if (s == "exp") return Builtin::exp;
    return std::nullopt;
}

namespace detail {

struct Node {
    Kind kind;
    Number num;                      // constant
    std::string name;                // param / fn
    Axis axis = Axis::x;             // var
    uint8_t deps = 0;                // fn
    std::array<uint8_t, 3> ord{0, 0, 0};
    Builtin fnb = Builtin::sin;      // apply
    long long expo = 0;              // pow
    std::vector<Expr> kids;
    uint64_t h = 0;

    static Expr wrap(std::shared_ptr<const Node> n) { return Expr(std::move(n)); }
};

inline uint64_t hmix(uint64_t h, uint64_t v) {
    v *= 0x9E3779B97F4A7C15ull;
    v ^= v >> 29;
    v *= 0xBF58476D1CE4E5B9ull;
    return h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
}

uint64_t node_hash(const Node& n) {
    uint64_t h = hmix(0x1234, static_cast<uint64_t>(n.kind));
    switch (n.kind) {
        case Kind::constant: h = hmix(h, n.num.hash()); break;
        case Kind::imaginary:
        case Kind::hbar: break;
        case Kind::param: h = hmix(h, Number(static_cast<long long>(n.name.size())).hash());
                          for (char c : n.name) h = hmix(h, static_cast<unsigned char>(c));
                          break;
        case Kind::var: h = hmix(h, static_cast<uint64_t>(n.axis)); break;
        case Kind::fn:
            for (char c : n.name) h = hmix(h, static_cast<unsigned char>(c));
            h = hmix(h, n.deps);
            h = hmix(h, (static_cast<uint64_t>(n.ord[0]) << 16) | (static_cast<uint64_t>(n.ord[1]) << 8) | n.ord[2]);
            break;
        case Kind::apply: h = hmix(h, static_cast<uint64_t>(n.fnb)); break;
        case Kind::pow: h = hmix(h, static_cast<uint64_t>(n.expo)); break;
        case Kind::add:
        case Kind::mul: break;
    }
    for (const Expr& k : n.kids) h = hmix(h, k.hash());
    return h;
}

std::shared_ptr<const Node> finish(Node&& n) {
    n.h = node_hash(n);
    return std::make_shared<const Node>(std::move(n));
}

const std::shared_ptr<const Node>& zero_node() {
    static const std::shared_ptr<const Node> n = [] {
        Node z;
        z.kind = Kind::constant;
        z.num = Number(0);
        return finish(std::move(z));
    }();
    return n;
}

const std::shared_ptr<const Node>& one_node() {
    static const std::shared_ptr<const Node> n = [] {
        Node o;
        o.kind = Kind::constant;
        o.num = Number(1);
        return finish(std::move(o));
    }();
    return n;
}

} // namespace detail

using detail::Node;

Expr::Expr() : node_(detail::zero_node()) {}

Kind Expr::kind() const { return node_->kind; }
const Number& Expr::number_value() const { return node_->num; }
const std::string& Expr::name() const { return node_->name; }
Axis Expr::axis() const { return node_->axis; }
uint8_t Expr::fn_deps() const { return node_->deps; }
const std::array<uint8_t, 3>& Expr::fn_order() const { return node_->ord; }
int Expr::fn_total_order() const { return node_->ord[0] + node_->ord[1] + node_->ord[2]; }
Builtin Expr::builtin() const { return node_->fnb; }
long long Expr::exponent() const { return node_->expo; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
uint64_t Expr::hash() const { return node_->h; }

bool Expr::is_zero_const() const { return node_->kind == Kind::constant && node_->num.is_zero(); }
bool Expr::is_one_const() const { return node_->kind == Kind::constant && node_->num.is_one(); }

bool Expr::equal(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->h != b.node_->h) return false;
    return compare(a, b) == 0;
}

int Expr::compare(const Expr& a, const Expr& b) {
    const Node* x = a.node_.get();
    const Node* y = b.node_.get();
    if (x == y) return 0;
    if (x->kind != y->kind) return x->kind < y->kind ? -1 : 1;
    if (x->h != y->h) return x->h < y->h ? -1 : 1;
    switch (x->kind) {
        case Kind::constant: {
            if (x->num.is_exact() != y->num.is_exact()) return x->num.is_exact() ? -1 : 1;
            return x->num.compare(y->num);
        }
        case Kind::imaginary:
        case Kind::hbar: return 0;
        case Kind::param: return x->name.compare(y->name) < 0 ? -1 : (x->name == y->name ? 0 : 1);
        case Kind::var: return x->axis < y->axis ? -1 : (x->axis == y->axis ? 0 : 1);
        case Kind::fn: {
            int c = x->name.compare(y->name);
            if (c) return c < 0 ? -1 : 1;
            if (x->deps != y->deps) return x->deps < y->deps ? -1 : 1;
            if (x->ord != y->ord) return x->ord < y->ord ? -1 : 1;
            return 0;
        }
        case Kind::apply: {
            if (x->fnb != y->fnb) return x->fnb < y->fnb ? -1 : 1;
            return compare(x->kids[0], y->kids[0]);
        }
        case Kind::pow: {
            int c = compare(x->kids[0], y->kids[0]);
            if (c) return c;
            return x->expo < y->expo ? -1 : (x->expo == y->expo ? 0 : 1);
        }
        case Kind::add:
        case Kind::mul: {
            if (x->kids.size() != y->kids.size()) return x->kids.size() < y->kids.size() ? -1 : 1;
            for (size_t i = 0; i < x->kids.size(); ++i) {
                int c = compare(x->kids[i], y->kids[i]);
                if (c) return c;
            }
            return 0;
        }
    }
    return 0;
}

// ---- factories ------------------------------------------------------------

Expr Expr::number(const Number& n) {
    if (n.is_zero() && n.is_exact()) return Node::wrap(detail::zero_node());
    if (n.is_one() && n.is_exact()) return Node::wrap(detail::one_node());
    Node c;
    c.kind = Kind::constant;
    c.num = n;
    return Node::wrap(detail::finish(std::move(c)));
}

Expr Expr::integer(long long n) { return number(Number(n)); }
Expr Expr::rational(long long num, long long den) { return number(Number::exact(Rational::make(num, den))); }
Expr Expr::real(double d) { return number(Number::approx(d)); }

Expr Expr::imaginary() {
    Node n;
    n.kind = Kind::imaginary;
    static const Expr e = Node::wrap(detail::finish(std::move(n)));
    return e;
}

Expr Expr::hbar() {
    Node n;
    n.kind = Kind::hbar;
    static const Expr e = Node::wrap(detail::finish(std::move(n)));
    return e;
}

Expr Expr::param(std::string name) {
    if (name.empty()) throw expr_error("empty parameter name");
    Node n;
    n.kind = Kind::param;
    n.name = std::move(name);
    return Node::wrap(detail::finish(std::move(n)));
}

Expr Expr::var(Axis a) {
    Node n;
    n.kind = Kind::var;
    n.axis = a;
    return Node::wrap(detail::finish(std::move(n)));
}

Expr Expr::fn(std::string name, Axis arg, int order) {
    std::array<uint8_t, 3> ord{0, 0, 0};
    ord[static_cast<int>(arg)] = static_cast<uint8_t>(order);
    return fn(std::move(name), axis_bit(arg), ord);
}

Expr Expr::fn(std::string name, uint8_t deps, std::array<uint8_t, 3> order) {
    if (name.empty()) throw expr_error("empty function name");
    if (deps == 0 || deps > 7) throw expr_error("function '" + name + "' has no argument variables");
    for (Axis a : kAxes)
        if (order[static_cast<int>(a)] > 0 && !(deps & axis_bit(a)))
            throw expr_error("derivative of '" + name + "' in a variable it does not depend on");
    Node n;
    n.kind = Kind::fn;
    n.name = std::move(name);
    n.deps = deps;
    n.ord = order;
    return Node::wrap(detail::finish(std::move(n)));
}

Expr Expr::apply(Builtin b, Expr arg) {
    if (arg.kind() == Kind::constant) {
        const Number& v = arg.number_value();
        if (v.is_exact() && v.is_zero()) {
            switch (b) {
                case Builtin::sin:
                case Builtin::sinh: return integer(0);
                case Builtin::cos:
                case Builtin::cosh:
                case Builtin::exp: return integer(1);
            }
        }
        if (!v.is_exact()) {
            double d = v.value();
            switch (b) {
                case Builtin::sin: return real(std::sin(d));
                case Builtin::cos: return real(std::cos(d));
                case Builtin::sinh: return real(std::sinh(d));
                case Builtin::cosh: return real(std::cosh(d));
                case Builtin::exp: return real(std::exp(d));
            }
        }
    }
    Node n;
    n.kind = Kind::apply;
    n.fnb = b;
    n.kids.push_back(std::move(arg));
    return Node::wrap(detail::finish(std::move(n)));
}

namespace {

Expr make_pow_node(const Expr& base, long long e) {
    // base is canonical and not constant/mul/pow/imaginary; exponent not 0 or 1
    Node n;
    n.kind = Kind::pow;
    n.expo = e;
    n.kids.push_back(base);
    return Node::wrap(detail::finish(std::move(n)));
}

Expr fold_imaginary_pow(long long e) {
    long long m = ((e % 4) + 4) % 4;
    switch (m) {
        case 0: return Expr::integer(1);
        case 1: return Expr::imaginary();
        case 2: return Expr::integer(-1);
        default: return Expr::mul({Expr::integer(-1), Expr::imaginary()});
    }
}

struct MulAccum {
    Number coef{1};
    long long icount = 0;
    std::map<Expr, long long, ExprLess> bases;

    void absorb(const Expr& f, long long exp) {
        switch (f.kind()) {
            case Kind::constant:
                coef = coef.mul(f.number_value().pow(exp));
                return;
            case Kind::imaginary:
                icount = (icount + ((exp % 4) + 4)) % 4;
                return;
            case Kind::pow:
                absorb(f.children()[0], exp * f.exponent());
                return;
            case Kind::mul:
                for (const Expr& k : f.children()) absorb(k, exp);
                return;
            default:
                bases[f] += exp;
                return;
        }
    }
};

} // namespace

Expr Expr::mul(std::vector<Expr> factors) {
    MulAccum acc;
    for (const Expr& f : factors) acc.absorb(f, 1);
    if (acc.coef.is_zero()) return number(acc.coef);
    if (acc.icount >= 2) {
        acc.coef = acc.coef.neg();
        acc.icount -= 2;
    }

    std::vector<Expr> out;
    out.reserve(acc.bases.size() + 2);
    if (acc.icount == 1) out.push_back(imaginary());
    for (const auto& [base, exp] : acc.bases) {
        if (exp == 0) continue;
        out.push_back(exp == 1 ? base : make_pow_node(base, exp));
    }
    std::sort(out.begin(), out.end(), ExprLess{});

    if (out.empty()) return number(acc.coef);
    if (acc.coef.is_one()) {
        if (out.size() == 1) return out[0];
    } else {
        out.insert(out.begin(), number(acc.coef));
    }
    Node n;
    n.kind = Kind::mul;
    n.kids = std::move(out);
    return Node::wrap(detail::finish(std::move(n)));
}

Expr Expr::pow(Expr base, long long e) {
    if (e == 0) return integer(1);
    if (e == 1) return base;
    switch (base.kind()) {
        case Kind::constant: return number(base.number_value().pow(e));
        case Kind::imaginary: return fold_imaginary_pow(e);
        case Kind::mul: {
            std::vector<Expr> out;
            out.reserve(base.children().size());
            for (const Expr& k : base.children()) out.push_back(pow(k, e));
            return mul(std::move(out));
        }
        case Kind::pow: {
            __int128 p = static_cast<__int128>(base.exponent()) * e;
            if (p > INT32_MAX || p < INT32_MIN) throw expr_error("exponent overflow");
            return pow(base.children()[0], static_cast<long long>(p));
        }
        default: return make_pow_node(base, e);
    }
}

namespace {

// Splits a canonical term into (numeric coefficient, key). The key for a pure
// constant is the literal 1.
std::pair<Number, Expr> split_coefficient(const Expr& t) {
    if (t.kind() == Kind::constant) return {t.number_value(), Expr::integer(1)};
    if (t.kind() == Kind::mul) {
        const auto& kids = t.children();
        if (kids[0].kind() == Kind::constant) {
            if (kids.size() == 2) return {kids[0].number_value(), kids[1]};
            Node rest;
            rest.kind = Kind::mul;
            rest.kids.assign(kids.begin() + 1, kids.end());
            return {kids[0].number_value(), Node::wrap(detail::finish(std::move(rest)))};
        }
    }
    return {Number(1), t};
}

Expr join_coefficient(const Number& c, const Expr& key) {
    if (key.is_one_const()) return Expr::number(c);
    if (c.is_one()) return key;
    if (key.kind() == Kind::mul) {
        Node n;
        n.kind = Kind::mul;
        n.kids.reserve(key.children().size() + 1);
        n.kids.push_back(Expr::number(c));
        for (const Expr& k : key.children()) n.kids.push_back(k);
        return Node::wrap(detail::finish(std::move(n)));
    }
    Node n;
    n.kind = Kind::mul;
    n.kids.push_back(Expr::number(c));
    n.kids.push_back(key);
    return Node::wrap(detail::finish(std::move(n)));
}

} // namespace

Expr Expr::add(std::vector<Expr> terms) {
    std::map<Expr, Number, ExprLess> acc;
    Number cacc(0);

    // Terms of the exact shape Const * Add flatten with the coefficient pushed
    // through, so sums built along different routes line up and X - X cancels
    // structurally. Keys in the accumulator are therefore never sums.
    auto absorb = [&](auto&& self, const Expr& t, const Number& scale) -> void {
        if (t.kind() == Kind::add) {
            for (const Expr& k : t.children()) self(self, k, scale);
            return;
        }
        if (t.kind() == Kind::mul && t.children().size() == 2 &&
            t.children()[0].kind() == Kind::constant && t.children()[1].kind() == Kind::add) {
            Number s = scale.mul(t.children()[0].number_value());
            for (const Expr& k : t.children()[1].children()) self(self, k, s);
            return;
        }
        auto [c, key] = split_coefficient(t);
        c = c.mul(scale);
        if (key.is_one_const()) {
            cacc = cacc.add(c);
        } else {
            auto it = acc.find(key);
            if (it == acc.end()) acc.emplace(key, c);
            else it->second = it->second.add(c);
        }
    };
    for (const Expr& t : terms) absorb(absorb, t, Number(1));

    std::vector<Expr> out;
    out.reserve(acc.size() + 1);
    if (!cacc.is_zero()) out.push_back(number(cacc));
    for (const auto& [key, c] : acc) {
        if (c.is_zero()) continue;
        out.push_back(join_coefficient(c, key));
    }
    if (out.empty()) return integer(0);
    if (out.size() == 1) return out[0];
    Node n;
    n.kind = Kind::add;
    n.kids = std::move(out);
    return Node::wrap(detail::finish(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::mul({Expr::integer(-1), b})}); }
Expr operator-(const Expr& a) { return Expr::mul({Expr::integer(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::mul({a, Expr::pow(b, -1)}); }

// ---- symbol queries ---------------------------------------------------------

namespace {

void collect_rec(const Expr& e, SymbolSet& out, std::set<const Node*>& seen) {
    if (!seen.insert(e.raw()).second) return;
    switch (e.kind()) {
        case Kind::constant: return;
        case Kind::imaginary: out.has_imaginary = true; return;
        case Kind::hbar: out.has_hbar = true; return;
        case Kind::param: out.params.insert(e.name()); return;
        case Kind::var: out.axes |= axis_bit(e.axis()); return;
        case Kind::fn:
            out.fns.insert(FnKey{e.name(), e.fn_deps(), e.fn_order()});
            out.axes |= e.fn_deps();
            return;
        default:
            for (const Expr& k : e.children()) collect_rec(k, out, seen);
            return;
    }
}

} // namespace

SymbolSet collect_symbols(const Expr& e) {
    SymbolSet s;
    std::set<const Node*> seen;
    collect_rec(e, s, seen);
    return s;
}

bool contains_imaginary(const Expr& e) { return collect_symbols(e).has_imaginary; }

long long hbar_min_degree(const Expr& e) {
    switch (e.kind()) {
        case Kind::hbar: return 1;
        case Kind::pow: return e.exponent() * hbar_min_degree(e.children()[0]);
        case Kind::add: {
            long long m = INT64_MAX;
            for (const Expr& k : e.children()) m = std::min(m, hbar_min_degree(k));
            return m == INT64_MAX ? 0 : m;
        }
        case Kind::mul: {
            long long s = 0;
            for (const Expr& k : e.children()) s += hbar_min_degree(k);
            return s;
        }
        default: return 0;
    }
}

std::string FnKey::str() const {
    Expr instance = Expr::fn(name, deps, order);
    return to_string(instance);
}

// ---- calculus -----------------------------------------------------------------

namespace {

Expr builtin_derivative(Builtin b, const Expr& arg) {
    switch (b) {
        case Builtin::sin: return Expr::apply(Builtin::cos, arg);
        case Builtin::cos: return -Expr::apply(Builtin::sin, arg);
        case Builtin::sinh: return Expr::apply(Builtin::cosh, arg);
        case Builtin::cosh: return Expr::apply(Builtin::sinh, arg);
        case Builtin::exp: return Expr::apply(Builtin::exp, arg);
    }
    return Expr();
}

// Shared derivative engine; exactly one of `axis` / `param` is active.
Expr diff_impl(const Expr& e, const std::optional<Axis>& axis, const std::string* param) {
    switch (e.kind()) {
        case Kind::constant:
        case Kind::imaginary:
        case Kind::hbar: return Expr::integer(0);
        case Kind::param:
            return (param && e.name() == *param) ? Expr::integer(1) : Expr::integer(0);
        case Kind::var:
            return (axis && e.axis() == *axis) ? Expr::integer(1) : Expr::integer(0);
        case Kind::fn: {
            if (!axis) return Expr::integer(0);
            if (!(e.fn_deps() & axis_bit(*axis))) return Expr::integer(0);
            auto ord = e.fn_order();
            int a = static_cast<int>(*axis);
            if (ord[a] == 255) throw expr_error("derivative tower overflow");
            ord[a] = static_cast<uint8_t>(ord[a] + 1);
            return Expr::fn(e.name(), e.fn_deps(), ord);
        }
        case Kind::apply: {
            const Expr& u = e.children()[0];
            return builtin_derivative(e.builtin(), u) * diff_impl(u, axis, param);
        }
        case Kind::pow: {
            const Expr& b = e.children()[0];
            return Expr::integer(e.exponent()) * Expr::pow(b, e.exponent() - 1) * diff_impl(b, axis, param);
        }
        case Kind::add: {
            std::vector<Expr> out;
            out.reserve(e.children().size());
            for (const Expr& k : e.children()) out.push_back(diff_impl(k, axis, param));
            return Expr::add(std::move(out));
        }
        case Kind::mul: {
            const auto& kids = e.children();
            std::vector<Expr> terms;
            terms.reserve(kids.size());
            for (size_t i = 0; i < kids.size(); ++i) {
                Expr d = diff_impl(kids[i], axis, param);
                if (d.is_zero_const()) continue;
                std::vector<Expr> fs;
                fs.reserve(kids.size());
                for (size_t j = 0; j < kids.size(); ++j) fs.push_back(i == j ? d : kids[j]);
                terms.push_back(Expr::mul(std::move(fs)));
            }
            return Expr::add(std::move(terms));
        }
    }
    return Expr();
}

} // namespace

Expr diff(const Expr& e, Axis v) { return diff_impl(e, v, nullptr); }
Expr diff_param(const Expr& e, const std::string& name) { return diff_impl(e, std::nullopt, &name); }

// ---- substitution ----------------------------------------------------------------

namespace {

template <typename Leaf>
Expr rebuild(const Expr& e, Leaf&& leaf) {
    switch (e.kind()) {
        case Kind::constant:
        case Kind::imaginary:
        case Kind::hbar:
        case Kind::param:
        case Kind::var:
        case Kind::fn: return leaf(e);
        case Kind::apply: return Expr::apply(e.builtin(), rebuild(e.children()[0], leaf));
        case Kind::pow: return Expr::pow(rebuild(e.children()[0], leaf), e.exponent());
        case Kind::add: {
            std::vector<Expr> out;
            out.reserve(e.children().size());
            for (const Expr& k : e.children()) out.push_back(rebuild(k, leaf));
            return Expr::add(std::move(out));
        }
        case Kind::mul: {
            std::vector<Expr> out;
            out.reserve(e.children().size());
            for (const Expr& k : e.children()) out.push_back(rebuild(k, leaf));
            return Expr::mul(std::move(out));
        }
    }
    return e;
}

} // namespace

Expr rename_axes(const Expr& e, const std::array<Axis, 3>& image) {
    uint8_t seen = 0;
    for (Axis a : image) seen |= axis_bit(a);
    if (seen != 7) throw expr_error("axis relabeling is not a permutation");
    return rebuild(e, [&](const Expr& leaf) -> Expr {
        if (leaf.kind() == Kind::var) return Expr::var(image[static_cast<int>(leaf.axis())]);
        if (leaf.kind() == Kind::fn) {
            uint8_t deps = 0;
            std::array<uint8_t, 3> ord{0, 0, 0};
            for (Axis a : kAxes) {
                int ai = static_cast<int>(a);
                if (leaf.fn_deps() & axis_bit(a)) {
                    deps |= axis_bit(image[ai]);
                    ord[static_cast<int>(image[ai])] = leaf.fn_order()[ai];
                }
            }
            return Expr::fn(leaf.name(), deps, ord);
        }
        return leaf;
    });
}

Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (bindings.empty()) return e;
    return rebuild(e, [&](const Expr& leaf) -> Expr {
        if (leaf.kind() == Kind::param) {
            auto it = bindings.find(leaf.name());
            if (it != bindings.end()) return it->second;
        }
        return leaf;
    });
}

Expr substitute_functions(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (bindings.empty()) return e;
    return rebuild(e, [&](const Expr& leaf) -> Expr {
        if (leaf.kind() == Kind::fn) {
            auto it = bindings.find(leaf.name());
            if (it != bindings.end()) {
                Expr r = it->second;
                for (Axis a : kAxes)
                    for (int k = 0; k < leaf.fn_order()[static_cast<int>(a)]; ++k) r = diff(r, a);
                return r;
            }
        }
        return leaf;
    });
}

// ---- rewrite rules -------------------------------------------------------------

RewriteRule RewriteRule::make(std::string fn, Axis formal, Expr replacement) {
    SymbolSet s = collect_symbols(replacement);
    if (s.axes & ~axis_bit(formal))
        throw expr_error("rewrite rule for '" + fn + "' uses variables other than its argument");
    for (const FnKey& k : s.fns) {
        if (k.name != fn || k.deps != axis_bit(formal))
            throw expr_error("rewrite rule for '" + fn + "' may only reference that function");
        if (k.order[static_cast<int>(formal)] >= 2)
            throw expr_error("rewrite rule for '" + fn + "' is not order-lowering");
    }
    return RewriteRule{std::move(fn), formal, std::move(replacement)};
}

namespace {

std::array<Axis, 3> swap_axes(Axis a, Axis b) {
    std::array<Axis, 3> m{Axis::x, Axis::y, Axis::z};
    std::swap(m[static_cast<int>(a)], m[static_cast<int>(b)]);
    return m;
}

} // namespace

Expr reduce(const Expr& e, std::span<const RewriteRule> rules, int max_passes) {
    if (rules.empty()) return e;
    for (size_t i = 0; i < rules.size(); ++i)
        for (size_t j = i + 1; j < rules.size(); ++j)
            if (rules[i].fn == rules[j].fn)
                throw expr_error("duplicate rewrite rule for '" + rules[i].fn + "'");

    Expr cur = e;
    for (int pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        Expr next = rebuild(cur, [&](const Expr& leaf) -> Expr {
            if (leaf.kind() != Kind::fn) return leaf;
            for (const RewriteRule& r : rules) {
                if (leaf.name() != r.fn) continue;
                // rules apply to univariate towers only
                uint8_t deps = leaf.fn_deps();
                if (deps != 1 && deps != 2 && deps != 4) continue;
                Axis inst = deps == 1 ? Axis::x : (deps == 2 ? Axis::y : Axis::z);
                int n = leaf.fn_order()[static_cast<int>(inst)];
                if (n < 2) continue;
                Expr repl = r.replacement;
                if (inst != r.formal) repl = rename_axes(repl, swap_axes(r.formal, inst));
                for (int k = 0; k < n - 2; ++k) repl = diff(repl, inst);
                changed = true;
                return repl;
            }
            return leaf;
        });
        cur = next;
        if (!changed) return cur;
    }
    throw expr_error("rewrite rules did not terminate (malformed rule?)");
}

} // namespace qintcart
