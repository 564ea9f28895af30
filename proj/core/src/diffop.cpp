#include "qintcart/diffop.hpp"

#include "qintcart/parse.hpp"
#include "qintcart/rng.hpp"

namespace qintcart {

namespace {

constexpr int kMaxOrder = 4;

long long binom(int n, int k) {
    static const long long table[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    return table[n][k];
}

Expr minus_i_hbar() { return Expr::integer(-1) * Expr::imaginary() * Expr::hbar(); }

const std::array<std::string, 3>& momentum_names() {
    static const std::array<std::string, 3> n{"p1", "p2", "p3"};
    return n;
}

} // namespace

DiffOp DiffOp::identity(Expr coefficient) {
    DiffOp o;
    o.set({0, 0, 0}, std::move(coefficient));
    return o;
}

DiffOp DiffOp::partial(Axis a) {
    DiffOp o;
    o.set(unit_index(a), Expr::integer(1));
    return o;
}

DiffOp DiffOp::momentum(Axis a) {
    DiffOp o;
    o.set(unit_index(a), minus_i_hbar());
    return o;
}

int DiffOp::order() const {
    int m = 0;
    for (const auto& [idx, c] : terms_) m = std::max(m, index_order(idx));
    return m;
}

Expr DiffOp::coefficient(MultiIndex idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Expr() : it->second;
}

void DiffOp::set(MultiIndex idx, Expr coefficient) {
    if (index_order(idx) > kMaxOrder) throw diffop_error("operator order exceeds 4");
    if (coefficient.is_zero_const()) terms_.erase(idx);
    else terms_[idx] = std::move(coefficient);
}

void DiffOp::accumulate(MultiIndex idx, const Expr& delta) {
    set(idx, coefficient(idx) + delta);
}

bool operator==(const DiffOp& a, const DiffOp& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto it = a.terms_.begin();
    auto jt = b.terms_.begin();
    for (; it != a.terms_.end(); ++it, ++jt)
        if (it->first != jt->first || it->second != jt->second) return false;
    return true;
}

DiffOp add(const DiffOp& a, const DiffOp& b) {
    DiffOp out = a;
    for (const auto& [idx, c] : b.terms()) out.accumulate(idx, c);
    return out;
}

DiffOp sub(const DiffOp& a, const DiffOp& b) {
    DiffOp out = a;
    for (const auto& [idx, c] : b.terms()) out.accumulate(idx, -c);
    return out;
}

DiffOp scale(const DiffOp& a, const Expr& left_factor) {
    DiffOp out;
    for (const auto& [idx, c] : a.terms()) out.set(idx, left_factor * c);
    return out;
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
    if (a.order() + b.order() > kMaxOrder)
        throw diffop_error("compose would exceed operator order 4");
    DiffOp out;
    for (const auto& [alpha, c] : a.terms()) {
        for (const auto& [beta, d] : b.terms()) {
            MultiIndex gamma{0, 0, 0};
            for (gamma[0] = 0; gamma[0] <= alpha[0]; ++gamma[0])
                for (gamma[1] = 0; gamma[1] <= alpha[1]; ++gamma[1])
                    for (gamma[2] = 0; gamma[2] <= alpha[2]; ++gamma[2]) {
                        Expr dg = d;
                        for (Axis ax : kAxes)
                            for (int k = 0; k < gamma[static_cast<int>(ax)]; ++k) dg = diff(dg, ax);
                        if (dg.is_zero_const()) continue;
                        long long mult = binom(alpha[0], gamma[0]) * binom(alpha[1], gamma[1]) *
                                         binom(alpha[2], gamma[2]);
                        MultiIndex target{
                            static_cast<uint8_t>(alpha[0] - gamma[0] + beta[0]),
                            static_cast<uint8_t>(alpha[1] - gamma[1] + beta[1]),
                            static_cast<uint8_t>(alpha[2] - gamma[2] + beta[2])};
                        out.accumulate(target, Expr::integer(mult) * c * dg);
                    }
        }
    }
    return out;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) {
    return sub(compose(a, b), compose(b, a));
}

DiffOp commutator(const DiffOp& a, const DiffOp& b, const ZeroTestConfig& prune) {
    DiffOp raw = commutator(a, b);
    DiffOp out;
    uint64_t salt = 0;
    for (const auto& [idx, c] : raw.terms()) {
        ZeroTestConfig cfg = prune;
        cfg.seed = derive_seed(prune.seed, "commutator-prune", salt++);
        if (!is_zero(c, cfg)) out.set(idx, c);
    }
    return out;
}

std::map<int, std::vector<std::pair<MultiIndex, Expr>>> split_by_order(const DiffOp& o) {
    std::map<int, std::vector<std::pair<MultiIndex, Expr>>> out;
    for (const auto& [idx, c] : o.terms()) out[index_order(idx)].emplace_back(idx, c);
    return out;
}

Expr apply_op(const DiffOp& o, const Expr& phi) {
    std::vector<Expr> terms;
    terms.reserve(o.terms().size());
    for (const auto& [idx, c] : o.terms()) {
        Expr d = phi;
        for (Axis ax : kAxes)
            for (int k = 0; k < idx[static_cast<int>(ax)]; ++k) d = diff(d, ax);
        terms.push_back(c * d);
    }
    return Expr::add(std::move(terms));
}

DiffOp reduce_coefficients(const DiffOp& o, std::span<const RewriteRule> rules) {
    DiffOp out;
    for (const auto& [idx, c] : o.terms()) out.set(idx, reduce(c, rules));
    return out;
}

DiffOp rename_axes(const DiffOp& o, const std::array<Axis, 3>& image) {
    DiffOp out;
    for (const auto& [idx, c] : o.terms()) {
        MultiIndex m{0, 0, 0};
        for (Axis a : kAxes) m[static_cast<int>(image[static_cast<int>(a)])] = idx[static_cast<int>(a)];
        out.set(m, rename_axes(c, image));
    }
    return out;
}

// ---- momentum polynomials ---------------------------------------------------

Expr MomentumPolynomial::coefficient(MultiIndex idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Expr() : it->second;
}

void MomentumPolynomial::set(MultiIndex idx, Expr coefficient) {
    if (index_order(idx) > kMaxOrder) throw diffop_error("momentum degree exceeds 4");
    if (coefficient.is_zero_const()) terms_.erase(idx);
    else terms_[idx] = std::move(coefficient);
}

void MomentumPolynomial::accumulate(MultiIndex idx, const Expr& delta) {
    set(idx, coefficient(idx) + delta);
}

bool operator==(const MomentumPolynomial& a, const MomentumPolynomial& b) {
    if (a.ordering_ != b.ordering_ || a.terms_.size() != b.terms_.size()) return false;
    auto it = a.terms_.begin();
    auto jt = b.terms_.begin();
    for (; it != a.terms_.end(); ++it, ++jt)
        if (it->first != jt->first || it->second != jt->second) return false;
    return true;
}

DiffOp from_momentum(const MomentumPolynomial& mp) {
    DiffOp out;
    for (const auto& [idx, c] : mp.terms()) {
        // p^idx as a normal-ordered operator: (-i*hbar)^|idx| d^idx
        DiffOp mono;
        mono.set(idx, Expr::pow(minus_i_hbar(), index_order(idx)));
        DiffOp left = scale(mono, c);
        if (mp.ordering() == MomentumOrdering::left) {
            out = add(out, left);
        } else {
            out = add(out, add(left, compose(mono, DiffOp::identity(c))));
        }
    }
    return out;
}

MomentumPolynomial to_momentum(const DiffOp& o) {
    MomentumPolynomial mp(MomentumOrdering::left);
    for (const auto& [idx, c] : o.terms()) {
        // d_j = (i/hbar) p_j
        Expr factor = Expr::pow(Expr::imaginary(), index_order(idx)) *
                      Expr::pow(Expr::hbar(), -index_order(idx));
        mp.set(idx, c * factor);
    }
    return mp;
}

Expr momentum_expr(const MomentumPolynomial& mp) {
    std::vector<Expr> terms;
    for (const auto& [idx, c] : mp.terms()) {
        std::vector<Expr> fs{c};
        for (Axis a : kAxes) {
            int e = idx[static_cast<int>(a)];
            if (e > 0) fs.push_back(Expr::pow(Expr::param(momentum_names()[static_cast<int>(a)]), e));
        }
        terms.push_back(Expr::mul(std::move(fs)));
    }
    return Expr::add(std::move(terms));
}

std::string print_momentum(const MomentumPolynomial& mp) { return to_string(momentum_expr(mp)); }
std::string print_momentum(const DiffOp& o) { return print_momentum(to_momentum(o)); }

namespace {

std::optional<int> momentum_slot(const Expr& e) {
    if (e.kind() != Kind::param) return std::nullopt;
    for (int j = 0; j < 3; ++j)
        if (e.name() == momentum_names()[j]) return j;
    return std::nullopt;
}

bool mentions_momentum(const Expr& e) {
    SymbolSet s = collect_symbols(e);
    for (const auto& n : momentum_names())
        if (s.params.count(n)) return true;
    return false;
}

} // namespace

namespace {

// Flattens sums and distributes products/powers whose factors still hide
// momenta behind an Add, one addend at a time, so each emitted term is a
// plain monomial in p. Powers are peeled by decrementing the exponent (the
// sum of Add-with-momentum exponents strictly drops at every step).
void gather_momentum_terms(const Expr& e, std::vector<Expr>& out) {
    if (e.kind() == Kind::add) {
        for (const Expr& k : e.children()) gather_momentum_terms(k, out);
        return;
    }
    std::vector<Expr> factors =
        e.kind() == Kind::mul ? e.children() : std::vector<Expr>{e};
    for (size_t j = 0; j < factors.size(); ++j) {
        const Expr& f = factors[j];
        if (f.kind() == Kind::add && mentions_momentum(f)) {
            for (const Expr& addend : f.children()) {
                std::vector<Expr> fs = factors;
                fs[j] = addend;
                gather_momentum_terms(Expr::mul(std::move(fs)), out);
            }
            return;
        }
        if (f.kind() == Kind::pow && f.exponent() >= 2 &&
            f.children()[0].kind() == Kind::add && mentions_momentum(f)) {
            const Expr& base = f.children()[0];
            Expr peeled = Expr::pow(base, f.exponent() - 1);
            for (const Expr& addend : base.children()) {
                std::vector<Expr> fs = factors;
                fs[j] = peeled;
                fs.push_back(addend);
                gather_momentum_terms(Expr::mul(std::move(fs)), out);
            }
            return;
        }
    }
    out.push_back(e);
}

} // namespace

MomentumPolynomial parse_momentum(std::string_view text) {
    Expr e = parse(text);
    MomentumPolynomial mp(MomentumOrdering::left);
    std::vector<Expr> terms;
    gather_momentum_terms(e, terms);
    for (const Expr& t : terms) {
        std::vector<Expr> factors =
            t.kind() == Kind::mul ? t.children() : std::vector<Expr>{t};
        MultiIndex idx{0, 0, 0};
        std::vector<Expr> coeff;
        for (const Expr& f : factors) {
            if (auto j = momentum_slot(f)) {
                ++idx[*j];
                continue;
            }
            if (f.kind() == Kind::pow) {
                if (auto j = momentum_slot(f.children()[0])) {
                    if (f.exponent() < 0)
                        throw diffop_error("negative momentum power in '" + std::string(text) + "'");
                    idx[*j] = static_cast<uint8_t>(idx[*j] + f.exponent());
                    continue;
                }
            }
            if (mentions_momentum(f))
                throw diffop_error("momenta must occur polynomially in '" + std::string(text) + "'");
            coeff.push_back(f);
        }
        if (index_order(idx) > kMaxOrder)
            throw diffop_error("momentum degree exceeds 4 in '" + std::string(text) + "'");
        mp.accumulate(idx, Expr::mul(std::move(coeff)));
    }
    return mp;
}

DiffOp build_bilinear(const std::array<std::array<Expr, 3>, 3>& a,
                      const std::array<std::array<Expr, 3>, 3>& b,
                      const std::array<std::array<Expr, 3>, 3>& c,
                      const std::array<Expr, 3>& f, const Expr& gamma) {
    for (int i = 0; i < 3; ++i)
        for (int k = i + 1; k < 3; ++k) {
            if (a[i][k] != a[k][i]) throw diffop_error("matrix a is not symmetric");
            if (c[i][k] != c[k][i]) throw diffop_error("matrix c is not symmetric");
        }

    // M_i = eps_{ikl} x_k p_l
    std::array<DiffOp, 3> M;
    static constexpr int eps[3][3][3] = {
        {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
        {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
        {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    for (int i = 0; i < 3; ++i) {
        DiffOp m;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                if (eps[i][k][l] != 0)
                    m = add(m, scale(DiffOp::momentum(static_cast<Axis>(l)),
                                     Expr::integer(eps[i][k][l]) * Expr::var(static_cast<Axis>(k))));
        M[i] = m;
    }
    std::array<DiffOp, 3> P{DiffOp::momentum(Axis::x), DiffOp::momentum(Axis::y),
                            DiffOp::momentum(Axis::z)};

    DiffOp out;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            if (!a[i][k].is_zero_const()) out = add(out, scale(compose(M[i], M[k]), a[i][k]));
            if (!b[i][k].is_zero_const())
                out = add(out, scale(add(compose(P[i], M[k]), compose(M[k], P[i])), b[i][k]));
            if (!c[i][k].is_zero_const()) out = add(out, scale(compose(P[i], P[k]), c[i][k]));
        }
    for (int i = 0; i < 3; ++i)
        if (!f[i].is_zero_const()) out = add(out, scale(P[i], f[i]));
    out = add(out, DiffOp::identity(gamma));
    return out;
}

} // namespace qintcart
