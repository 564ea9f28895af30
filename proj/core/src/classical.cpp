#include "qintcart/classical.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>

#include "qintcart/rng.hpp"

namespace qintcart {

namespace {

const std::array<std::string, 3>& momentum_names() {
    static const std::array<std::string, 3> n{"p1", "p2", "p3"};
    return n;
}

// hbar degree when every additive branch carries the same power
std::optional<long long> uniform_hbar_degree(const Expr& e) {
    switch (e.kind()) {
        case Kind::hbar: return 1;
        case Kind::pow: {
            auto b = uniform_hbar_degree(e.children()[0]);
            if (!b) return std::nullopt;
            return *b * e.exponent();
        }
        case Kind::add: {
            std::optional<long long> common;
            for (const Expr& k : e.children()) {
                auto d = uniform_hbar_degree(k);
                if (!d) return std::nullopt;
                if (common && *common != *d) return std::nullopt;
                common = d;
            }
            return common ? common : std::optional<long long>(0);
        }
        case Kind::mul: {
            long long s = 0;
            for (const Expr& k : e.children()) {
                auto d = uniform_hbar_degree(k);
                if (!d) return std::nullopt;
                s += *d;
            }
            return s;
        }
        case Kind::apply: {
            auto d = uniform_hbar_degree(e.children()[0]);
            if (!d || *d != 0) return std::nullopt;
            return 0;
        }
        default: return 0;
    }
}

Expr drop_positive_hbar(const Expr& e) {
    if (e.kind() == Kind::add) {
        std::vector<Expr> kept;
        for (const Expr& k : e.children()) kept.push_back(drop_positive_hbar(k));
        return Expr::add(std::move(kept));
    }
    if (auto d = uniform_hbar_degree(e)) {
        if (*d > 0) return Expr::integer(0);
        if (*d < 0) throw expr_error("negative hbar power in classical limit");
        return e;
    }
    // mixed powers hide inside a product; distribute its first Add factor
    if (e.kind() == Kind::mul) {
        const auto& kids = e.children();
        for (size_t j = 0; j < kids.size(); ++j) {
            if (kids[j].kind() != Kind::add) continue;
            std::vector<Expr> terms;
            for (const Expr& addend : kids[j].children()) {
                std::vector<Expr> fs;
                fs.reserve(kids.size());
                for (size_t q = 0; q < kids.size(); ++q) fs.push_back(q == j ? addend : kids[q]);
                terms.push_back(Expr::mul(std::move(fs)));
            }
            return drop_positive_hbar(Expr::add(std::move(terms)));
        }
    }
    throw expr_error("cannot take classical limit of: " + to_string(e));
}

Expr strip_and_check(const Expr& symbol_expr) {
    Expr out = drop_positive_hbar(symbol_expr);
    if (collect_symbols(out).has_hbar)
        throw expr_error("hbar survived the classical limit: " + to_string(out));
    return out;
}

} // namespace

Expr classicalize(const MomentumPolynomial& mp) {
    std::vector<Expr> terms;
    Expr factor = mp.ordering() == MomentumOrdering::symmetrized ? Expr::integer(2)
                                                                 : Expr::integer(1);
    for (const auto& [idx, c] : mp.terms()) {
        std::vector<Expr> fs{factor, c};
        for (Axis a : kAxes) {
            int e = idx[static_cast<int>(a)];
            if (e > 0)
                fs.push_back(Expr::pow(Expr::param(momentum_names()[static_cast<int>(a)]), e));
        }
        terms.push_back(Expr::mul(std::move(fs)));
    }
    return strip_and_check(Expr::add(std::move(terms)));
}

Expr classicalize(const DiffOp& op) {
    if (op.order() > 2) throw expr_error("classical limit needs operator order <= 2");
    return strip_and_check(momentum_expr(to_momentum(op)));
}

Expr poisson(const Expr& a, const Expr& b) {
    std::vector<Expr> terms;
    for (Axis ax : kAxes) {
        const std::string& pj = momentum_names()[static_cast<int>(ax)];
        terms.push_back(diff(a, ax) * diff_param(b, pj));
        terms.push_back(Expr::integer(-1) * diff_param(a, pj) * diff(b, ax));
    }
    return Expr::add(std::move(terms));
}

EvalPoint sample_symbol_bindings(std::span<const Expr> exprs, uint64_t seed) {
    SymbolSet all;
    for (const Expr& e : exprs) {
        SymbolSet s = collect_symbols(e);
        all.params.insert(s.params.begin(), s.params.end());
        all.fns.insert(s.fns.begin(), s.fns.end());
        all.has_hbar = all.has_hbar || s.has_hbar;
    }
    Rng rng(derive_seed(seed, "bindings"));
    EvalPoint pt;
    for (const std::string& p : all.params) {
        bool is_momentum = false;
        for (const auto& m : momentum_names()) is_momentum = is_momentum || p == m;
        if (!is_momentum) pt.params.emplace(p, rng.annulus());
    }
    for (const FnKey& k : all.fns) pt.fn_values.emplace(k, rng.annulus());
    if (all.has_hbar) pt.hbar = rng.positive_real();
    return pt;
}

// ---- profile ODE -----------------------------------------------------------

std::complex<double> OdeProfile::value(double x, int order) const {
    switch (order) {
        case 0: return component(x, 0);
        case 1: return component(x, 1);
        case 2: {
            double f = component(x, 0);
            return C * f * f + C1 * f + C4;
        }
        case 3: {
            double f = component(x, 0);
            return (2.0 * C * f + C1) * component(x, 1);
        }
        default:
            throw eval_error("profile supports derivative orders 0..3 (order " +
                             std::to_string(order) + " requested)");
    }
}

double OdeProfile::component(double x, int c) const {
    const bool fwd = x >= 0.0;
    const Dopri5::Result& branch = fwd ? forward : backward;
    double reach = fwd ? reach_hi : reach_lo;
    if ((fwd && x > reach + 1e-12) || (!fwd && x < reach - 1e-12)) {
        std::string side = fwd ? "above x=" : "below x=";
        throw eval_error("profile leaves tabulated range " + side + std::to_string(reach) +
                         ((fwd ? blowup_pos : blowup_neg) ? " (finite-time blow-up)" : ""));
    }
    if (branch.dense.empty()) {
        // x == 0 before any step, or a degenerate range
        return branch.y_final[c];
    }
    return Dopri5::dense_eval(branch, x, c, 2);
}

std::shared_ptr<OdeProfile> integrate_profile(double C, double C1, double C4, double f0,
                                              double f0p, double x_lo, double x_hi,
                                              double rtol) {
    if (!(x_lo <= 0.0 && 0.0 <= x_hi))
        throw expr_error("profile range must contain the initial point x=0");
    auto prof = std::make_shared<OdeProfile>();
    prof->C = C;
    prof->C1 = C1;
    prof->C4 = C4;

    Dopri5::Rhs rhs = [C, C1, C4](double, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = C * y[0] * y[0] + C1 * y[0] + C4;
    };
    Dopri5::Options opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    opt.max_step = 0.05;
    Dopri5 solver(2, opt);

    std::vector<double> y0{f0, f0p};
    prof->forward = x_hi > 0.0 ? solver.integrate(rhs, 0.0, x_hi, y0)
                               : Dopri5::Result{Dopri5::Status::completed, 0.0, y0, {}, 0, 0};
    prof->backward = x_lo < 0.0 ? solver.integrate(rhs, 0.0, x_lo, y0)
                                : Dopri5::Result{Dopri5::Status::completed, 0.0, y0, {}, 0, 0};
    prof->reach_hi = prof->forward.t_reached;
    prof->reach_lo = prof->backward.t_reached;
    prof->blowup_pos = !prof->forward.completed();
    prof->blowup_neg = !prof->backward.completed();

    auto first_integral = [&](const std::vector<double>& y) {
        return 0.5 * y[1] * y[1] - C / 3.0 * y[0] * y[0] * y[0] - C1 / 2.0 * y[0] * y[0] -
               C4 * y[0];
    };
    auto term_magnitude = [&](const std::vector<double>& y) {
        return std::max({0.5 * y[1] * y[1], std::abs(C / 3.0 * y[0] * y[0] * y[0]),
                         std::abs(C1 / 2.0 * y[0] * y[0]), std::abs(C4 * y[0])});
    };
    prof->first_integral0 = first_integral(y0);
    double scale = 1.0 + std::abs(prof->first_integral0);
    double drift = 0.0;
    for (const Dopri5::Result* branch : {&prof->forward, &prof->backward}) {
        for (const Dopri5::Segment& seg : branch->dense) {
            std::vector<double> y{Dopri5::dense_eval(*branch, seg.t0 + seg.h, 0, 2),
                                  Dopri5::dense_eval(*branch, seg.t0 + seg.h, 1, 2)};
            if (!std::isfinite(y[0]) || !std::isfinite(y[1])) continue;
            // E is a difference of terms that diverge at a pole; the monitor
            // only certifies accuracy while its evaluation stays conditioned
            if (term_magnitude(y) > 1e2 * scale) continue;
            drift = std::max(drift, std::abs(first_integral(y) - prof->first_integral0) / scale);
        }
    }
    prof->first_integral_drift = drift;
    return prof;
}

// ---- compiled evaluation ------------------------------------------------------

namespace {

using cplx = std::complex<double>;

// Expression DAG flattened to a postfix tape; q/p inputs are the only
// unresolved symbols, everything else folds to constants at compile time.
class Compiled {
public:
    Compiled() = default;
    Compiled(const Expr& e, const EvalPoint& bindings) {
        std::map<const detail::Node*, int> slots;
        root_ = emit(e, bindings, slots);
        scratch_.resize(prog_.size());
    }

    double eval(const std::array<double, 6>& qp) const {
        for (size_t pc = 0; pc < prog_.size(); ++pc) {
            const Ins& I = prog_[pc];
            cplx v;
            switch (I.op) {
                case Op::constant: v = I.c; break;
                case Op::input: v = qp[I.a]; break;
                case Op::profile:
                    v = I.prof->value(qp[I.a], I.b);
                    break;
                case Op::add:
                    v = 0.0;
                    for (int s : I.args) v += scratch_[s];
                    break;
                case Op::mul:
                    v = 1.0;
                    for (int s : I.args) v *= scratch_[s];
                    break;
                case Op::powi: {
                    cplx base = scratch_[I.a];
                    long long e = I.expo;
                    bool inv = e < 0;
                    unsigned long long k = inv ? -(unsigned long long)e : (unsigned long long)e;
                    v = 1.0;
                    cplx b = base;
                    while (k) {
                        if (k & 1ull) v *= b;
                        b *= b;
                        k >>= 1ull;
                    }
                    if (inv) v = 1.0 / v;
                    break;
                }
                case Op::apply:
                    switch (I.fnb) {
                        case Builtin::sin: v = std::sin(scratch_[I.a]); break;
                        case Builtin::cos: v = std::cos(scratch_[I.a]); break;
                        case Builtin::sinh: v = std::sinh(scratch_[I.a]); break;
                        case Builtin::cosh: v = std::cosh(scratch_[I.a]); break;
                        case Builtin::exp: v = std::exp(scratch_[I.a]); break;
                    }
                    break;
            }
            scratch_[pc] = v;
        }
        cplx r = scratch_[root_];
        if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r.real())))
            throw eval_error("classical evaluation produced a complex value");
        return r.real();
    }

private:
    enum class Op : uint8_t { constant, input, profile, add, mul, powi, apply };
    struct Ins {
        Op op;
        int a = 0, b = 0;
        cplx c;
        const FnProfile* prof = nullptr;
        Builtin fnb = Builtin::sin;
        long long expo = 0;
        std::vector<int> args;
    };

    int emit(const Expr& e, const EvalPoint& bind, std::map<const detail::Node*, int>& slots) {
        auto it = slots.find(e.raw());
        if (it != slots.end()) return it->second;
        Ins I;
        switch (e.kind()) {
            case Kind::constant: I.op = Op::constant; I.c = e.number_value().as_complex(); break;
            case Kind::imaginary: I.op = Op::constant; I.c = cplx(0.0, 1.0); break;
            case Kind::hbar:
                if (!bind.hbar) throw eval_error("unbound symbol hbar");
                I.op = Op::constant;
                I.c = *bind.hbar;
                break;
            case Kind::var:
                I.op = Op::input;
                I.a = static_cast<int>(e.axis());
                break;
            case Kind::param: {
                for (int j = 0; j < 3; ++j)
                    if (e.name() == momentum_names()[j]) {
                        I.op = Op::input;
                        I.a = 3 + j;
                        goto done;
                    }
                {
                    auto p = bind.params.find(e.name());
                    if (p == bind.params.end())
                        throw eval_error("unbound parameter " + e.name());
                    I.op = Op::constant;
                    I.c = p->second;
                }
                break;
            }
            case Kind::fn: {
                FnKey key{e.name(), e.fn_deps(), e.fn_order()};
                auto v = bind.fn_values.find(key);
                if (v != bind.fn_values.end()) {
                    I.op = Op::constant;
                    I.c = v->second;
                    break;
                }
                auto prof = bind.fn_profiles.find(e.name());
                if (prof == bind.fn_profiles.end())
                    throw eval_error("missing profile for abstract function " + e.name());
                uint8_t deps = e.fn_deps();
                if (deps != 1 && deps != 2 && deps != 4)
                    throw eval_error("profile for multivariate function " + e.name());
                I.op = Op::profile;
                I.prof = prof->second.get();
                I.a = deps == 1 ? 0 : (deps == 2 ? 1 : 2);
                I.b = e.fn_total_order();
                break;
            }
            case Kind::apply:
                I.op = Op::apply;
                I.fnb = e.builtin();
                I.a = emit(e.children()[0], bind, slots);
                break;
            case Kind::pow:
                I.op = Op::powi;
                I.a = emit(e.children()[0], bind, slots);
                I.expo = e.exponent();
                break;
            case Kind::add:
            case Kind::mul:
                I.op = e.kind() == Kind::add ? Op::add : Op::mul;
                for (const Expr& k : e.children()) I.args.push_back(emit(k, bind, slots));
                break;
        }
    done:
        prog_.push_back(std::move(I));
        int slot = static_cast<int>(prog_.size()) - 1;
        slots.emplace(e.raw(), slot);
        scratch_.resize(prog_.size());
        return slot;
    }

    std::vector<Ins> prog_;
    mutable std::vector<cplx> scratch_;
    int root_ = 0;
};

} // namespace

ClassicalSystem make_classical_system(const CaseSpec& spec, const ProfileBindings& profiles) {
    ClassicalSystem sys;
    auto concretize = [&](Expr e) {
        e = reduce(e, spec.rules);
        return substitute_functions(e, profiles.closed);
    };
    sys.H = concretize(classicalize(hamiltonian_op(spec.field)));
    sys.Q = concretize(classicalize(spec.Q));
    sys.P = concretize(classicalize(spec.P));
    sys.bindings.params = profiles.params;
    sys.bindings.fn_profiles.insert(profiles.numeric.begin(), profiles.numeric.end());
    return sys;
}

TrajectoryLog integrate_trajectory(const ClassicalSystem& sys, const PhaseState& initial,
                                   double t_final, double rtol, int samples) {
    if (samples < 2) samples = 2;

    std::array<Compiled, 6> rhs;
    for (int j = 0; j < 3; ++j) {
        rhs[j] = Compiled(diff_param(sys.H, momentum_names()[j]), sys.bindings);
        rhs[3 + j] = Compiled(Expr::integer(-1) * diff(sys.H, static_cast<Axis>(j)), sys.bindings);
    }
    std::array<Compiled, 3> obs{Compiled(sys.H, sys.bindings), Compiled(sys.Q, sys.bindings),
                                Compiled(sys.P, sys.bindings)};

    Dopri5::Rhs f = [&rhs](double, const double* y, double* dy) {
        std::array<double, 6> qp;
        std::copy(y, y + 6, qp.begin());
        for (int j = 0; j < 6; ++j) dy[j] = rhs[j].eval(qp);
    };

    Dopri5::Options opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    Dopri5 solver(6, opt);

    std::vector<double> y0(6);
    for (int j = 0; j < 3; ++j) {
        y0[j] = initial.q[j];
        y0[3 + j] = initial.p[j];
    }
    Dopri5::Result r = solver.integrate(f, 0.0, t_final, y0);

    TrajectoryLog log;
    log.blew_up = !r.completed();
    log.blowup_time = r.t_reached;
    double t_end = r.t_reached;

    std::array<double, 3> base{0.0, 0.0, 0.0};
    for (int k = 0; k < samples; ++k) {
        double t = t_end * k / (samples - 1);
        std::array<double, 6> qp;
        for (int j = 0; j < 6; ++j)
            qp[j] = (k == 0 || r.dense.empty()) ? y0[j] : Dopri5::dense_eval(r, t, j, 6);
        std::array<double, 3> vals{obs[0].eval(qp), obs[1].eval(qp), obs[2].eval(qp)};
        if (k == 0) base = vals;
        for (int j = 0; j < 3; ++j)
            log.drift[j] = std::max(log.drift[j],
                                    std::abs(vals[j] - base[j]) / (1.0 + std::abs(base[j])));
        log.t.push_back(t);
        log.states.push_back(qp);
        log.observables.push_back(vals);
    }
    return log;
}

int independence_rank(const std::vector<Expr>& observables, const PhaseState& state,
                      const EvalPoint& bindings, double threshold) {
    EvalPoint pt = bindings;
    for (int j = 0; j < 3; ++j) {
        pt.vars[j] = std::complex<double>(state.q[j], 0.0);
        pt.params[momentum_names()[j]] = std::complex<double>(state.p[j], 0.0);
    }

    Eigen::MatrixXcd J(static_cast<int>(observables.size()), 6);
    for (int r = 0; r < static_cast<int>(observables.size()); ++r) {
        for (int c = 0; c < 3; ++c)
            J(r, c) = eval(diff(observables[r], static_cast<Axis>(c)), pt);
        for (int c = 0; c < 3; ++c)
            J(r, 3 + c) = eval(diff_param(observables[r], momentum_names()[c]), pt);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0) return 0;
    double smax = sigma(0);
    if (smax <= 0.0) return 0;
    int rank = 0;
    for (int k = 0; k < sigma.size(); ++k)
        if (sigma(k) > threshold * smax) ++rank;
    return rank;
}

int independence_rank_seeded(const std::vector<Expr>& observables, const PhaseState& state,
                             uint64_t seed, double threshold) {
    std::vector<Expr> closure = observables;
    for (const Expr& o : observables) {
        for (Axis a : kAxes) closure.push_back(diff(o, a));
        for (const auto& pj : momentum_names()) closure.push_back(diff_param(o, pj));
    }
    EvalPoint bindings = sample_symbol_bindings(closure, seed);
    return independence_rank(observables, state, bindings, threshold);
}

std::string TrajectoryLog::csv() const {
    std::string out = "t,x,y,z,p1,p2,p3,H,Q,P\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        int m = std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
        out.append(buf, static_cast<size_t>(m));
    };
    for (size_t k = 0; k < t.size(); ++k) {
        put(t[k], ',');
        for (int j = 0; j < 6; ++j) put(states[k][j], ',');
        put(observables[k][0], ',');
        put(observables[k][1], ',');
        put(observables[k][2], '\n');
    }
    return out;
}

} // namespace qintcart
