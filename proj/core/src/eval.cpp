#include "qintcart/expr.hpp"
#include "qintcart/rng.hpp"

#include <cmath>
#include <unordered_map>

namespace qintcart {

namespace {

using cplx = std::complex<double>;

cplx int_pow(cplx base, long long e) {
    if (e == 0) return {1.0, 0.0};
    bool inv = e < 0;
    unsigned long long k = inv ? static_cast<unsigned long long>(-(e + 1)) + 1ull
                               : static_cast<unsigned long long>(e);
    if (inv && base == cplx{0.0, 0.0}) throw eval_error("division by zero");
    cplx acc{1.0, 0.0}, b = base;
    while (k) {
        if (k & 1ull) acc *= b;
        b *= b;
        k >>= 1ull;
    }
    return inv ? cplx{1.0, 0.0} / acc : acc;
}

struct Evaluator {
    const EvalPoint& pt;
    std::unordered_map<const detail::Node*, cplx>* memo;

    cplx run(const Expr& e) {
        if (memo) {
            auto it = memo->find(e.raw());
            if (it != memo->end()) return it->second;
        }
        cplx v = compute(e);
        if (memo) memo->emplace(e.raw(), v);
        return v;
    }

    cplx compute(const Expr& e) {
        switch (e.kind()) {
            case Kind::constant: return e.number_value().as_complex();
            case Kind::imaginary: return {0.0, 1.0};
            case Kind::hbar:
                if (!pt.hbar) throw eval_error("unbound symbol hbar");
                return {*pt.hbar, 0.0};
            case Kind::param: {
                auto it = pt.params.find(e.name());
                if (it == pt.params.end()) throw eval_error("unbound parameter " + e.name());
                return it->second;
            }
            case Kind::var: {
                const auto& v = pt.vars[static_cast<int>(e.axis())];
                if (!v) throw eval_error(std::string("unbound variable ") + axis_name(e.axis()));
                return *v;
            }
            case Kind::fn: {
                FnKey key{e.name(), e.fn_deps(), e.fn_order()};
                auto it = pt.fn_values.find(key);
                if (it != pt.fn_values.end()) return it->second;
                auto pit = pt.fn_profiles.find(e.name());
                if (pit != pt.fn_profiles.end()) {
                    uint8_t deps = e.fn_deps();
                    if (deps != 1 && deps != 2 && deps != 4)
                        throw eval_error("profile for multivariate function " + e.name());
                    Axis a = deps == 1 ? Axis::x : (deps == 2 ? Axis::y : Axis::z);
                    const auto& v = pt.vars[static_cast<int>(a)];
                    if (!v) throw eval_error(std::string("unbound variable ") + axis_name(a));
                    if (std::abs(v->imag()) > 1e-12)
                        throw eval_error("profile argument for " + e.name() + " is not real");
                    return pit->second->value(v->real(), e.fn_total_order());
                }
                throw eval_error("unbound function value " + key.str());
            }
            case Kind::apply: {
                cplx u = run(e.children()[0]);
                switch (e.builtin()) {
                    case Builtin::sin: return std::sin(u);
                    case Builtin::cos: return std::cos(u);
                    case Builtin::sinh: return std::sinh(u);
                    case Builtin::cosh: return std::cosh(u);
                    case Builtin::exp: return std::exp(u);
                }
                return {};
            }
            case Kind::pow: return int_pow(run(e.children()[0]), e.exponent());
            case Kind::add: {
                cplx s{0.0, 0.0};
                for (const Expr& k : e.children()) s += run(k);
                return s;
            }
            case Kind::mul: {
                cplx p{1.0, 0.0};
                for (const Expr& k : e.children()) p *= run(k);
                return p;
            }
        }
        return {};
    }
};

} // namespace

std::complex<double> eval(const Expr& e, const EvalPoint& pt, bool memoize) {
    if (memoize) {
        std::unordered_map<const detail::Node*, cplx> memo;
        Evaluator ev{pt, &memo};
        return ev.run(e);
    }
    Evaluator ev{pt, nullptr};
    return ev.run(e);
}

ZeroTestResult is_zero(const Expr& e, const ZeroTestConfig& cfg, const EvalPoint* base) {
    if (cfg.trials < 1) throw expr_error("zero test needs trials >= 1");

    SymbolSet syms = collect_symbols(e);
    ZeroTestResult res;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng(derive_seed(cfg.seed, "is_zero", static_cast<uint64_t>(trial)));
        EvalPoint pt = base ? *base : EvalPoint{};

        for (Axis a : kAxes)
            if ((syms.axes & axis_bit(a)) && !pt.vars[static_cast<int>(a)])
                pt.vars[static_cast<int>(a)] = rng.annulus();
        if (syms.has_hbar && !pt.hbar) pt.hbar = rng.positive_real();
        for (const std::string& p : syms.params)
            if (!pt.params.count(p)) pt.params.emplace(p, rng.annulus());
        for (const FnKey& k : syms.fns)
            if (!pt.fn_values.count(k) && !pt.fn_profiles.count(k.name))
                pt.fn_values.emplace(k, rng.annulus());

        std::unordered_map<const detail::Node*, std::complex<double>> memo;
        Evaluator ev{pt, &memo};
        std::complex<double> value;
        double maxterm = 0.0;
        if (e.kind() == Kind::add) {
            std::complex<double> s{0.0, 0.0};
            for (const Expr& t : e.children()) {
                std::complex<double> tv = ev.run(t);
                maxterm = std::max(maxterm, std::abs(tv));
                s += tv;
            }
            value = s;
        } else {
            value = ev.run(e);
            maxterm = std::abs(value);
        }

        double scale = 1.0 + maxterm;
        double normalized = std::abs(value) / scale;
        res.worst = std::max(res.worst, normalized);
        if (!(normalized < cfg.tol)) {
            res.zero = false;
            res.witness = Witness{std::move(pt), value, scale};
            return res;
        }
    }
    return res;
}

} // namespace qintcart
