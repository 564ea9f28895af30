#pragma once

#include <complex>
#include <map>
#include <vector>

#include "qintcart/expr.hpp"
#include "qintcart/parse.hpp"
#include "qintcart/rng.hpp"

namespace qintcart::testing {

// Random canonical expression over x,y,z, params a..c, i, hbar and small
// univariate abstract functions; used for round-trip and property corpora.
inline Expr random_expr(Rng& rng, int depth) {
    if (depth <= 0 || rng.uniform() < 0.35) {
        switch (rng.next() % 8) {
            case 0: return Expr::integer(static_cast<long long>(rng.next() % 19) - 9);
            case 1: return Expr::rational(static_cast<long long>(rng.next() % 13) - 6,
                                          1 + static_cast<long long>(rng.next() % 7));
            case 2: return Expr::real(rng.uniform(-4.0, 4.0));
            case 3: return Expr::param(std::string(1, static_cast<char>('a' + rng.next() % 3)));
            case 4: return Expr::var(static_cast<Axis>(rng.next() % 3));
            case 5: return Expr::imaginary();
            case 6: return Expr::hbar();
            default: {
                Axis v = static_cast<Axis>(rng.next() % 3);
                return Expr::fn(rng.next() % 2 ? "f" : "g", v, static_cast<int>(rng.next() % 3));
            }
        }
    }
    switch (rng.next() % 4) {
        case 0: {
            std::vector<Expr> kids;
            int n = 2 + static_cast<int>(rng.next() % 3);
            for (int k = 0; k < n; ++k) kids.push_back(random_expr(rng, depth - 1));
            return Expr::add(std::move(kids));
        }
        case 1: {
            std::vector<Expr> kids;
            int n = 2 + static_cast<int>(rng.next() % 2);
            for (int k = 0; k < n; ++k) kids.push_back(random_expr(rng, depth - 1));
            return Expr::mul(std::move(kids));
        }
        case 2: {
            long long e = 2 + static_cast<long long>(rng.next() % 2);
            Expr base = random_expr(rng, depth - 1);
            if (base.is_zero_const()) base = Expr::var(Axis::x);
            return Expr::pow(base, rng.next() % 4 ? e : -e);
        }
        default:
            return Expr::apply(static_cast<Builtin>(rng.next() % 5), random_expr(rng, depth - 1));
    }
}

// Random nonzero integer polynomial in x,y,z of total degree <= max_degree
// with |coefficients| <= 100, built from distinct monomials.
inline Expr random_polynomial(Rng& rng, int max_degree = 12) {
    std::map<std::array<int, 3>, long long> monomials;
    int count = 1 + static_cast<int>(rng.next() % 6);
    for (int k = 0; k < count; ++k) {
        int ex = static_cast<int>(rng.next() % (max_degree + 1));
        int ey = static_cast<int>(rng.next() % (max_degree + 1 - ex));
        int ez = static_cast<int>(rng.next() % (max_degree + 1 - ex - ey));
        long long c = static_cast<long long>(rng.next() % 200) - 100;
        if (c == 0) c = 7;
        monomials[{ex, ey, ez}] = c;
    }
    std::vector<Expr> terms;
    for (const auto& [e, c] : monomials) {
        terms.push_back(Expr::mul({Expr::integer(c), Expr::pow(Expr::var(Axis::x), e[0]),
                                   Expr::pow(Expr::var(Axis::y), e[1]),
                                   Expr::pow(Expr::var(Axis::z), e[2])}));
    }
    return Expr::add(std::move(terms));
}

} // namespace qintcart::testing
