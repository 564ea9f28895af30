#include <doctest.h>

#include "helpers.hpp"
#include "qintcart/diffop.hpp"

using namespace qintcart;
using qintcart::testing::random_polynomial;

namespace {

Expr small_poly(Rng& rng) { return random_polynomial(rng, 2); }

DiffOp random_first_order_op(Rng& rng) {
    DiffOp o;
    o.set({0, 0, 0}, small_poly(rng));
    o.set(unit_index(static_cast<Axis>(rng.next() % 3)), small_poly(rng));
    return o;
}

bool op_zero_tests(const DiffOp& o, uint64_t seed, double tol = 1e-9) {
    uint64_t k = 0;
    for (const auto& [idx, c] : o.terms()) {
        ZeroTestConfig cfg;
        cfg.trials = 4;
        cfg.tol = tol;
        cfg.seed = derive_seed(seed, "op", k++);
        if (!is_zero(c, cfg).zero) return false;
    }
    return true;
}

} // namespace

TEST_SUITE_BEGIN("diffop");

TEST_CASE("from_momentum substitutes p = -i*hbar*d and normal-orders") {
    MomentumPolynomial half_p2(MomentumOrdering::left);
    for (Axis a : kAxes) {
        MultiIndex m{0, 0, 0};
        m[static_cast<int>(a)] = 2;
        half_p2.set(m, Expr::rational(1, 2));
    }
    DiffOp kin = from_momentum(half_p2);
    Expr expect = parse("-1/2*hbar^2");
    for (Axis a : kAxes) {
        MultiIndex m{0, 0, 0};
        m[static_cast<int>(a)] = 2;
        CHECK(kin.coefficient(m) == expect);
    }

    SUBCASE("Weyl pair with coefficient depending on another axis") {
        MomentumPolynomial mp(MomentumOrdering::symmetrized);
        mp.set({1, 0, 0}, parse("g'(y)"));
        DiffOp o = from_momentum(mp);
        CHECK(o.coefficient({1, 0, 0}) == parse("-2*i*hbar*g'(y)"));
        CHECK(o.coefficient({0, 0, 0}).is_zero_const());
    }
    SUBCASE("Weyl pair picks up the divergence term") {
        MomentumPolynomial mp(MomentumOrdering::symmetrized);
        mp.set({0, 0, 1}, parse("f(x)+g(z)"));
        DiffOp o = from_momentum(mp);
        CHECK(o.coefficient({0, 0, 1}) == parse("-2*i*hbar*(f(x)+g(z))"));
        CHECK(o.coefficient({0, 0, 0}) == parse("-i*hbar*g'(z)"));
    }
}

TEST_CASE("compose is the Leibniz product") {
    DiffOp d1 = DiffOp::partial(Axis::x);
    DiffOp xop = DiffOp::identity(Expr::var(Axis::x));
    DiffOp r = compose(d1, xop);
    CHECK(r.coefficient({0, 0, 0}).is_one_const());
    CHECK(r.coefficient({1, 0, 0}) == Expr::var(Axis::x));

    DiffOp d11;
    d11.set({2, 0, 0}, Expr::integer(1));
    DiffOp f = DiffOp::identity(parse("f(x)"));
    DiffOp r2 = compose(d11, f);
    CHECK(r2.coefficient({0, 0, 0}) == parse("f''(x)"));
    CHECK(r2.coefficient({1, 0, 0}) == parse("2*f'(x)"));
    CHECK(r2.coefficient({2, 0, 0}) == parse("f(x)"));

    SUBCASE("order overflow is rejected") {
        DiffOp big;
        big.set({2, 2, 0}, Expr::integer(1));
        CHECK_THROWS_AS(compose(big, d11), diffop_error);
    }
}

TEST_CASE("canonical commutators") {
    DiffOp p1 = DiffOp::momentum(Axis::x);
    DiffOp xop = DiffOp::identity(Expr::var(Axis::x));
    DiffOp c = commutator(p1, xop);
    CHECK(c.coefficient({0, 0, 0}) == parse("-i*hbar"));
    CHECK(c.terms().size() == 1);

    MomentumPolynomial q, p;
    q.set({2, 0, 0}, Expr::integer(1));
    p.set({0, 2, 0}, Expr::integer(1));
    CHECK(commutator(from_momentum(q), from_momentum(p)).empty());
}

TEST_CASE("[M3, p1] agrees with the direct epsilon-rule expansion") {
    // M3 = x p2 - y p1, written out by hand
    DiffOp m3 = sub(scale(DiffOp::momentum(Axis::y), Expr::var(Axis::x)),
                    scale(DiffOp::momentum(Axis::x), Expr::var(Axis::y)));
    DiffOp c = commutator(m3, DiffOp::momentum(Axis::x));
    // expected i*hbar*p2 as a normal-ordered operator
    DiffOp expect = scale(DiffOp::momentum(Axis::y), parse("i*hbar"));
    CHECK(sub(c, expect).empty());
}

TEST_CASE("split_by_order groups and reconstructs") {
    SUBCASE("zero operator") { CHECK(split_by_order(DiffOp()).empty()); }

    SUBCASE("variable quadratic coefficient produces an order-3 commutator") {
        // [1/2 p^2, x p1^2] = -i hbar p1^3, so the split has exactly one
        // order-3 entry with coefficient hbar^4 at d^(3,0,0)
        MomentumPolynomial hmp(MomentumOrdering::left);
        for (Axis a : kAxes) {
            MultiIndex m{0, 0, 0};
            m[static_cast<int>(a)] = 2;
            hmp.set(m, Expr::rational(1, 2));
        }
        MomentumPolynomial qmp(MomentumOrdering::left);
        qmp.set({2, 0, 0}, Expr::var(Axis::x));
        auto groups = split_by_order(commutator(from_momentum(hmp), from_momentum(qmp)));
        REQUIRE(groups.count(3) == 1);
        REQUIRE(groups[3].size() == 1);
        CHECK(groups[3][0].first == MultiIndex{3, 0, 0});
        CHECK(groups[3][0].second == parse("hbar^4"));
    }

    SUBCASE("second-order integral splits into orders 0,1,2") {
        DiffOp q = from_momentum(parse_momentum("p1^2+4*f(x)*p3+2*u1(x)"));
        auto groups = split_by_order(q);
        CHECK(groups.count(0) == 1);
        CHECK(groups.count(1) == 1);
        CHECK(groups.count(2) == 1);
        CHECK(groups.count(3) == 0);
        size_t total = 0;
        for (const auto& [order, entries] : groups) total += entries.size();
        CHECK(total == q.terms().size());
    }
}

TEST_CASE("build_bilinear") {
    std::array<std::array<Expr, 3>, 3> zero{};
    for (auto& row : zero)
        for (auto& e : row) e = Expr::integer(0);
    std::array<Expr, 3> fzero{Expr::integer(0), Expr::integer(0), Expr::integer(0)};

    SUBCASE("c = diag(1,0,0) gives p1^2") {
        auto c = zero;
        c[0][0] = Expr::integer(1);
        DiffOp q = build_bilinear(zero, zero, c, fzero, Expr::integer(0));
        CHECK(q.terms().size() == 1);
        CHECK(q.coefficient({2, 0, 0}) == parse("-hbar^2"));
    }

    SUBCASE("a = diag(0,0,1) gives M3^2, checked against manual expansion") {
        auto a = zero;
        a[2][2] = Expr::integer(1);
        DiffOp got = build_bilinear(a, zero, zero, fzero, Expr::integer(0));
        // (x p2 - y p1)^2 = x^2 p2^2 + y^2 p1^2 - 2xy p1 p2 + i hbar x p1 + i hbar y p2
        DiffOp expect = from_momentum(
            parse_momentum("x^2*p2^2 + y^2*p1^2 - 2*x*y*p1*p2 + i*hbar*x*p1 + i*hbar*y*p2"));
        CHECK(sub(got, expect).empty());
    }

    SUBCASE("all zero") {
        CHECK(build_bilinear(zero, zero, zero, fzero, Expr::integer(0)).empty());
    }

    SUBCASE("asymmetric a is rejected") {
        auto a = zero;
        a[0][1] = Expr::integer(1);
        CHECK_THROWS_AS(build_bilinear(a, zero, zero, fzero, Expr::integer(0)), diffop_error);
    }
}

TEST_CASE("momentum polynomial printing and parsing round trip") {
    auto mp = parse_momentum("p1^2 + 4*f'(x)*p2 - 2*(4*g(y)*f''(x)+2*C2*f(x)^2+C3*f(x))");
    CHECK(to_momentum(from_momentum(mp)) == mp);
    CHECK(parse_momentum(print_momentum(mp)) == mp);

    CHECK_THROWS_AS(parse_momentum("sin(p1)"), diffop_error);
    CHECK_THROWS_AS(parse_momentum("p1^(-1)"), diffop_error);
    CHECK(parse_momentum("(p1+x)^2").coefficient({2, 0, 0}).is_one_const());
}

TEST_CASE("algebra laws on random first-order operators") {
    Rng rng(4242);
    for (int k = 0; k < 30; ++k) {
        DiffOp a = random_first_order_op(rng);
        DiffOp b = random_first_order_op(rng);
        DiffOp c = random_first_order_op(rng);

        CHECK(op_zero_tests(sub(compose(compose(a, b), c), compose(a, compose(b, c))),
                            derive_seed(1, "assoc", k)));

        DiffOp jacobi = add(add(commutator(a, commutator(b, c)), commutator(b, commutator(c, a))),
                            commutator(c, commutator(a, b)));
        CHECK(op_zero_tests(jacobi, derive_seed(1, "jacobi", k)));

        CHECK(add(commutator(a, b), commutator(b, a)).empty());
    }
}

TEST_CASE("application oracle: compose against term-by-term differentiation") {
    Rng rng(8888);
    for (int k = 0; k < 30; ++k) {
        DiffOp a = random_first_order_op(rng);
        DiffOp b = random_first_order_op(rng);
        Expr phi = random_polynomial(rng, 4);
        Expr via_compose = apply_op(compose(a, b), phi);
        Expr via_nested = apply_op(a, apply_op(b, phi));
        ZeroTestConfig cfg;
        cfg.trials = 5;
        cfg.tol = 1e-10;
        cfg.seed = derive_seed(2, "oracle", k);
        CHECK(is_zero(via_compose - via_nested, cfg).zero);
    }
}

TEST_CASE("zero-pruned commutator drops vanishing coefficients") {
    // the coefficient cosh^2 - sinh^2 - 1 hides a zero that is not structural
    DiffOp a;
    a.set({1, 0, 0}, parse("cosh(z)^2 - sinh(z)^2 - 1"));
    DiffOp b = DiffOp::identity(Expr::var(Axis::x));
    CHECK_FALSE(commutator(a, b).empty()); // structural pruning alone keeps it
    ZeroTestConfig prune;
    prune.seed = 5;
    CHECK(commutator(a, b, prune).empty());
}

TEST_SUITE_END();
