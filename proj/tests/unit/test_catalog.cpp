#include <doctest.h>

#include "helpers.hpp"
#include "qintcart/catalog.hpp"

using namespace qintcart;
using qintcart::testing::random_expr;

TEST_SUITE_BEGIN("catalog");

TEST_CASE("make_case reproduces the printed entries") {
    SUBCASE("case 2") {
        CaseSpec s = make_case("2");
        CHECK(s.field.A[0] == parse("v1(z)"));
        CHECK(s.field.A[1] == parse("v2(z)"));
        CHECK(s.field.A[2].is_zero_const());
        CHECK(s.field.V == parse("v3(z)"));
        CHECK(s.Q == parse_momentum("p1^2"));
        CHECK(s.P == parse_momentum("p2^2"));
    }
    SUBCASE("case 1") {
        CaseSpec s = make_case("1");
        for (const Expr& a : s.field.A) CHECK(a.is_zero_const());
        CHECK(s.Q == parse_momentum("p1^2 + 2*u1(x)"));
    }
    SUBCASE("case 6.1a with bound scale parameters") {
        CaseSpec s = make_case("6.1a", {{"a1", Expr::integer(1)},
                                        {"a2", Expr::integer(2)},
                                        {"a3", Expr::integer(3)}});
        // f2 slot of the eq-(4) sextuple is u2'(x) with a1=1, a3=3
        CHECK(s.eq4_fns[0] == diff(parse("3*(r1*cosh(x)+k1*sinh(x))"), Axis::x));
        // subcase a eliminated C and C1 entirely
        CHECK(s.params.count("C") == 0);
        CHECK(s.params.count("C1") == 0);
        CHECK_FALSE(s.params.at("r1").has_value()); // still free
        CHECK(s.params.at("a1").has_value());
    }
}

TEST_CASE("make_case rejects bad input") {
    CHECK_THROWS_AS(make_case("7"), catalog_error);
    CHECK_THROWS_AS(make_case("6.5a"), catalog_error);
    // overriding a subcase constraint
    CHECK_THROWS_AS(make_case("6.1b", {{"r1", parse("2*k1")}}), catalog_error);
    CHECK_THROWS_AS(make_case("6.1b", {{"C1", parse("3")}}), catalog_error);
    // a structural re-statement of the constraint is tolerated
    CHECK_NOTHROW(make_case("6.1b", {{"r1", parse("k1")}}));
    // unknown parameter
    CHECK_THROWS_AS(make_case("4", {{"Cx", Expr::integer(1)}}), catalog_error);
}

TEST_CASE("catalog enumerations") {
    CHECK(catalog_ids().size() == 23);
    CHECK(all_case_ids().size() == 25);
    for (const std::string& id : all_case_ids()) CHECK_NOTHROW(make_case(id));
}

TEST_CASE("curl") {
    CHECK(curl(make_case("3").field.A) ==
          std::array<Expr, 3>{parse("g'(y)"), parse("-f'(x)"), Expr()});
    CHECK(curl(make_case("4").field.A) ==
          std::array<Expr, 3>{Expr(), Expr(), parse("f''(x)-g''(y)")});
    CHECK(curl(make_case("1").field.A) == std::array<Expr, 3>{Expr(), Expr(), Expr()});
}

TEST_CASE("gauge transformations") {
    CaseSpec s = make_case("3");

    SUBCASE("constant F is the identity") {
        EMField g = gauge_transform(s.field, Expr::integer(5));
        for (int j = 0; j < 3; ++j) CHECK(g.A[j] == s.field.A[j]);
        CHECK(g.V == s.field.V);
    }

    SUBCASE("the general pre-gauge A reduces to the normalized form") {
        // 4A1 = s_x + k1_x + g1(y) + r1(z), etc., with the gauge
        // F = -(s + k1 + k2 + r3)/4 removing the gradient part
        Expr S = parse("s(x,y,z)"), K1 = parse("k1(x,z)"), K2 = parse("k2(y,z)");
        EMField pre;
        pre.V = Expr();
        pre.A[0] = (diff(S, Axis::x) + diff(K1, Axis::x) + parse("g1(y)") + parse("r1(z)")) /
                   Expr::integer(4);
        pre.A[1] = (diff(S, Axis::y) + diff(K2, Axis::y) + parse("f2(x)") + parse("r2(z)")) /
                   Expr::integer(4);
        pre.A[2] = (diff(S, Axis::z) + diff(K1, Axis::z) + diff(K2, Axis::z) + parse("f3(x)") +
                    parse("g3(y)") + parse("r3'(z)")) /
                   Expr::integer(4);
        Expr F = Expr::rational(-1, 4) * (S + K1 + K2 + parse("r3(z)"));
        EMField fixed = gauge_transform(pre, F);
        CHECK(fixed.A[0] == parse("(g1(y)+r1(z))/4"));
        CHECK(fixed.A[1] == parse("(f2(x)+r2(z))/4"));
        CHECK(fixed.A[2] == parse("(f3(x)+g3(y))/4"));
    }

    SUBCASE("curl is gauge invariant for random F") {
        Rng rng(303);
        auto before = curl(s.field.A);
        int done = 0;
        for (int k = 0; done < 10 && k < 100; ++k) {
            Expr F = random_expr(rng, 3);
            if (to_string(F).find("^(-") != std::string::npos) continue;
            ++done;
            auto after = curl(gauge_transform(s.field, F).A);
            for (int j = 0; j < 3; ++j) {
                ZeroTestConfig cfg;
                cfg.trials = 5;
                cfg.seed = derive_seed(7, "gauge", 3 * k + j);
                CHECK(is_zero(after[j] - before[j], cfg).zero);
            }
        }
        CHECK(done == 10);
    }
}

TEST_CASE("verify_case accepts the printed entries") {
    auto rep3 = verify_case(make_case("3"), 20, 1e-9, 42);
    CHECK(rep3.pass);
    CHECK(rep3.eq4_pass);
    CHECK(rep3.curl_pass);

    auto rep62 = verify_case(make_case("6.2c"), 20, 1e-9, 42);
    CHECK(rep62.pass);
    CHECK(rep62.complex_field); // r1 = i k1 injects i into the potentials

    CHECK_FALSE(verify_case(make_case("1"), 20, 1e-9, 42).complex_field);
}

TEST_CASE("verify_case flags tampered entries with a witness") {
    CaseSpec bad = perturb_case(make_case("2"), "V", "x");
    auto rep = verify_case(bad, 20, 1e-9, 11);
    CHECK_FALSE(rep.pass);
    bool witnessed = false;
    for (const auto& cr : rep.commutators) witnessed = witnessed || cr.witness.has_value();
    CHECK(witnessed);
}

TEST_CASE("case 5 at C=0 reduces to case 4 with r dropped") {
    CaseSpec c5 = make_case("5", {{"C", Expr::integer(0)}});
    CaseSpec c4 = make_case("4");
    Expr V4_no_r = substitute_functions(c4.field.V, {{"r", Expr::integer(0)}});
    CHECK(c5.field.V == V4_no_r);
    for (int j = 0; j < 3; ++j) CHECK(c5.field.A[j] == c4.field.A[j]);
    CHECK(verify_case(c5, 10, 1e-9, 21).pass);
}

TEST_CASE("case JSON round trip") {
    for (const char* id : {"2", "4", "6.2c"}) {
        CaseSpec s = make_case(id);
        CaseSpec back = case_from_json(case_to_json(s));
        CHECK(back.id == s.id);
        CHECK(back.field.V == s.field.V);
        for (int j = 0; j < 3; ++j) CHECK(back.field.A[j] == s.field.A[j]);
        CHECK(back.Q == s.Q);
        CHECK(back.P == s.P);
        REQUIRE(back.rules.size() == s.rules.size());
        for (size_t k = 0; k < s.rules.size(); ++k) {
            CHECK(back.rules[k].fn == s.rules[k].fn);
            CHECK(back.rules[k].replacement == s.rules[k].replacement);
        }
        CHECK(back.params == s.params);
        for (int j = 0; j < 6; ++j) CHECK(back.eq4_fns[j] == s.eq4_fns[j]);
    }
}

TEST_CASE("hamiltonian operator layout") {
    DiffOp h = hamiltonian_op(make_case("2").field);
    CHECK(h.coefficient({2, 0, 0}) == parse("-1/2*hbar^2"));
    CHECK(h.coefficient({1, 0, 0}) == parse("-2*i*hbar*v1(z)"));
    CHECK(h.coefficient({0, 1, 0}) == parse("-2*i*hbar*v2(z)"));
    // A depends only on z and A3 = 0, so no divergence term survives
    CHECK(h.coefficient({0, 0, 0}) == parse("v3(z)"));
}

TEST_SUITE_END();
