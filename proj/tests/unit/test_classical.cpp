#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qintcart/classical.hpp"

using namespace qintcart;

TEST_SUITE_BEGIN("classical");

TEST_CASE("classicalize") {
    Expr H2 = classicalize(hamiltonian_op(make_case("2").field));
    CHECK(H2 == parse("1/2*(p1^2+p2^2+p3^2) + 2*v1(z)*p1 + 2*v2(z)*p2 + v3(z)"));

    MomentumPolynomial p1sq(MomentumOrdering::left);
    p1sq.set({2, 0, 0}, Expr::integer(1));
    CHECK(classicalize(p1sq) == parse("p1^2"));

    CHECK(classicalize(make_case("3").Q) == parse("p1^2 + 4*f(x)*p3 + 2*u1(x)"));

    SUBCASE("order above 2 is rejected") {
        DiffOp third;
        third.set({3, 0, 0}, Expr::integer(1));
        CHECK_THROWS_AS(classicalize(third), expr_error);
    }
}

TEST_CASE("poisson brackets") {
    CHECK(poisson(parse("x"), parse("p1")).is_one_const());
    CHECK(poisson(parse("p1^2"), parse("p2^2")).is_zero_const());
    CHECK(poisson(parse("x*p2"), parse("p1")) == parse("p2"));

    SUBCASE("case 4 brackets vanish modulo the ODE rules") {
        CaseSpec c4 = make_case("4");
        Expr H = reduce(classicalize(hamiltonian_op(c4.field)), c4.rules);
        Expr Q = reduce(classicalize(c4.Q), c4.rules);
        Expr P = reduce(classicalize(c4.P), c4.rules);
        ZeroTestConfig cfg;
        cfg.seed = 12;
        CHECK(is_zero(reduce(poisson(Q, P), c4.rules), cfg).zero);
        CHECK(is_zero(reduce(poisson(H, Q), c4.rules), cfg).zero);
        CHECK(is_zero(reduce(poisson(H, P), c4.rules), cfg).zero);
    }
}

namespace {

ClassicalSystem oscillator() {
    ProfileBindings pb;
    pb.closed.emplace("u1", parse("x^2"));
    pb.closed.emplace("u2", parse("y^2"));
    pb.closed.emplace("u3", parse("z^2"));
    return make_classical_system(make_case("1"), pb);
}

const PhaseState kState{{0.3, -0.2, 0.5}, {0.7, 0.1, -0.4}};

} // namespace

TEST_CASE("trajectory conservation") {
    SUBCASE("anisotropic oscillator stays conserved") {
        TrajectoryLog log = integrate_trajectory(oscillator(), kState, 100.0, 1e-10);
        CHECK_FALSE(log.blew_up);
        CHECK(log.t.size() >= 1000);
        CHECK(log.max_drift() < 1e-8);
    }

    SUBCASE("free particle momenta are exact") {
        ProfileBindings pb;
        pb.closed.emplace("u1", Expr());
        pb.closed.emplace("u2", Expr());
        pb.closed.emplace("u3", Expr());
        TrajectoryLog log =
            integrate_trajectory(make_classical_system(make_case("1"), pb), kState, 50.0, 1e-10);
        CHECK(log.max_drift() < 1e-14);
        // p columns are constant to machine precision
        for (const auto& s : log.states) {
            CHECK(s[3] == doctest::Approx(kState.p[0]).epsilon(1e-15));
            CHECK(s[4] == doctest::Approx(kState.p[1]).epsilon(1e-15));
        }
    }

    SUBCASE("case 3 magnetic integrals are conserved") {
        ProfileBindings pb;
        pb.closed.emplace("f", parse("x^2"));
        pb.closed.emplace("g", parse("y^2"));
        pb.closed.emplace("u1", Expr());
        pb.closed.emplace("u2", Expr());
        // p3 > 0 keeps the effective transverse potential confining
        PhaseState s0{{0.3, -0.2, 0.5}, {0.7, 0.1, 0.4}};
        TrajectoryLog log =
            integrate_trajectory(make_classical_system(make_case("3"), pb), s0, 100.0, 1e-10);
        CHECK_FALSE(log.blew_up);
        CHECK(log.max_drift() < 1e-6);
    }

    SUBCASE("unbounded potential reports blow-up") {
        ProfileBindings pb;
        pb.closed.emplace("u1", parse("-x^4"));
        pb.closed.emplace("u2", Expr());
        pb.closed.emplace("u3", Expr());
        PhaseState hot;
        hot.p = {2.0, 0.0, 0.0};
        TrajectoryLog log =
            integrate_trajectory(make_classical_system(make_case("1"), pb), hot, 50.0, 1e-10);
        CHECK(log.blew_up);
        CHECK(log.blowup_time > 0.0);
        CHECK(log.blowup_time < 50.0);
    }

    SUBCASE("drift does not grow when rtol tightens") {
        double last = 1e9;
        for (double rtol : {1e-6, 1e-8, 1e-10}) {
            TrajectoryLog log = integrate_trajectory(oscillator(), kState, 100.0, rtol, 256);
            CHECK(log.max_drift() <= last);
            last = log.max_drift();
        }
    }
}

TEST_CASE("csv layout") {
    TrajectoryLog log = integrate_trajectory(oscillator(), kState, 1.0, 1e-8, 16);
    std::string csv = log.csv();
    CHECK(csv.rfind("t,x,y,z,p1,p2,p3,H,Q,P\n", 0) == 0);
    size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 17); // header + 16 samples
}

TEST_CASE("profile ODE integration") {
    SUBCASE("harmonic: C=0, C1=-1 reproduces cos") {
        auto pr = integrate_profile(0, -1, 0, 1, 0, 0, 10, 1e-12);
        double worst = 0.0;
        for (double x = 0; x <= 10.0; x += 0.1)
            worst = std::max(worst, std::abs(pr->value(x, 0).real() - std::cos(x)));
        CHECK(worst < 1e-9);
        CHECK(pr->first_integral_drift < 1e-9);
        CHECK(std::abs(pr->value(1.3, 1).real() + std::sin(1.3)) < 1e-9);
    }
    SUBCASE("pure quadrature: C=C1=0, C4=2 gives x^2 + f0p x + f0") {
        auto pr = integrate_profile(0, 0, 2, 1, 0.5, -5, 5, 1e-12);
        for (double x = -5; x <= 5.0; x += 0.37)
            CHECK(std::abs(pr->value(x, 0).real() - (x * x + 0.5 * x + 1)) < 1e-9);
    }
    SUBCASE("movable pole: C=1 blows up in finite range") {
        auto pr = integrate_profile(1, 0, 0, 1, 0, -20, 20, 1e-12);
        CHECK(pr->blowup_pos);
        CHECK(pr->reach_hi < 20.0);
        CHECK(pr->first_integral_drift < 1e-9);
        CHECK_THROWS_AS(pr->value(pr->reach_hi + 1.0, 0), eval_error);
    }
    SUBCASE("derivative orders above 3 are refused") {
        auto pr = integrate_profile(0, -1, 0, 1, 0, 0, 1, 1e-10);
        CHECK_THROWS_AS(pr->value(0.5, 4), eval_error);
    }
    SUBCASE("range must contain the initial point") {
        CHECK_THROWS_AS(integrate_profile(0, -1, 0, 1, 0, 1, 2, 1e-10), expr_error);
    }
}

TEST_CASE("trajectory through a numeric profile stays conserved") {
    // case 4 with bounded cosine-type profiles and a harmonic r(z)
    CaseSpec c4 = make_case("4");
    ProfileBindings pb;
    pb.params = {{"C", 0.0}, {"C1", -1.0}, {"C2", -1.0}, {"C3", 0.25},
                 {"C4", 0.0}, {"C5", 0.0}};
    pb.numeric.emplace("f", integrate_profile(0, -1, 0, 0.4, 0, -30, 30, 1e-12));
    pb.numeric.emplace("g", integrate_profile(0, -1, 0, 0.3, 0, -30, 30, 1e-12));
    pb.closed.emplace("r", parse("-z^2"));
    ClassicalSystem sys = make_classical_system(c4, pb);
    PhaseState s0;
    s0.q = {0.2, 0.1, 0.1};
    s0.p = {0.15, -0.1, 0.2};
    TrajectoryLog log = integrate_trajectory(sys, s0, 100.0, 1e-10);
    CHECK_FALSE(log.blew_up);
    CHECK(log.max_drift() < 1e-6);
}

TEST_CASE("independence rank") {
    std::vector<Expr> obs{parse("p1^2"), parse("p2^2"), parse("1/2*(p1^2+p2^2+p3^2)")};
    EvalPoint none;
    PhaseState generic{{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
    CHECK(independence_rank(obs, generic, none) == 3);

    PhaseState degenerate = generic;
    degenerate.p[2] = 0.0;
    CHECK(independence_rank(obs, degenerate, none) == 2);

    Expr H2 = classicalize(hamiltonian_op(make_case("2").field));
    CHECK(independence_rank_seeded({H2, H2, H2}, generic, 5) == 1);

    SUBCASE("case 2 triple has full rank at random states") {
        Expr Q2 = classicalize(make_case("2").Q);
        Expr P2 = classicalize(make_case("2").P);
        Rng rng(606);
        int full = 0;
        for (int k = 0; k < 10; ++k) {
            PhaseState s;
            for (int j = 0; j < 3; ++j) {
                s.q[j] = rng.uniform(-1.5, 1.5);
                s.p[j] = rng.uniform(-1.5, 1.5);
            }
            if (independence_rank_seeded({H2, Q2, P2}, s, 700 + k) == 3) ++full;
        }
        CHECK(full >= 9);
    }
}

TEST_SUITE_END();
