// Acceptance suite: every criterion prints one PASS/FAIL line; the exit code
// is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <future>
#include <vector>

#include "qintcart/classical.hpp"
#include "qintcart/determining.hpp"
#include "qintcart/parse.hpp"
#include "qintcart/rng.hpp"

using namespace qintcart;

namespace {

constexpr uint64_t kSeed = 20240817;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

// ---- criterion 1: commutation suite -------------------------------------------

Outcome commutation_suite() {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<std::future<std::string>> jobs;
    for (const std::string& id : catalog_ids()) {
        jobs.push_back(std::async(std::launch::async, [id]() -> std::string {
            CaseSpec spec = make_case(id);
            for (int sample = 0; sample < 5; ++sample) {
                uint64_t seed = derive_seed(kSeed, id, static_cast<uint64_t>(sample));
                VerificationReport rep = verify_case(spec, 20, 1e-9, seed);
                for (const CommutatorReport& cr : rep.commutators)
                    if (!cr.pass)
                        return "case " + id + " sample " + std::to_string(sample) + " [" +
                               cr.name + "] worst " + std::to_string(cr.worst);
            }
            return "";
        }));
    }
    for (auto& j : jobs) {
        std::string err = j.get();
        if (!err.empty()) out.fail(err);
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "23 cases x 5 samples x 3 commutators in %.1f s", secs);
    out.detail = out.detail.empty() ? buf : out.detail;
    if (secs >= 300.0) out.fail("runtime exceeded 5 minutes");
    return out;
}

// ---- criterion 2: negative controls ---------------------------------------------

Outcome negative_controls() {
    struct Tamper {
        const char *id, *target, *delta;
    };
    const Tamper tampers[10] = {
        {"1", "V", "x*y"},      {"2", "V", "x"},        {"3", "Q", "x^2*p3"},
        {"3", "V", "x*y"},      {"4", "A1", "y^2"},     {"5", "P", "y*p3"},
        {"6.1b", "V", "x"},     {"6.2c", "A3", "z"},    {"6.3e", "Q", "y*p1"},
        {"6.4d", "A2", "x*z"},
    };
    Outcome out;
    for (const Tamper& t : tampers) {
        CaseSpec spec = perturb_case(make_case(t.id), t.target, t.delta);
        VerificationReport rep = verify_case(spec, 20, 1e-9, derive_seed(kSeed, spec.id));
        bool commutators_fail = false, witnessed = false;
        for (const CommutatorReport& cr : rep.commutators) {
            commutators_fail = commutators_fail || !cr.pass;
            witnessed = witnessed || cr.witness.has_value();
        }
        if (!commutators_fail)
            out.fail(std::string("false pass: ") + t.id + " " + t.target + "+" + t.delta);
        else if (!witnessed)
            out.fail(std::string("no witness: ") + t.id);
    }
    if (out.pass) out.detail = "10 tampered specs all fail with witnesses";
    return out;
}

// ---- criterion 3: magnetic-field table ------------------------------------------

Outcome magnetic_field_table() {
    Outcome out;
    int checked = 0;
    for (const std::string& id : catalog_ids()) {
        if (id == "1") continue; // cases 2..6 carry a field table
        CaseSpec spec = make_case(id);
        auto rot = curl(spec.field.A);
        for (int j = 0; j < 3; ++j) {
            Expr r = reduce(rot[j] - spec.omega[j], spec.rules);
            ZeroTestConfig cfg{20, 1e-10, derive_seed(kSeed, "curl-" + id, j)};
            if (!is_zero(r, cfg).zero) out.fail("curl mismatch in case " + id);
            ++checked;
        }
    }
    if (out.pass)
        out.detail = std::to_string(checked) + " components match at tol 1e-10";
    return out;
}

// ---- criterion 4: determining-system regeneration --------------------------------

Outcome determining_regeneration() {
    Outcome out;
    ResidualSystem sys = generate(CartesianAnsatz::general());

    std::vector<std::future<std::string>> jobs;
    for (const std::string& id : catalog_ids()) {
        jobs.push_back(std::async(std::launch::async, [&sys, id]() -> std::string {
            CaseSpec spec = make_case(id);
            std::vector<Expr> reduced = substitute_case(sys, spec);
            for (size_t k = 0; k < reduced.size(); ++k) {
                ZeroTestConfig cfg{20, 1e-9, derive_seed(kSeed, "det-" + id, k)};
                if (!is_zero(reduced[k], cfg).zero)
                    return "case " + id + " leaves a nonzero residual";
            }
            return "";
        }));
    }
    for (auto& j : jobs) {
        std::string err = j.get();
        if (!err.empty()) out.fail(err);
    }
    if (!check_A_general_solution()) out.fail("general solution for A rejected");
    if (out.pass)
        out.detail = std::to_string(sys.rows.size()) +
                     " residual rows annihilated by all 23 cases; general A solution holds";
    return out;
}

// ---- criterion 5: eq-(4) suite ---------------------------------------------------

Outcome eq4_suite() {
    Outcome out;
    for (const std::string& id : catalog_ids()) {
        CaseSpec spec = make_case(id);
        uint64_t k = 0;
        for (const Expr& r : spec.constraint_residuals) {
            ZeroTestConfig cfg{20, 1e-9, derive_seed(kSeed, "eq4-" + id, k++)};
            if (!is_zero(reduce(r, spec.rules), cfg).zero)
                out.fail("eq4 residual nonzero in case " + id);
        }
    }
    if (out.pass) out.detail = "3 residuals vanish for every case's sextuple";
    return out;
}

// ---- criterion 6: permutation equivalence ----------------------------------------

Outcome permutation_equivalence() {
    Outcome out;
    std::vector<std::future<std::string>> jobs;
    for (const std::string& id : catalog_ids()) {
        jobs.push_back(std::async(std::launch::async, [id]() -> std::string {
            CaseSpec spec = make_case(id);
            for (int col = 1; col <= 6; ++col) {
                CaseSpec p = permute(spec, col);
                VerificationReport rep =
                    verify_case(p, 20, 1e-9, derive_seed(kSeed, p.id, col));
                if (!rep.pass)
                    return "case " + id + " fails under permutation column " +
                           std::to_string(col);
            }
            return "";
        }));
    }
    for (auto& j : jobs) {
        std::string err = j.get();
        if (!err.empty()) out.fail(err);
    }
    if (out.pass) out.detail = "23 cases x 6 columns all verify";
    return out;
}

// ---- criterion 7: classical suite ------------------------------------------------

Outcome classical_suite() {
    Outcome out;

    // symbolic Poisson brackets for every case
    for (const std::string& id : catalog_ids()) {
        CaseSpec spec = make_case(id);
        Expr H = reduce(classicalize(hamiltonian_op(spec.field)), spec.rules);
        Expr Q = reduce(classicalize(spec.Q), spec.rules);
        Expr P = reduce(classicalize(spec.P), spec.rules);
        const Expr* obs[3][2] = {{&H, &Q}, {&H, &P}, {&Q, &P}};
        for (int k = 0; k < 3; ++k) {
            Expr bracket = reduce(poisson(*obs[k][0], *obs[k][1]), spec.rules);
            ZeroTestConfig cfg{20, 1e-9, derive_seed(kSeed, "pb-" + id, k)};
            if (!is_zero(bracket, cfg).zero)
                out.fail("Poisson bracket nonzero in case " + id);
        }
    }

    // trajectory drift for cases 1..4 with concrete profiles
    auto run = [&out](const char* id, const ProfileBindings& pb, const PhaseState& s0) {
        TrajectoryLog log =
            integrate_trajectory(make_classical_system(make_case(id), pb), s0, 100.0, 1e-10);
        if (log.blew_up) out.fail(std::string("trajectory blow-up in case ") + id);
        else if (!(log.max_drift() < 1e-6))
            out.fail(std::string("drift ") + std::to_string(log.max_drift()) + " in case " + id);
    };

    PhaseState s0{{0.3, -0.2, 0.5}, {0.7, 0.1, -0.4}};
    {
        ProfileBindings pb;
        pb.closed = {{"u1", parse("x^2")}, {"u2", parse("y^2")}, {"u3", parse("z^2")}};
        run("1", pb, s0);
    }
    {
        ProfileBindings pb;
        pb.closed = {{"v1", parse("sin(z)")}, {"v2", parse("cos(z)")}, {"v3", parse("z^2")}};
        run("2", pb, s0);
    }
    {
        ProfileBindings pb;
        pb.closed = {{"f", parse("x^2")}, {"g", parse("y^2")},
                     {"u1", Expr()}, {"u2", Expr()}};
        // p3 > 0 keeps the effective transverse potential confining
        PhaseState s3 = s0;
        s3.p[2] = 0.4;
        run("3", pb, s3);
    }
    {
        ProfileBindings pb;
        pb.params = {{"C", 0.0}, {"C1", -1.0}, {"C2", -1.0}, {"C3", 0.25},
                     {"C4", 0.0}, {"C5", 0.0}};
        auto f = integrate_profile(0, -1, 0, 0.4, 0, -30, 30, 1e-12);
        auto g = integrate_profile(0, -1, 0, 0.3, 0, -30, 30, 1e-12);
        if (f->first_integral_drift >= 1e-9 || g->first_integral_drift >= 1e-9)
            out.fail("profile first-integral drift too large");
        pb.numeric = {{"f", f}, {"g", g}};
        pb.closed = {{"r", parse("-z^2")}};
        PhaseState s4{{0.2, 0.1, 0.1}, {0.15, -0.1, 0.2}};
        run("4", pb, s4);
    }
    // movable-pole profile: the first integral must hold until blow-up
    auto pole = integrate_profile(1, 0, 0, 1, 0, -20, 20, 1e-12);
    if (!pole->blowup_pos) out.fail("movable pole not detected");
    if (pole->first_integral_drift >= 1e-9)
        out.fail("first-integral drift before blow-up too large");

    if (out.pass)
        out.detail = "brackets vanish for 23 cases; drifts < 1e-6 for cases 1-4; "
                     "profile drift < 1e-9";
    return out;
}

// ---- criterion 8: functional independence ----------------------------------------

Outcome independence() {
    Outcome out;
    for (const std::string& id : catalog_ids()) {
        CaseSpec spec = make_case(id);
        Expr H = reduce(classicalize(hamiltonian_op(spec.field)), spec.rules);
        Expr Q = reduce(classicalize(spec.Q), spec.rules);
        Expr P = reduce(classicalize(spec.P), spec.rules);
        Rng rng(derive_seed(kSeed, "rank-" + id));
        int full = 0;
        for (int k = 0; k < 10; ++k) {
            PhaseState s;
            for (int j = 0; j < 3; ++j) {
                s.q[j] = rng.uniform(-1.5, 1.5);
                s.p[j] = rng.uniform(-1.5, 1.5);
            }
            if (independence_rank_seeded({H, Q, P}, s, rng.next()) == 3) ++full;
        }
        if (full < 9)
            out.fail("case " + id + " full rank at only " + std::to_string(full) + "/10 states");
    }
    if (out.pass) out.detail = "rank 3 at >= 9/10 random states for all 23 cases";
    return out;
}

// ---- criterion 9: kernel oracles -------------------------------------------------

Expr small_poly(Rng& rng) {
    std::vector<Expr> terms;
    int n = 1 + static_cast<int>(rng.next() % 3);
    for (int k = 0; k < n; ++k) {
        long long c = static_cast<long long>(rng.next() % 9) - 4;
        if (c == 0) c = 2;
        terms.push_back(Expr::mul(
            {Expr::integer(c),
             Expr::pow(Expr::var(static_cast<Axis>(rng.next() % 3)), 1 + rng.next() % 2)}));
    }
    return Expr::add(std::move(terms));
}

DiffOp random_op(Rng& rng) {
    DiffOp o;
    o.set({0, 0, 0}, small_poly(rng));
    o.set(unit_index(static_cast<Axis>(rng.next() % 3)), small_poly(rng));
    return o;
}

Expr random_round_trip_expr(Rng& rng, int depth);

Outcome kernel_oracles() {
    Outcome out;

    // operator-application oracle on 100 random pairs at 1e-10
    {
        Rng rng(derive_seed(kSeed, "apply-oracle"));
        for (int k = 0; k < 100; ++k) {
            DiffOp a = random_op(rng), b = random_op(rng);
            Expr phi = small_poly(rng) * small_poly(rng);
            Expr lhs = apply_op(compose(a, b), phi);
            Expr rhs = apply_op(a, apply_op(b, phi));
            ZeroTestConfig cfg{5, 1e-10, derive_seed(kSeed, "apply", k)};
            if (!is_zero(lhs - rhs, cfg).zero) {
                out.fail("application oracle disagrees on pair " + std::to_string(k));
                break;
            }
        }
    }

    // Jacobi identity on 1000 random triples
    {
        Rng rng(derive_seed(kSeed, "jacobi"));
        for (int k = 0; k < 1000; ++k) {
            DiffOp a = random_op(rng), b = random_op(rng), c = random_op(rng);
            DiffOp jac =
                add(add(commutator(a, commutator(b, c)), commutator(b, commutator(c, a))),
                    commutator(c, commutator(a, b)));
            uint64_t ordinal = 0;
            for (const auto& [idx, coeff] : jac.terms()) {
                ZeroTestConfig cfg{3, 1e-9, derive_seed(kSeed, "jacobi-c", k * 64 + ordinal++)};
                if (!is_zero(coeff, cfg).zero) {
                    out.fail("Jacobi identity violated on triple " + std::to_string(k));
                    k = 1000;
                    break;
                }
            }
        }
    }

    // parse/print round trip on 1000 generated expressions
    {
        Rng rng(derive_seed(kSeed, "roundtrip"));
        for (int k = 0; k < 1000; ++k) {
            Expr e = random_round_trip_expr(rng, 4);
            if (parse(to_string(e)) != e) {
                out.fail("round trip broke on: " + to_string(e));
                break;
            }
        }
    }

    if (out.pass)
        out.detail = "application oracle (100 pairs), Jacobi (1000 triples), "
                     "round trip (1000 exprs)";
    return out;
}

Expr random_round_trip_expr(Rng& rng, int depth) {
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
            default:
                return Expr::fn(rng.next() % 2 ? "f" : "g", static_cast<Axis>(rng.next() % 3),
                                static_cast<int>(rng.next() % 3));
        }
    }
    switch (rng.next() % 4) {
        case 0: {
            std::vector<Expr> kids;
            for (int k = 0; k < 2 + static_cast<int>(rng.next() % 3); ++k)
                kids.push_back(random_round_trip_expr(rng, depth - 1));
            return Expr::add(std::move(kids));
        }
        case 1: {
            std::vector<Expr> kids;
            for (int k = 0; k < 2 + static_cast<int>(rng.next() % 2); ++k)
                kids.push_back(random_round_trip_expr(rng, depth - 1));
            return Expr::mul(std::move(kids));
        }
        case 2: {
            Expr base = random_round_trip_expr(rng, depth - 1);
            if (base.is_zero_const()) base = Expr::var(Axis::x);
            return Expr::pow(base,
                             (rng.next() % 4 ? 1 : -1) * (2 + static_cast<long long>(rng.next() % 2)));
        }
        default:
            return Expr::apply(static_cast<Builtin>(rng.next() % 5),
                               random_round_trip_expr(rng, depth - 1));
    }
}

} // namespace

int main() {
    struct Entry {
        int number;
        const char* label;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "commutation suite (23 cases x 5 samples, trials=20, tol=1e-9)", commutation_suite},
        {2, "negative controls (10 tampered specs must fail)", negative_controls},
        {3, "magnetic-field table (curl(A) == printed Omega, tol 1e-10)", magnetic_field_table},
        {4, "determining-system regeneration + general A solution", determining_regeneration},
        {5, "eq-(4) residual suite (tol 1e-9)", eq4_suite},
        {6, "permutation equivalence (23 x 6 verifications)", permutation_equivalence},
        {7, "classical suite (brackets, trajectories, profile ODE)", classical_suite},
        {8, "functional independence (rank 3 at >= 9/10 states)", independence},
        {9, "kernel oracles (application, Jacobi, round trip)", kernel_oracles},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = e.fn();
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", e.number,
                    e.label, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures == 0) std::printf("all 9 acceptance criteria pass\n");
    else std::printf("%d criteria FAILED\n", failures);
    return failures;
}
