#pragma once

#include <memory>

#include "qintcart/catalog.hpp"
#include "qintcart/ode.hpp"

namespace qintcart {

struct PhaseState {
    std::array<double, 3> q{0.0, 0.0, 0.0};
    std::array<double, 3> p{0.0, 0.0, 0.0};
};

// Classical observables are expressions over x,y,z and the commuting momentum
// symbols p1,p2,p3 (reserved parameter names).

// Principal symbol: p_j -> commuting p_j, terms carrying positive powers of
// hbar dropped. Requires operator order <= 2. The paper's Hamiltonian maps to
// H_cl = 1/2 p^2 + 2 A.p + V.
Expr classicalize(const DiffOp& op);
Expr classicalize(const MomentumPolynomial& mp);

// {a,b} = sum_j (da/dx_j db/dp_j - da/dp_j db/dx_j), exact.
Expr poisson(const Expr& a, const Expr& b);

// Random complex bindings (annulus) for every parameter and abstract-function
// jet appearing in the expressions; variables are left free.
EvalPoint sample_symbol_bindings(std::span<const Expr> exprs, uint64_t seed);

// ---- profile ODE ------------------------------------------------------------

// Tabulated solution of f'' = C f^2 + C1 f + C4 with dense output, usable as a
// numeric profile for an abstract function. Derivative orders 0 and 1 come
// from the dense interpolant, order 2 from the ODE itself, order 3 from its
// derivative. The first integral E = f'^2/2 - C/3 f^3 - C1/2 f^2 - C4 f is
// monitored across all accepted steps.
class OdeProfile : public FnProfile {
public:
    std::complex<double> value(double x, int order) const override;

    double C = 0.0, C1 = 0.0, C4 = 0.0;
    double reach_lo = 0.0, reach_hi = 0.0; // attained range (blow-up shrinks it)
    bool blowup_pos = false, blowup_neg = false;
    double first_integral0 = 0.0;
    double first_integral_drift = 0.0; // max |E - E0| / (1 + |E0|)

    Dopri5::Result forward, backward; // both start at x = 0

private:
    double component(double x, int c) const;
};

// Integrates the profile ODE from initial data f(0)=f0, f'(0)=f0p over
// [x_lo, x_hi] (the range must contain 0). Finite-time blow-up is reported in
// the profile, not an error.
std::shared_ptr<OdeProfile> integrate_profile(double C, double C1, double C4, double f0,
                                              double f0p, double x_lo, double x_hi,
                                              double rtol = 1e-12);

// ---- trajectories ----------------------------------------------------------

struct TrajectoryLog {
    std::vector<double> t;
    std::vector<std::array<double, 6>> states;       // x,y,z,p1,p2,p3
    std::vector<std::array<double, 3>> observables;  // H, Q, P
    std::array<double, 3> drift{0.0, 0.0, 0.0};      // max |O(t)-O(0)|/(1+|O(0)|)
    bool blew_up = false;
    double blowup_time = 0.0;

    double max_drift() const { return std::max(drift[0], std::max(drift[1], drift[2])); }
    std::string csv() const; // columns t,x,y,z,p1,p2,p3,H,Q,P
};

// A fully concretized classical system: observables plus the bindings
// (parameter values and numeric profiles) needed to evaluate them.
struct ClassicalSystem {
    Expr H, Q, P;
    EvalPoint bindings;
};

struct ProfileBindings {
    std::map<std::string, Expr> closed;                              // name -> expression
    std::map<std::string, std::shared_ptr<const FnProfile>> numeric; // name -> tabulated
    std::map<std::string, std::complex<double>> params;
};

// Classicalizes H, Q, P of a catalog case, applies the case rules, substitutes
// closed-form profiles and attaches numeric ones.
ClassicalSystem make_classical_system(const CaseSpec& spec, const ProfileBindings& profiles);

// Hamilton's equations qdot = dH/dp, pdot = -dH/dq under adaptive RK5(4);
// samples the dense output on a uniform grid (>= 2 samples incl. t=0) and logs
// H, Q, P with their relative drifts. Blow-up is reported via blew_up and the
// reached time, with samples covering the reached interval.
TrajectoryLog integrate_trajectory(const ClassicalSystem& sys, const PhaseState& initial,
                                   double t_final, double rtol, int samples = 1024);

// Rank of the 3x6 Jacobian of the observables with respect to
// (x,y,z,p1,p2,p3) at the state; singular values below
// threshold * sigma_max are treated as zero.
int independence_rank(const std::vector<Expr>& observables, const PhaseState& state,
                      const EvalPoint& bindings, double threshold = 1e-8);

// Convenience: samples bindings (seeded) over the observables and all of
// their phase-space gradients, so abstract-function jets are covered.
int independence_rank_seeded(const std::vector<Expr>& observables, const PhaseState& state,
                             uint64_t seed, double threshold = 1e-8);

std::string trajectory_to_json(const TrajectoryLog& log);

} // namespace qintcart
