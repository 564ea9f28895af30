#pragma once

#include <functional>
#include <vector>

namespace qintcart {

// Explicit embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step-size
// control and 4th-order dense output. Integrates forward or backward
// depending on the sign of t1 - t0.
class Dopri5 {
public:
    using Rhs = std::function<void(double t, const double* y, double* dydt)>;

    struct Options {
        double rtol = 1e-10;
        double atol = 1e-12;
        double max_step = 0.0;     // 0: no cap
        double blowup_norm = 1e8;  // |y|_inf above this counts as blow-up
        long long max_steps = 50'000'000;
    };

    enum class Status { completed, blowup, step_underflow, max_steps };

    struct Segment {
        double t0, h;
        std::vector<double> rcont; // 5 * n dense coefficients
    };

    struct Result {
        Status status = Status::completed;
        double t_reached = 0.0;
        std::vector<double> y_final;
        std::vector<Segment> dense;
        long long steps = 0, rejected = 0;

        bool completed() const { return status == Status::completed; }
    };

    explicit Dopri5(int dimension) : n_(dimension) {}
    Dopri5(int dimension, Options opt) : n_(dimension), opt_(opt) {}

    Result integrate(const Rhs& f, double t0, double t1, const std::vector<double>& y0) const;

    // Dense evaluation inside [t0, t_reached]; component c of the state.
    static double dense_eval(const Result& r, double t, int component, int dimension);

private:
    int n_;
    Options opt_;
};

} // namespace qintcart
