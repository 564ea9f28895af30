#include "qintcart/ode.hpp"

#include <algorithm>
#include <cmath>

namespace qintcart {

namespace {

// Dormand-Prince 5(4) tableau (Hairer-Norsett-Wanner DOPRI5)
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafe = 0.9, kBeta = 0.04;

double inf_norm(const std::vector<double>& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const std::vector<double>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

Dopri5::Result Dopri5::integrate(const Rhs& f, double t0, double t1,
                                 const std::vector<double>& y0) const {
    const int n = n_;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double expo1 = 0.2 - kBeta * 0.75;

    Result res;
    res.y_final = y0;
    res.t_reached = t0;
    if (t0 == t1) return res;

    std::vector<double> y = y0, ynew(n), ysti(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    f(t0, y.data(), k1.data());

    // initial step from the scale of the first derivative
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < n; ++i) {
            double sk = opt_.atol + opt_.rtol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, std::abs(t1 - t0));
        if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
        h *= dir;
    }

    double t = t0;
    double facold = 1e-4;
    bool last = false, rejected = false;

    while (true) {
        if (res.steps++ > opt_.max_steps) {
            res.status = Status::max_steps;
            return res;
        }
        if (std::abs(h) <= std::abs(t) * 1e-15 + 1e-300) {
            res.status = Status::step_underflow;
            return res;
        }
        if ((t + 1.01 * h - t1) * dir > 0.0) {
            h = t1 - t;
            last = true;
        }

        for (int i = 0; i < n; ++i) ysti[i] = y[i] + h * a21 * k1[i];
        f(t + 0.2 * h, ysti.data(), k2.data());
        for (int i = 0; i < n; ++i) ysti[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + 0.3 * h, ysti.data(), k3.data());
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + 0.8 * h, ysti.data(), k4.data());
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + 8.0 / 9.0 * h, ysti.data(), k5.data());
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        f(t + h, ysti.data(), k6.data());
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew.data(), k7.data());

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double sk = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) err = 2.0; // force a rejection and a smaller step

        double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // accepted
            facold = std::max(err, 1e-4);
            Segment seg;
            seg.t0 = t;
            seg.h = h;
            seg.rcont.resize(5 * static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                seg.rcont[0 * n + i] = y[i];
                seg.rcont[1 * n + i] = ydiff;
                seg.rcont[2 * n + i] = bspl;
                seg.rcont[3 * n + i] = ydiff - h * k7[i] - bspl;
                seg.rcont[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                            d6 * k6[i] + d7 * k7[i]);
            }
            res.dense.push_back(std::move(seg));

            std::swap(y, ynew);
            std::swap(k1, k7); // FSAL
            t += h;
            res.t_reached = t;
            res.y_final = y;

            if (!all_finite(y) || inf_norm(y) > opt_.blowup_norm) {
                res.status = Status::blowup;
                return res;
            }
            if (last) {
                res.status = Status::completed;
                return res;
            }
            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::max(0.1, std::min(5.0, kSafe / fac));
            double hnew = h * fac;
            if (opt_.max_step > 0.0 && std::abs(hnew) > opt_.max_step) hnew = opt_.max_step * dir;
            if (rejected) hnew = dir * std::min(std::abs(hnew), std::abs(h));
            h = hnew;
            rejected = false;
        } else {
            h /= std::min(10.0, fac11 / kSafe);
            rejected = true;
            ++res.rejected;
            last = false;
        }
    }
}

double Dopri5::dense_eval(const Result& r, double t, int component, int dimension) {
    if (r.dense.empty()) return r.y_final[component];
    // binary search for the segment containing t
    const double dir = r.dense.front().h >= 0.0 ? 1.0 : -1.0;
    size_t lo = 0, hi = r.dense.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        double tend = r.dense[mid].t0 + r.dense[mid].h;
        if ((t - tend) * dir > 0.0) lo = mid + 1;
        else hi = mid;
    }
    const Segment& s = r.dense[lo];
    double th = (t - s.t0) / s.h;
    const double* rc = s.rcont.data();
    const int n = dimension;
    double th1 = 1.0 - th;
    return rc[0 * n + component] +
           th * (rc[1 * n + component] +
                 th1 * (rc[2 * n + component] +
                        th * (rc[3 * n + component] + th1 * rc[4 * n + component])));
}

} // namespace qintcart
