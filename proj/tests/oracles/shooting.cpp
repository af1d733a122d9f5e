#include "shooting.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <utility>

namespace oracle {

namespace {

namespace ode = boost::numeric::odeint;
using vec = boost::numeric::ublas::vector<double>;
using mat = boost::numeric::ublas::matrix<double>;

struct System {
    ShootingParams p;
    void operator()(const vec& y, vec& dy, double) const {
        const double t = y(0), v = y(1);
        dy(0) = v;
        dy(1) = v * (p.q + t - p.nb * v / t - v / p.a);
    }
};

struct Jacobian {
    ShootingParams p;
    void operator()(const vec& y, mat& J, double, vec& dfdt) const {
        const double t = y(0), v = y(1);
        J(0, 0) = 0;
        J(0, 1) = 1;
        J(1, 0) = v * (1.0 + p.nb * v / (t * t));
        J(1, 1) = p.q + t - 2.0 * p.nb * v / t - 2.0 * v / p.a;
        dfdt(0) = dfdt(1) = 0;
    }
};

vec start(const ShootingParams& p, double xs) {
    const double nb = p.nb, a = p.a;
    const double q2 = p.tau0 > 0 ? 0.5 * (1.0 - nb / p.tau0 - 1.0 / a) : (1.0 - 1.0 / a) / (nb + 2.0);
    const double s = std::exp(xs);
    vec y(2);
    y(0) = p.tau0 + s + q2 * s * s;
    y(1) = s + 2.0 * q2 * s * s;
    return y;
}

auto stepper() { return ode::make_dense_output(1e-14, 1e-13, ode::rosenbrock4<double>()); }

} // namespace

Shooting::Shooting(const ShootingParams& p, double x_start, double x_far) : p_(p), xs_(x_start) {
    const double a = p.a;
    if (x_far == 0.0) x_far = 40.0 / a;
    vec y = start(p_, xs_);
    auto st = stepper();
    ode::integrate_adaptive(st, std::make_pair(System{p_}, Jacobian{p_}), y, xs_, x_far, 1e-3);
    const double A1 = (y(0) + p.kappa()) * std::exp(-a * x_far);
    shift_ = std::log(p.c * a / (2.0 * A1)) / a;
}

void Shooting::sample(const std::vector<double>& xs, std::vector<double>& tau, std::vector<double>& tau_x) const {
    std::vector<double> times;
    times.push_back(xs_);
    for (double x : xs) times.push_back(x + shift_);
    tau.clear();
    tau_x.clear();
    vec y = start(p_, xs_);
    auto st = stepper();
    bool first = true;
    ode::integrate_times(st, std::make_pair(System{p_}, Jacobian{p_}), y, times.begin(), times.end(), 1e-3,
                         [&](const vec& s, double) {
                             if (first) {
                                 first = false;
                                 return;
                             }
                             tau.push_back(s(0));
                             tau_x.push_back(s(1));
                         });
}

} // namespace oracle
