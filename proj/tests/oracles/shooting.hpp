#pragma once
// Independent soliton profile by shooting the autonomous ODE in x = log rho:
//   tau' = v,  v' = v (q + tau - nb v / tau - v / a)
// started on the smooth branch near the origin (or zero section) and rescaled so that
// tau + kappa ~ (c a / 2) rho^a at infinity. Compiled as C++17 (ublas).

#include <vector>

namespace oracle {

struct ShootingParams {
    int nb = 1;
    double q = 2, a = 0.5, c = 1;
    double tau0 = 0;   // 0 at the origin of C^n, 1 - q at the zero section
    double kappa() const { return q - double(nb + 1) * a; }
};

class Shooting {
public:
    explicit Shooting(const ShootingParams& p, double x_start = -14.0, double x_far = 0.0);
    // tau and tau_x of the target soliton at increasing x
    void sample(const std::vector<double>& xs, std::vector<double>& tau, std::vector<double>& tau_x) const;
    double shift() const { return shift_; }

private:
    ShootingParams p_;
    double xs_;
    double shift_ = 0;
};

} // namespace oracle
