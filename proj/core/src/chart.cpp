#include "acs/chart.hpp"
#include "acs/errors.hpp"
#include "acs/reduction.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace acs {

Eigen::MatrixXcd complex_hessian(const RealFn& U, const std::vector<double>& v, double delta) {
    return complex_hessian(U, v, std::vector<double>(v.size(), delta));
}

Eigen::MatrixXcd complex_hessian(const RealFn& U, const std::vector<double>& v, const std::vector<double>& steps) {
    const int R = int(v.size());
    const int d = R / 2;
    const double u0 = U(v);
    Eigen::MatrixXd H(R, R);
    std::vector<double> w = v;
    for (int a = 0; a < R; ++a) {
        const double da = steps[a];
        w[a] = v[a] + da;
        const double up = U(w);
        w[a] = v[a] - da;
        const double um = U(w);
        w[a] = v[a];
        H(a, a) = (up - 2.0 * u0 + um) / (da * da);
        for (int b = a + 1; b < R; ++b) {
            const double db = steps[b];
            double s = 0;
            for (int sa : {1, -1})
                for (int sb : {1, -1}) {
                    w[a] = v[a] + sa * da;
                    w[b] = v[b] + sb * db;
                    s += double(sa * sb) * U(w);
                }
            w[a] = v[a];
            w[b] = v[b];
            H(a, b) = H(b, a) = s / (4.0 * da * db);
        }
    }
    Eigen::MatrixXcd C(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
            C(i, j) = 0.25 * std::complex<double>(H(xi, xj) + H(yi, yj), H(xi, yj) - H(yi, xj));
        }
    return C;
}

std::vector<double> real_gradient(const RealFn& U, const std::vector<double>& v, double delta) {
    return real_gradient(U, v, std::vector<double>(v.size(), delta));
}

std::vector<double> real_gradient(const RealFn& U, const std::vector<double>& v, const std::vector<double>& steps) {
    std::vector<double> g(v.size());
    std::vector<double> w = v;
    for (std::size_t a = 0; a < v.size(); ++a) {
        w[a] = v[a] + steps[a];
        const double up = U(w);
        w[a] = v[a] - steps[a];
        const double um = U(w);
        w[a] = v[a];
        g[a] = (up - um) / (2.0 * steps[a]);
    }
    return g;
}

namespace {

std::vector<double> interleave(const ChartPoint& p) {
    std::vector<double> v(2 * p.re.size());
    for (std::size_t i = 0; i < p.re.size(); ++i) {
        v[2 * i] = p.re[i];
        v[2 * i + 1] = p.im[i];
    }
    return v;
}

// chart layout for O(-k): (w_1..w_{m-1}, xi), rho = |xi|^2 (1 + |w|^2)^l
double log_rho_real(const ConeSpec& spec, const std::vector<double>& v) {
    const int d = int(v.size()) / 2;
    if (spec.kind == ConeKind::EuclideanResolution) {
        double s = 0;
        for (double t : v) s += t * t;
        return std::log(s);
    }
    double w2 = 0;
    for (int i = 0; i < d - 1; ++i) w2 += v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1];
    const double xi2 = v[2 * d - 2] * v[2 * d - 2] + v[2 * d - 1] * v[2 * d - 1];
    return std::log(xi2) + spec.base_curvature_scale * std::log1p(w2);
}

} // namespace

double chart_log_rho(const ConeSpec& spec, const ChartPoint& p) {
    if (int(p.re.size()) != spec.dim() || p.im.size() != p.re.size())
        throw ChartError("chart point has wrong dimension");
    return log_rho_real(spec, interleave(p));
}

std::vector<double> full_chart_oracle(const ConeSpec& spec, const BackgroundMetric& bg,
                                      const std::function<double(double)>& phi,
                                      const std::vector<ChartPoint>& pts, const ChartOracleOptions& opt) {
    const int d = spec.dim();
    RealFn u0 = [&](const std::vector<double>& v) { return bg.potential(log_rho_real(spec, v)).value(); };
    RealFn uphi = [&](const std::vector<double>& v) {
        const double x = log_rho_real(spec, v);
        return bg.potential(x).value() + phi(x);
    };
    RealFn ph = [&](const std::vector<double>& v) { return phi(log_rho_real(spec, v)); };

    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        const double lr = chart_log_rho(spec, p);
        if (!(std::exp(lr) >= opt.min_rho)) throw ChartError("sample too close to the exceptional set");
        const auto v = interleave(p);
        // base directions on the unit scale, fibre directions relative to the point
        std::vector<double> steps(v.size());
        if (spec.kind == ConeKind::EuclideanResolution) {
            steps.assign(v.size(), opt.h * std::exp(0.5 * lr));
        } else {
            const double xi = std::hypot(v[2 * d - 2], v[2 * d - 1]);
            if (!(xi > 0.0)) throw ChartError("sample on the zero section");
            steps.assign(v.size(), opt.h);
            steps[2 * d - 2] = steps[2 * d - 1] = opt.h * xi;
        }

        const auto H0 = complex_hessian(u0, v, steps);
        const auto H1 = complex_hessian(uphi, v, steps);
        const double d0 = H0.determinant().real(), d1 = H1.determinant().real();
        if (!(d0 > 0.0) || !(d1 > 0.0)) throw NonKahlerError("chart Hessian not positive", -1);

        // real Euler field over the fibre coordinates
        const auto grad = real_gradient(ph, v, steps);
        const int first = spec.kind == ConeKind::EuclideanResolution ? 0 : 2 * (d - 1);
        double euler = 0;
        for (int a = first; a < 2 * d; ++a) euler += v[a] * grad[a];

        out.push_back(std::log(d1 / d0) + euler / (2.0 * spec.a) - phi(lr));
    }
    return out;
}

} // namespace acs
