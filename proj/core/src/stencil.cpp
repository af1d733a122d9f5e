#include "acs/stencil.hpp"
#include "acs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace acs {

std::vector<std::vector<double>> fornberg(double z, const std::vector<double>& xs, int mmax) {
    const int n = int(xs.size()) - 1;
    std::vector<std::vector<double>> c(mmax + 1, std::vector<double>(n + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        int mn = std::min(i, mmax);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (double(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - double(k) * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

RadialGrid::RadialGrid(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), N(n) { validate(); }

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> v(N);
    for (int j = 0; j < N; ++j) v[j] = x(j);
    return v;
}

void RadialGrid::validate() const {
    if (N < 16) throw ValidationError("grid needs at least 16 nodes");
    if (!(x_max > x_min)) throw ValidationError("grid requires x_max > x_min");
}

namespace {

// nodes first, first + m, ..., stored densely from first
Stencil make_stencil(int first, int width, int j, int d, double h, int m = 1) {
    std::vector<double> xs(width);
    for (int i = 0; i < width; ++i) xs[i] = double(first + m * i - j);
    auto w = fornberg(0.0, xs, d);
    Stencil s{first, std::vector<double>(std::size_t(m * (width - 1) + 1), 0.0)};
    const double scale = std::pow(h, -d);
    for (int i = 0; i < width; ++i) s.w[std::size_t(m * i)] = w[d][i] * scale;
    return s;
}

} // namespace

DiffOp::DiffOp(const RadialGrid& g, int order, int stride) : d_(order) {
    const int N = g.N;
    const int m = std::max(1, stride);
    // centered width 9 (8th order for d <= 2); one-sided width d + 7
    int wc = d_ + 7;
    if (wc % 2 == 0) ++wc;
    const int half = wc / 2;
    const int wb = d_ + 7;
    rows_.resize(N);
    if (m * (wb - 1) + 1 > N) throw ValidationError("grid too short for the stencil stride");
    for (int j = 0; j < N; ++j) {
        if (j - m * half >= 0 && j + m * half <= N - 1) {
            rows_[j] = make_stencil(j - m * half, wc, j, d_, g.h(), m);
        } else if (m == 1) {
            int first = j - half < 0 ? 0 : N - wb;
            rows_[j] = make_stencil(first, wb, j, d_, g.h());
        } else {
            // one-sided on the strided lattice through j, shifted inward
            int first = j - m * half < 0 ? j % m : j - m * ((j - (N - 1 - m * (wb - 1)) + m - 1) / m);
            first = std::clamp(first, 0, N - 1 - m * (wb - 1));
            rows_[j] = make_stencil(first, wb, j, d_, g.h(), m);
        }
    }
}

double DiffOp::apply_at(const std::vector<double>& f, int j) const {
    const Stencil& s = rows_[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < s.w.size(); ++i) acc += s.w[i] * f[s.first + i];
    return acc;
}

std::vector<double> DiffOp::apply(const std::vector<double>& f) const {
    std::vector<double> out(rows_.size());
    for (int j = 0; j < int(rows_.size()); ++j) out[j] = apply_at(f, j);
    return out;
}

Stencil boundary_operator(const RadialGrid& g, const std::vector<double>& coeff, bool left, int width) {
    const int j = left ? 0 : g.N - 1;
    const int first = left ? 0 : g.N - width;
    std::vector<double> xs(width);
    for (int i = 0; i < width; ++i) xs[i] = double(first + i - j);
    const int dmax = int(coeff.size()) - 1;
    auto w = fornberg(0.0, xs, dmax);
    Stencil s{first, std::vector<double>(width, 0.0)};
    for (int d = 0; d <= dmax; ++d) {
        if (coeff[d] == 0.0) continue;
        const double scale = coeff[d] * std::pow(g.h(), -d);
        for (int i = 0; i < width; ++i) s.w[i] += scale * w[d][i];
    }
    return s;
}

} // namespace acs

namespace acs {

std::vector<double> interpolate(const RadialGrid& g, const std::vector<double>& f, double x, int mmax, int width) {
    if (width > g.N) width = g.N;
    const double s = (x - g.x_min) / g.h();
    int first = int(std::floor(s)) - (width - 1) / 2;
    first = std::clamp(first, 0, g.N - width);
    std::vector<double> xs(width);
    for (int i = 0; i < width; ++i) xs[i] = double(first + i);
    const auto w = fornberg(s, xs, mmax);
    std::vector<double> out(mmax + 1, 0.0);
    for (int m = 0; m <= mmax; ++m) {
        double acc = 0;
        for (int i = 0; i < width; ++i) acc += w[m][i] * f[first + i];
        out[m] = acc * std::pow(g.h(), -m);
    }
    return out;
}

} // namespace acs
