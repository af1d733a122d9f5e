#pragma once
// Uniform radial grid in x = log rho and high-order finite-difference stencils.

#include <vector>

namespace acs {

// Fornberg weights for derivatives 0..mmax at z on nodes xs.
// w[m][j] is the weight of xs[j] for the m-th derivative.
std::vector<std::vector<double>> fornberg(double z, const std::vector<double>& xs, int mmax);

struct RadialGrid {
    double x_min = -6.0, x_max = 30.0;
    int N = 1024;
    int j_glue = 0;

    RadialGrid() = default;
    RadialGrid(double xmin, double xmax, int n);

    double h() const { return (x_max - x_min) / double(N - 1); }
    double x(int j) const { return x_min + h() * double(j); }
    std::vector<double> nodes() const;
    void validate() const;
};

struct Stencil {
    int first;                 // first node index
    std::vector<double> w;     // weights, already divided by h^d
};

// Derivative operator of order d: 8th order in the interior, 7th on the one-sided rows.
class DiffOp {
public:
    DiffOp() = default;
    // stride > 1 uses every stride-th node (spacing stride * h)
    DiffOp(const RadialGrid& g, int order, int stride = 1);

    const Stencil& row(int j) const { return rows_[j]; }
    int order() const { return d_; }
    std::vector<double> apply(const std::vector<double>& f) const;
    double apply_at(const std::vector<double>& f, int j) const;

private:
    int d_ = 0;
    std::vector<Stencil> rows_;
};

struct Derivs {
    DiffOp D1, D2;
    Derivs() = default;
    explicit Derivs(const RadialGrid& g) : D1(g, 1), D2(g, 2) {}
};

// Stencil for polynomial-in-D operators: sum_k coeff[k] D^k at node j,
// one-sided window of given width anchored at the left or right end.
Stencil boundary_operator(const RadialGrid& g, const std::vector<double>& coeff, bool left, int width);

// Lagrange interpolation of node values on a local window of `width` nodes,
// derivatives 0..mmax at x
std::vector<double> interpolate(const RadialGrid& g, const std::vector<double>& f, double x, int mmax = 0,
                                int width = 9);

} // namespace acs
