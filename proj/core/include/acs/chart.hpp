#pragma once
// Dense finite differences of real functions on C^d, coordinates interleaved as
// v = (Re z_1, Im z_1, ..., Re z_d, Im z_d).

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace acs {

using RealFn = std::function<double(const std::vector<double>&)>;

// H_{ij} = d_i d_jbar U by central differences with step delta
Eigen::MatrixXcd complex_hessian(const RealFn& U, const std::vector<double>& v, double delta);
// one step per real coordinate
Eigen::MatrixXcd complex_hessian(const RealFn& U, const std::vector<double>& v, const std::vector<double>& steps);

// gradient of U, real coordinates
std::vector<double> real_gradient(const RealFn& U, const std::vector<double>& v, double delta);
std::vector<double> real_gradient(const RealFn& U, const std::vector<double>& v, const std::vector<double>& steps);

} // namespace acs
