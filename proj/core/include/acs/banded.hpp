#pragma once
// General banded matrix with kl sub- and ku super-diagonals, LAPACK band storage.

#include <vector>

namespace acs {

class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    double& at(int i, int j);
    double get(int i, int j) const;
    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

    std::vector<double> multiply(const std::vector<double>& v) const;

    // solves A y = b, A is left untouched
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    // column-major, ldab = 2 kl + ku + 1 rows (room for the LU fill-in)
    std::vector<double> ab_;
};

} // namespace acs
