#include "acs/banded.hpp"
#include "acs/errors.hpp"

#include <lapacke.h>

#include <string>

namespace acs {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(std::size_t(ldab_) * n, 0.0) {}

double& BandedMatrix::at(int i, int j) {
    if (!in_band(i, j)) throw DomainError("banded entry outside band");
    return ab_[std::size_t(j) * ldab_ + (kl_ + ku_ + i - j)];
}

double BandedMatrix::get(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[std::size_t(j) * ldab_ + (kl_ + ku_ + i - j)];
}

std::vector<double> BandedMatrix::multiply(const std::vector<double>& v) const {
    std::vector<double> out(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        int j0 = i - kl_ < 0 ? 0 : i - kl_;
        int j1 = i + ku_ > n_ - 1 ? n_ - 1 : i + ku_;
        double s = 0;
        for (int j = j0; j <= j1; ++j) s += get(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> BandedMatrix::solve(const std::vector<double>& b) const {
    std::vector<double> ab = ab_;
    std::vector<double> y = b;
    std::vector<lapack_int> ipiv(n_);
    lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, 1, ab.data(), ldab_, ipiv.data(), y.data(), n_);
    if (info != 0) throw Error("banded solve failed, info=" + std::to_string(info));
    return y;
}

} // namespace acs
