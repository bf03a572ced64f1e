#include "singlab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singlab/errors.hpp"

namespace singlab {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), width_(lower + upper + 1), data_(n * width_, 0.0) {}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
    return i < n_ && j < n_ && j + lower_ >= i && j <= i + upper_;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw DomainError("banded matrix index outside the band");
    return data_[index(i, j)];
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
    if (!in_band(i, j)) return 0.0;
    return data_[index(i, j)];
}

void BandedMatrix::set_zero() {
    std::fill(data_.begin(), data_.end(), 0.0);
    factorized_ = false;
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        double acc = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) acc += data_[index(i, j)] * x[j];
        y[i] = acc;
    }
}

void BandedMatrix::factorize() {
    for (std::size_t k = 0; k < n_; ++k) {
        const double pivot = data_[index(k, k)];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            std::ostringstream os;
            os << "zero or non-finite pivot " << pivot << " at row " << k;
            throw SingularJacobian(os.str());
        }
        const std::size_t i1 = std::min(n_ - 1, k + lower_);
        const std::size_t j1 = std::min(n_ - 1, k + upper_);
        const double* row_k = &data_[index(k, k)];
        for (std::size_t i = k + 1; i <= i1; ++i) {
            double* row_i = &data_[index(i, k)];
            const double l = row_i[0] / pivot;
            row_i[0] = l;
            if (l == 0.0) continue;
            for (std::size_t j = 1; j <= j1 - k; ++j) row_i[j] -= l * row_k[j];
        }
    }
    factorized_ = true;
}

void BandedMatrix::solve_in_place(std::span<double> rhs) const {
    if (!factorized_) throw DomainError("solve_in_place requires factorize()");
    if (rhs.size() != n_) throw DomainError("right-hand side size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        double acc = rhs[i];
        for (std::size_t j = j0; j < i; ++j) acc -= data_[index(i, j)] * rhs[j];
        rhs[i] = acc;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t j1 = std::min(n_ - 1, ii + upper_);
        double acc = rhs[ii];
        for (std::size_t j = ii + 1; j <= j1; ++j) acc -= data_[index(ii, j)] * rhs[j];
        rhs[ii] = acc / data_[index(ii, ii)];
    }
}

}  // namespace singlab
