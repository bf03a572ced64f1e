#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace singlab {

/// Square band matrix with `lower` sub- and `upper` super-diagonals, stored
/// row by row. Factorised in place by LU without pivoting, which is stable
/// for the diagonally dominant systems produced by the strip discretisation;
/// no fill-in leaves the band.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return lower_; }
    std::size_t upper() const { return upper_; }

    /// Entry (i, j); |i - j| must lie inside the band.
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;
    bool in_band(std::size_t i, std::size_t j) const;

    void set_zero();

    /// y = A x. Only valid before factorize().
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Throws SingularJacobian on a zero or non-finite pivot.
    void factorize();

    /// Overwrites `rhs` with the solution. Requires factorize().
    void solve_in_place(std::span<double> rhs) const;

private:
    std::size_t index(std::size_t i, std::size_t j) const { return i * width_ + (j + lower_ - i); }

    std::size_t n_, lower_, upper_, width_;
    std::vector<double> data_;
    bool factorized_ = false;
};

}  // namespace singlab
