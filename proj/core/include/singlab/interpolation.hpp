#pragma once

#include <span>
#include <vector>

namespace singlab {

/// Shape-preserving piecewise cubic Hermite interpolant on increasing nodes.
///
/// Without explicit slopes the node derivatives follow the PCHIP weighted
/// harmonic mean. With explicit slopes (e.g. exact derivatives carried by a
/// profile table) the slopes are passed through the Fritsch-Carlson limiter,
/// so monotone data always yields a monotone interpolant. Nodes are
/// reproduced exactly.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::span<const double> x, std::span<const double> y);
    MonotoneCubic(std::span<const double> x, std::span<const double> y,
                  std::span<const double> slopes);

    /// Throws DomainError outside [front, back].
    double operator()(double x) const;
    double derivative(double x) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

private:
    std::size_t locate(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

/// Interpolating cubic spline (C^2). Natural end conditions, or periodic with
/// period `period` (then the last node must lie below front + period).
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);
    CubicSpline(std::span<const double> x, std::span<const double> y, double period);

    /// Natural splines throw DomainError outside [front, back]; periodic
    /// splines wrap their argument.
    double operator()(double x) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the nodes
    double period_ = 0.0;
};

}  // namespace singlab
