#pragma once

#include <cstddef>
#include <span>

namespace singlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares in log-log coordinates: log y = slope * log x + intercept.
/// Throws DomainError on non-positive data.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace singlab
