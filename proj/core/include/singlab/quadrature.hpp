#pragma once

#include <functional>

namespace singlab {

struct SimpsonOptions {
    double abs_tol = 1e-10;
    int min_depth = 4;
    int max_depth = 60;
};

/// Adaptive Simpson quadrature of `f` over [a, b] with Richardson correction.
/// The absolute tolerance is split between halves on every refinement.
/// Throws QuadratureError when a subinterval exhausts `max_depth` without
/// meeting its share of the tolerance, or when `f` returns a non-finite value.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& options = {});

}  // namespace singlab
