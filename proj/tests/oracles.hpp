#pragma once

// Reference values derived independently of the library: closed forms worked
// out by hand and brute-force integrators that share no code with it.

#include <cmath>
#include <functional>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// -v'' = c v^-3: Phi(v) = (sqrt(M v^2 + c/2) - sqrt(c/2)) / M, inverted.
inline double gamma3_profile(double t, double M, double c = 1.0) {
    return std::sqrt(2.0 * M * t * t + 2.0 * t * std::sqrt(c));
}

inline double gamma3_profile_derivative(double t, double M, double c = 1.0) {
    return (2.0 * M * t + std::sqrt(c)) / gamma3_profile(t, M, c);
}

// K_gamma x^(2/(gamma+1)) written out for the exponents used in the tests.
inline double pure_gamma3(double x) { return std::sqrt(2.0) * std::sqrt(x); }

inline double pure_gamma2(double x) {
    // K_2 = 3^(2/3) / 2^(1/3)
    return std::cbrt(9.0 / 2.0) * std::cbrt(x * x);
}

// Smallest eigenvalue of tridiag(-1, 2, -1) / h^2 on n interior nodes.
inline double poincare_closed_form(double lambda, int n) {
    const double h = lambda / (n + 1);
    const double s = std::sin(kPi * h / (2.0 * lambda));
    return 4.0 / (h * h) * s * s;
}

// Classical RK4 for -v'' = f(v), started at t0 from (v0, dv0), integrated to t1.
inline double rk4_shoot(const std::function<double(double)>& f, double t0, double v0, double dv0,
                        double t1, int steps) {
    const double h = (t1 - t0) / steps;
    double v = v0;
    double w = dv0;
    for (int k = 0; k < steps; ++k) {
        const double k1v = w, k1w = -f(v);
        const double k2v = w + 0.5 * h * k1w, k2w = -f(v + 0.5 * h * k1v);
        const double k3v = w + 0.5 * h * k2w, k3w = -f(v + 0.5 * h * k2v);
        const double k4v = w + h * k3w, k4w = -f(v + h * k3v);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    }
    return v;
}

// Composite Gauss-Legendre (5 point) on n equal panels.
inline double gauss5(const std::function<double(double)>& f, double a, double b, int n) {
    static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                0.9061798459386640};
    static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                0.2369268850561891, 0.2369268850561891};
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int p = 0; p < n; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int k = 0; k < 5; ++k) sum += w[k] * f(mid + 0.5 * h * x[k]);
    }
    return 0.5 * h * sum;
}

}  // namespace oracle
