#include "singlab/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singlab/errors.hpp"

namespace singlab {
namespace {

void validate(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("MonotoneCubic needs at least two nodes and matching value count");
    }
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (!(x[k] > x[k - 1])) {
            throw DomainError("MonotoneCubic nodes must be strictly increasing");
        }
    }
}

std::vector<double> secants(std::span<const double> x, std::span<const double> y) {
    std::vector<double> d(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        d[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    }
    return d;
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Three-point end slope with the PCHIP shape safeguards.
double end_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(m) != sign(d0)) {
        m = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(m) > std::abs(3.0 * d0)) {
        m = 3.0 * d0;
    }
    return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    validate(x, y);
    const auto d = secants(x, y);
    const std::size_t n = x.size();
    if (n == 2) {
        m_[0] = m_[1] = d[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] * d[k] <= 0.0) {
            m_[k] = 0.0;
            continue;
        }
        const double h0 = x[k] - x[k - 1];
        const double h1 = x[k + 1] - x[k];
        const double w1 = 2.0 * h1 + h0;
        const double w2 = h1 + 2.0 * h0;
        m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m_[0] = end_slope(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m_[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
}

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y,
                             std::span<const double> slopes)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(slopes.begin(), slopes.end()) {
    validate(x, y);
    if (slopes.size() != x.size()) {
        throw DomainError("MonotoneCubic slope count does not match node count");
    }
    const auto d = secants(x, y);
    // Fritsch-Carlson: zero out slopes that disagree with the neighbouring
    // secants, then shrink each interval's pair into the radius-3 disc.
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] == 0.0) {
            m_[k] = 0.0;
            m_[k + 1] = 0.0;
            continue;
        }
        if (sign(m_[k]) != sign(d[k])) m_[k] = 0.0;
        if (sign(m_[k + 1]) != sign(d[k])) m_[k + 1] = 0.0;
        const double a = m_[k] / d[k];
        const double b = m_[k + 1] / d[k];
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            m_[k] = tau * a * d[k];
            m_[k + 1] = tau * b * d[k];
        }
    }
}

std::size_t MonotoneCubic::locate(double x) const {
    const double span = x_.back() - x_.front();
    const double slack = 1e-12 * std::max(1.0, span);
    if (!(x >= x_.front() - slack && x <= x_.back() + slack)) {
        std::ostringstream os;
        os << "interpolation point " << x << " outside [" << x_.front() << ", " << x_.back()
           << "]";
        throw DomainError(os.str());
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(k, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t k = locate(x);
    const double h = x_[k + 1] - x_[k];
    const double s = (x - x_[k]) / h;
    if (s <= 0.0) return y_[k];
    if (s >= 1.0) return y_[k + 1];
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[k] + h * h10 * m_[k] + h01 * y_[k + 1] + h * h11 * m_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t k = locate(x);
    const double h = x_[k + 1] - x_[k];
    const double s = std::clamp((x - x_[k]) / h, 0.0, 1.0);
    const double s2 = s * s;
    const double d00 = (6.0 * s2 - 6.0 * s) / h;
    const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
    const double d01 = (-6.0 * s2 + 6.0 * s) / h;
    const double d11 = 3.0 * s2 - 2.0 * s;
    return d00 * y_[k] + d10 * m_[k] + d01 * y_[k + 1] + d11 * m_[k + 1];
}

}  // namespace singlab

namespace singlab {
namespace {

// Thomas algorithm; a = sub, b = diag, c = super (a[0], c[n-1] unused).
std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                      std::vector<double> c, std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t k = 1; k < n; ++k) {
        const double w = a[k] / b[k - 1];
        b[k] -= w * c[k - 1];
        d[k] -= w * d[k - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        d[k] = (d[k] - c[k] * d[k + 1]) / b[k];
    }
    return d;
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    validate(x, y);
    const std::size_t n = x.size();
    if (n < 3) return;
    // Interior equations for m_1 .. m_{n-2}; m_0 = m_{n-1} = 0.
    const std::size_t k = n - 2;
    std::vector<double> a(k), b(k), c(k), d(k);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + 1;
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        a[r] = h0;
        b[r] = 2.0 * (h0 + h1);
        c[r] = h1;
        d[r] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    const auto m = solve_tridiagonal(a, b, c, d);
    for (std::size_t r = 0; r < k; ++r) m_[r + 1] = m[r];
}

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y, double period)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0), period_(period) {
    validate(x, y);
    if (!(period > x.back() - x.front())) {
        throw DomainError("periodic spline period must exceed the node span");
    }
    const std::size_t n = x.size();
    auto h = [&](std::size_t i) {
        return i + 1 < n ? x[i + 1] - x[i] : x[0] + period - x[n - 1];
    };
    auto yy = [&](std::size_t i) { return y[i % n]; };
    // Cyclic system solved by Sherman-Morrison on a tridiagonal core.
    std::vector<double> a(n), b(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hm = h((i + n - 1) % n);
        const double hp = h(i);
        a[i] = hm;
        b[i] = 2.0 * (hm + hp);
        c[i] = hp;
        d[i] = 6.0 * ((yy(i + 1) - y[i]) / hp - (y[i] - yy(i + n - 1)) / hm);
    }
    const double alpha = c[n - 1];  // entry (n-1, 0)
    const double beta = a[0];       // entry (0, n-1)
    const double g = -b[0];
    std::vector<double> bb = b;
    bb[0] -= g;
    bb[n - 1] -= alpha * beta / g;
    const auto z = solve_tridiagonal(a, bb, c, d);
    std::vector<double> u(n, 0.0);
    u[0] = g;
    u[n - 1] = alpha;
    const auto q = solve_tridiagonal(a, bb, c, u);
    const double fact = (z[0] + beta * z[n - 1] / g) / (1.0 + q[0] + beta * q[n - 1] / g);
    for (std::size_t i = 0; i < n; ++i) m_[i] = z[i] - fact * q[i];
}

double CubicSpline::operator()(double x) const {
    const std::size_t n = x_.size();
    double xl, xr, yl, yr, ml, mr;
    if (period_ > 0.0) {
        double t = std::fmod(x - x_.front(), period_);
        if (t < 0.0) t += period_;
        t += x_.front();
        std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
        k = k == 0 ? 0 : k - 1;
        xl = x_[k];
        yl = y_[k];
        ml = m_[k];
        if (k + 1 < n) {
            xr = x_[k + 1];
            yr = y_[k + 1];
            mr = m_[k + 1];
        } else {
            xr = x_.front() + period_;
            yr = y_.front();
            mr = m_.front();
        }
        x = t;
    } else {
        const double slack = 1e-12 * std::max(1.0, x_.back() - x_.front());
        if (!(x >= x_.front() - slack && x <= x_.back() + slack)) {
            throw DomainError("spline evaluation outside the node range");
        }
        std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
        k = std::min(k == 0 ? 0 : k - 1, n - 2);
        xl = x_[k];
        xr = x_[k + 1];
        yl = y_[k];
        yr = y_[k + 1];
        ml = m_[k];
        mr = m_[k + 1];
    }
    const double h = xr - xl;
    const double A = (xr - x) / h;
    const double B = (x - xl) / h;
    return A * yl + B * yr + ((A * A * A - A) * ml + (B * B * B - B) * mr) * h * h / 6.0;
}

}  // namespace singlab
