#include "singlab/regression.hpp"

#include <cmath>
#include <vector>

#include "singlab/errors.hpp"

namespace singlab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("line fit needs at least two (x, y) pairs");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("line fit needs two distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.samples = x.size();
    return fit;
}

LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("power-law fit: size mismatch");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) {
            throw DomainError("power-law fit needs positive data");
        }
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
    }
    return fit_line(lx, ly);
}

}  // namespace singlab
