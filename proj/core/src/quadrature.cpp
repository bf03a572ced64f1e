#include "singlab/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "singlab/errors.hpp"

namespace singlab {
namespace {

struct Panel {
    double a, m, b;
    double fa, fm, fb;
    double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double checked(const std::function<double(double)>& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os << "integrand is not finite at x = " << x;
        throw QuadratureError(os.str());
    }
    return y;
}

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
              const SimpsonOptions& opt) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = checked(f, lm);
    const double frm = checked(f, rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double diff = left + right - p.whole;
    // Intervals below floating-point resolution cannot be split further.
    const bool splittable = lm > p.a && rm < p.b && p.a < p.m && p.m < p.b;
    if ((depth >= opt.min_depth || !splittable) && std::abs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
    }
    if (depth >= opt.max_depth || !splittable) {
        std::ostringstream os;
        os << "adaptive Simpson failed to converge on [" << p.a << ", " << p.b
           << "], error estimate " << std::abs(diff) / 15.0 << " > " << tol;
        throw QuadratureError(os.str());
    }
    const Panel lp{p.a, lm, p.m, p.fa, flm, p.fm, left};
    const Panel rp{p.m, rm, p.b, p.fm, frm, p.fb, right};
    return refine(f, lp, 0.5 * tol, depth + 1, opt) +
           refine(f, rp, 0.5 * tol, depth + 1, opt);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& options) {
    if (a == b) {
        return 0.0;
    }
    if (b < a) {
        return -adaptive_simpson(f, b, a, options);
    }
    const double m = 0.5 * (a + b);
    const double fa = checked(f, a);
    const double fm = checked(f, m);
    const double fb = checked(f, b);
    const Panel root{a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb)};
    return refine(f, root, options.abs_tol, 0, options);
}

}  // namespace singlab
