#include "logsob/quadrature.hpp"

#include <cmath>

namespace logsob::quad {

namespace {

struct Worker {
    const std::function<double(double)>& f;
    const Options& opt;
    long evals = 0;
    double error_acc = 0.0;

    double eval(double x) {
        ++evals;
        return f(x);
    }

    double simpson(double a, double fa, double fm, double b, double fb) {
        return (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    }

    double recurse(double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
        if (evals > opt.max_evaluations)
            throw numerical_error("quadrature: evaluation budget exceeded (interval [" +
                                  fmt12(a) + ", " + fmt12(b) + "], evals=" + std::to_string(evals) + ")");
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = simpson(a, fa, flm, m, fm);
        const double right = simpson(m, fm, frm, b, fb);
        const double diff = left + right - whole;
        if (depth >= opt.max_depth || std::abs(diff) <= 15.0 * tol) {
            error_acc += std::abs(diff) / 15.0;
            return left + right + diff / 15.0;
        }
        return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
               recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
    Result out;
    if (a == b) return out;

    Worker w{f, opt};
    const double fa = w.eval(a);
    const double fb = w.eval(b);
    const double m = 0.5 * (a + b);
    const double fm = w.eval(m);
    const double whole = w.simpson(a, fa, fm, b, fb);

    // Coarse magnitude estimate to anchor the relative tolerance before the
    // adaptive value is known.
    double scale = std::abs(whole);
    for (int i = 1; i < 8; ++i) {
        const double x = a + (b - a) * i / 8.0;
        scale = std::max(scale, std::abs(w.eval(x)) * std::abs(b - a));
    }
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::max(scale, 1e-300));

    out.value = w.recurse(a, fa, b, fb, m, fm, whole, tol, 0);
    out.error_estimate = w.error_acc;
    out.evaluations = w.evals;
    return out;
}

double integrate_value(const std::function<double(double)>& f, double a, double b,
                       const Options& opt) {
    return integrate(f, a, b, opt).value;
}

}  // namespace logsob::quad
