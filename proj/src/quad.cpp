#include "hawkes/quad.hpp"

#include <cmath>
#include <limits>

namespace hawkes {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive(f, a, fa, b, fb, m, fm, whole, abs_tol, 48);
}

IntegralResult integrate_to_infinity(const std::function<double(double)>& f,
                                     double a, double abs_tol,
                                     double tail_tol) {
    IntegralResult out;
    double lo = a;
    double width = 1.0;
    int small_in_a_row = 0;
    double prev_panel = std::numeric_limits<double>::infinity();
    int non_decaying = 0;
    for (int panel = 0; panel < 400; ++panel) {
        const double hi = lo + width;
        const double part = integrate(f, lo, hi, abs_tol);
        out.value += part;
        out.abs_error += abs_tol;
        if (std::abs(part) < tail_tol * std::max(1.0, std::abs(out.value))) {
            if (++small_in_a_row >= 2) return out;
        } else {
            small_in_a_row = 0;
        }
        // Doubling panel widths: a convergent integral of an eventually
        // monotone integrand must show decaying contributions.
        if (panel > 8 && std::abs(part) >= 0.5 * std::abs(prev_panel)) {
            if (++non_decaying >= 24) {
                out.diverged = true;
                return out;
            }
        } else {
            non_decaying = 0;
        }
        prev_panel = part;
        lo = hi;
        if (panel >= 1) width *= 2.0;
        if (!std::isfinite(out.value)) {
            out.diverged = true;
            return out;
        }
    }
    out.diverged = true;  // ran out of panels without the tail settling
    return out;
}

}  // namespace hawkes
