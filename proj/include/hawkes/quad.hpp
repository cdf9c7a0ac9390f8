#pragma once

#include <functional>

namespace hawkes {

struct IntegralResult {
    double value = 0.0;
    bool diverged = false;
    double abs_error = 0.0;
};

// Adaptive Simpson on [a, b], absolute tolerance per panel.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10);

// Integral over [a, infinity) by panel doubling: [a, a+1], [a+1, a+2],
// [a+2, a+4], ... Stops once two consecutive panels contribute less than
// tail_tol. Flags divergence when panel contributions fail to decay.
IntegralResult integrate_to_infinity(const std::function<double(double)>& f,
                                     double a = 0.0, double abs_tol = 1e-10,
                                     double tail_tol = 1e-12);

}  // namespace hawkes
