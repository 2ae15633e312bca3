#pragma once

#include <functional>
#include <vector>

namespace levybridge {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;      // achieved absolute error estimate
    int intervals = 0;
};

// Globally adaptive Gauss-Kronrod 7-15 over [breakpoints.front(), breakpoints.back()].
// Interior breakpoints seed the initial subdivision; pass them at kinks and
// narrow features, otherwise the first panels can miss them entirely.
// Refines the worst panel until error <= max(abs_tol, rel_tol * |value|).
// Throws std::runtime_error (with the achieved error estimate) on failure
// to converge within max_intervals.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::vector<double> breakpoints,
                                    double abs_tol = 0.0,
                                    double rel_tol = 1e-10,
                                    int max_intervals = 4000);

}  // namespace levybridge
