#pragma once

#include <functional>
#include <span>

namespace npspec::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int intervals = 0;    // subintervals in the final partition
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below abs_tol or max_intervals is reached. The result is
/// returned either way; callers check `converged`.
Result integrate(const Integrand& f, double a, double b, double abs_tol,
                 int max_intervals = 4000);

/// Same, but starting from the partition given by sorted `breakpoints`
/// (first and last entries are the integration limits). Use this when the
/// integrand has known kinks or jumps.
Result integrate(const Integrand& f, std::span<const double> breakpoints, double abs_tol,
                 int max_intervals = 4000);

}  // namespace npspec::quadrature
