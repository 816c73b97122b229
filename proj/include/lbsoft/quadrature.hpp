// Globally adaptive Gauss-Kronrod integration over explicit panels.

#pragma once

#include <functional>
#include <vector>

namespace lbsoft {

struct QuadratureSettings
{
    double rel_tol = 1e-9;
    int max_subdivisions = 400;
    double singular_split = 0.1;

    // Throws std::invalid_argument naming quad.rel_tol / quad.max_subdivisions /
    // quad.singular_split.
    void validate() const;
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

// Integrates f over [breaks.front(), breaks.back()], starting from the given
// panels and bisecting the worst panel until the summed error estimate is
// within rel_tol * |value| (or an absolute floor of abs_tol).  Throws
// NumericalError if the panel budget max_subdivisions * panels is exhausted.
QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  const std::vector<double>& breaks,
                                  const QuadratureSettings& q,
                                  double abs_tol = 0.0);

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSettings& q, double abs_tol = 0.0);

// a, then first * 2^k for every k >= 0 with first * 2^k in (a,b), then b.
// Resolves integrands with a power-law peak at the origin (0 <= a).
std::vector<double> geometric_breaks(double a, double b, double first);

} // namespace lbsoft
