// Angular integrals against K(r, alpha) = (r^2 + 1 - 2 r cos alpha)^{gamma/2}.

#pragma once

#include "lbsoft/geometry.hpp"
#include "lbsoft/quadrature.hpp"
#include "lbsoft/radial_measure.hpp"
#include "lbsoft/random.hpp"

namespace lbsoft {

// h_delta(r) = (1/2pi) int |r e_alpha - e_0|^delta d alpha by adaptive
// quadrature.  Returns +inf when delta <= -1 and r == 1.
double angular_average(double r, double delta, const QuadratureSettings& q);

// Same function evaluated from its hypergeometric representation
// 2F1(-delta/2, -delta/2; 1; r^2) (r < 1), continued through the z -> 1 - z
// connection formula near r = 1.  delta must lie in (-2, 0), delta != -1.
class AngularAverageSeries
{
public:
    explicit AngularAverageSeries(double delta);
    double operator()(double r) const;
    // h at x <= 1 given both x and 1 - x^2 (the latter computed without cancellation).
    double inner(double x, double one_minus_x2) const;
    double delta() const { return delta_; }

private:

    double delta_, s_, e_, A_, B_;
};

// Two-radius kernel g_gamma(r, rho) = (1/2pi) int (r^2 + rho^2 - 2 r rho cos a)^{gamma/2} da.
double pair_kernel(const AngularAverageSeries& h, double r, double rho);
// Same kernel at radii s + d/2 and s - d/2, accurate for d much smaller than s.
double pair_kernel_centred(const AngularAverageSeries& h, double s, double d);

// Largest alpha in [0, pi] with K(r, alpha) >= n; 0 when K < n away from
// alpha = 0 (no flat core), pi when K >= n everywhere.
double kink_angle(double r, double gamma, double n);

// R_n(r) = Lambda (1/2pi) int min(K(r, alpha), n) d alpha.
double truncated_rate(double r, const ModelParams& params, double Lambda, const QuadratureSettings& q);

// Dominating function min(cap, C |alpha|^gamma) >= min(K, n) on [-pi, pi].
struct AlphaEnvelope
{
    double cap = 0.0;
    double C = 0.0;       // +inf at r = 0, where the envelope is flat
    double a_core = 0.0;  // half-width of the flat core
    double gamma = 0.0;
    double mass = 0.0;    // integral over [-pi, pi]

    static AlphaEnvelope make(double r, double gamma, double n);

    double value(double alpha) const;
    // Draws alpha with density value(alpha) / mass by inverse CDF.
    double sample(RandomStream& stream) const;
};

// One draw of alpha with density proportional to min(K(r, .), n) on (-pi, pi].
double sample_alpha(double r, const ModelParams& params, RandomStream& stream);

// Double integral of g_gamma against lambda x lambda; +inf if lambda carries
// an atom.  Overflow mass is not included.
double radial_riesz_energy(const RadialMeasure& lambda, double gamma, const QuadratureSettings& q);

// Self-interaction of the uniform unit density on [a, b]:
// int_a^b int_a^b g_gamma(r, rho) dr drho.
double riesz_self_cell(const AngularAverageSeries& h, double a, double b, const QuadratureSettings& q);

} // namespace lbsoft
