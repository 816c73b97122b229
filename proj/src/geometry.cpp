#include "lbsoft/geometry.hpp"

#include <cassert>
#include <limits>
#include <stdexcept>
#include <string>

namespace lbsoft {

void ModelParams::validate() const
{
    if (!(gamma > -2.0 && gamma < -1.0))
        throw std::invalid_argument("model.gamma: must lie in (-2,-1), got " + std::to_string(gamma));
    if (!(trunc_n >= 0.0) || !std::isfinite(trunc_n))
        throw std::invalid_argument("model.trunc_n: must be a finite value >= 0");
    if (r0 != 1.0)
        throw std::invalid_argument("model.r0: only r0 = 1 is supported");
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T))
        throw std::invalid_argument("model.horizon_T: must be positive");
    if (!(quad_rel_tol > 0.0 && quad_rel_tol <= 1e-3))
        throw std::invalid_argument("quad.rel_tol: must lie in (0, 1e-3]");
    if (!(positivity_factor > 0.0 && positivity_factor <= 1.0))
        throw std::invalid_argument("model.positivity_factor: must lie in (0, 1]");
}

Velocity post_collision_velocity(Velocity v, Velocity v_star, double theta)
{
    const Velocity mid = 0.5 * (v + v_star);
    const Velocity half = 0.5 * (v - v_star);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {mid.x + c * half.x - s * half.y, mid.y + s * half.x + c * half.y};
}

double post_collision_radius_sq_minus_one(double r, double theta, double alpha)
{
    return 0.5 * ((1.0 + std::cos(theta)) * (r - 1.0) * (r + 1.0)
                  - 2.0 * r * std::sin(theta) * std::sin(alpha));
}

double post_collision_radius(double r, double theta, double alpha)
{
    const double c = std::cos(theta);
    double sq = 0.5 * (1.0 + c) * r * r + 0.5 * (1.0 - c) - r * std::sin(theta) * std::sin(alpha);
    // The radicand is |v'|^2; anything below -1e-12 means a caller passed garbage.
    assert(sq > -1e-12);
    if (sq < 0.0)
        sq = 0.0;
    return std::sqrt(sq);
}

double kernel_base(double r, double alpha)
{
    const double s = std::sin(0.5 * alpha);
    const double d = r - 1.0;
    return d * d + 4.0 * r * s * s;
}

double kernel_weight(double r, double alpha, double gamma, std::optional<double> trunc)
{
    const double base = kernel_base(r, alpha);
    const double k = base > 0.0 ? std::pow(base, 0.5 * gamma) : std::numeric_limits<double>::infinity();
    if (trunc)
        return std::min(k, *trunc);
    return k;
}

} // namespace lbsoft
