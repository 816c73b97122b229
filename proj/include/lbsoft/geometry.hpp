// Collision kinematics for the two-dimensional linearized Boltzmann model.
//
// Velocities are plain 2-vectors; angles are radians and are never wrapped
// here (callers normalize).  All functions are pure.

#pragma once

#include <cmath>
#include <optional>

namespace lbsoft {

struct Velocity
{
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline Velocity operator+(Velocity a, Velocity b) { return {a.x + b.x, a.y + b.y}; }
inline Velocity operator-(Velocity a, Velocity b) { return {a.x - b.x, a.y - b.y}; }
inline Velocity operator*(double s, Velocity a) { return {s * a.x, s * a.y}; }

// Unit vector at angle alpha.
inline Velocity unit_vector(double alpha) { return {std::cos(alpha), std::sin(alpha)}; }

struct ModelParams
{
    double gamma = -1.5;            // soft-potential exponent, in (-2,-1)
    double trunc_n = 100.0;         // kernel truncation level, >= 0
    double r0 = 1.0;                // initial circle radius (fixed)
    double horizon_T = 0.5;
    double quad_rel_tol = 1e-9;
    double positivity_factor = 0.2; // explicit Euler: dt <= factor / max out-rate

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// v' = (v + v_*)/2 + R_theta (v - v_*)/2.
Velocity post_collision_velocity(Velocity v, Velocity v_star, double theta);

// |v'| for |v| = r, v_* on the unit circle at relative angle alpha.
double post_collision_radius(double r, double theta, double alpha);

// r'^2 - 1 in the cancellation-free form ((1+cos)(r^2-1) - 2 r sin(theta) sin(alpha)) / 2.
double post_collision_radius_sq_minus_one(double r, double theta, double alpha);

// |r e_alpha - e_0|^2 = (r-1)^2 + 4 r sin^2(alpha/2), accurate near the singular point.
double kernel_base(double r, double alpha);

// (r^2 + 1 - 2 r cos alpha)^{gamma/2}; +inf at (r, alpha) = (1, 0) when untruncated,
// min(K, trunc) otherwise.
double kernel_weight(double r, double alpha, double gamma, std::optional<double> trunc = std::nullopt);

// Angular scale below which min(K, n) is flat at r = 1: n^{1/gamma}.
inline double truncation_scale(double trunc_n, double gamma) { return std::pow(trunc_n, 1.0 / gamma); }

} // namespace lbsoft
