// Window functionals around the circle, the time-integrated atom inequality,
// the truncation defect scan and the de la Vallee Poussin construction.
// Every constant is a measured output.

#pragma once

#include "lbsoft/cross_section.hpp"
#include "lbsoft/geometry.hpp"
#include "lbsoft/quadrature.hpp"
#include "lbsoft/radial_measure.hpp"
#include "lbsoft/solver_det.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lbsoft {

struct ExponentFit
{
    std::string name;
    double value = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;    // 95% interval from the regression
    double range_lo = 0.0, range_hi = 0.0;
    double residual = 0.0;              // rms of log residuals
};

struct NamedConstant
{
    std::string name;
    double value = 0.0;
    std::string detail;
};

struct Check
{
    std::string name;
    bool pass = false;
    std::string detail;
};

struct DiagnosticsReport
{
    std::vector<ExponentFit> exponent_fits;
    std::vector<NamedConstant> constants;
    std::vector<Check> checks;
    std::map<std::string, std::vector<double>> curves;
    std::string inputs_digest;

    void merge(const DiagnosticsReport& other);
    bool all_pass() const;
    nlohmann::json to_json() const;
};

// Least-squares slope of log y against log x.
ExponentFit fit_loglog(const std::string& name, const std::vector<double>& x, const std::vector<double>& y);

// Sorted disjoint closed intervals of [-pi, pi] on which lo <= sin(alpha) <= hi.
std::vector<std::pair<double, double>> sine_preimage(double lo, double hi);
// Closure of the complement in [-pi, pi] of sine_preimage(lo, hi).
std::vector<std::pair<double, double>> sine_preimage_complement(double lo, double hi);

// (1/2pi) int over [lo, hi] of the untruncated K(r, .); +inf if the interval
// touches alpha = 0 with r = 1 and gamma <= -1.
double kernel_interval_integral(double r, double gamma, double lo, double hi, const QuadratureSettings& q);

// Pointwise window functionals A_eps(r), B_eps(r).
double a_eps_pointwise(double r, double eps, const AngularCrossSection& beta, const ModelParams& params,
                       const QuadratureSettings& q);
double b_eps_pointwise(double r, double eps, const AngularCrossSection& beta, const ModelParams& params,
                       const QuadratureSettings& q);

// int lambda(dr) A_eps(r), cells at their midpoints.
double a_eps_functional(const RadialMeasure& lambda, double eps, const AngularCrossSection& beta,
                        const ModelParams& params, const QuadratureSettings& q);
double b_eps_functional(const RadialMeasure& lambda, double eps, const AngularCrossSection& beta,
                        const ModelParams& params, const QuadratureSettings& q);

// Trapezoid of the atom mass over the snapshot times.
double atom_time_integral(const Trajectory& traj);

// For each eps: LHS = int_0^T p, I(eps) = int_0^T int |r^2-1|^gamma 1_{|r^2-1|>eps},
// kappa(eps) = LHS / (eps^{|gamma|-1} + eps^{|gamma|} I(eps)); checks stability
// of kappa within a factor 3.  If atom_rate > 0, also compares LHS with
// (1 - exp(-R T)) / R, allowing a first-order error R dt for the Euler step
// that produced the trajectory (euler_dt = 0 for an exact trajectory).
DiagnosticsReport ob1_report(const Trajectory& traj, const std::vector<double>& eps_grid, const ModelParams& params,
                             double atom_rate = 0.0, double euler_dt = 0.0);

class VPFunction
{
public:
    // a_1..a_K, with a_K the first threshold whose window is empty; beyond K
    // the thresholds continue as a_K + (j - K).
    std::vector<long long> thresholds;
    double mass = 0.0;
    double integral = 0.0;  // int g(1/|r^2 - 1|) d mu

    long long a(long long k) const;
    double f(double x) const;       // k + 1 on [a_k, a_{k+1}), a_0 = 0
    double m(double x) const;       // inf over (0, x] of f(y)/y
    double g(double x) const;       // x m(x), evaluated without rounding past f(x)
    double x_g_inv(double x) const { return m(1.0 / x); }  // x g(1/x)

private:
    friend VPFunction vallee_poussin(const RadialMeasure& mu, int k_max);
    std::vector<double> prefix_min_;  // min_{j <= i+1} j / a_j
};

// Throws std::invalid_argument if mu has an atom at 1, NumericalError when
// the window mass is still positive at k_max.
VPFunction vallee_poussin(const RadialMeasure& mu, int k_max = 64);

// Checks exact monotonicity of x g(1/x) on a log grid, growth of g, and the
// integral bound; records thresholds and sampled curves.
DiagnosticsReport vallee_poussin_report(const VPFunction& vp, const std::string& label);

enum class TestFunction { radius, coordinate, bump };

struct LipschitzTest
{
    TestFunction kind = TestFunction::radius;
    std::string name() const;
    double lipschitz() const;
    static LipschitzTest parse(const std::string& s);  // "abs" | "coord" | "bump"
};

// Radial form of |(A - A_n) phi| at |v| = r.
double truncation_defect(double r, const LipschitzTest& phi, double n, const AngularCrossSection& beta,
                         const ModelParams& params, const QuadratureSettings& q);

// Upper bound Lambda ||phi||_lip n^{(2+gamma)/(2 gamma)} h_{gamma/2}(r).
double truncation_bound(double r, const LipschitzTest& phi, double n, const AngularCrossSection& beta,
                        const ModelParams& params, const QuadratureSettings& q);

DiagnosticsReport truncation_scan(const LipschitzTest& phi, const std::vector<double>& r_grid,
                                  const std::vector<double>& n_list, const AngularCrossSection& beta,
                                  const ModelParams& params, const QuadratureSettings& q);

} // namespace lbsoft
