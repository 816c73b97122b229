#include "lbsoft/kernel_integrals.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lbsoft {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// sum_k (a)_k (b)_k / ((c)_k k!) z^k for 0 <= z <= 1/2.
double hyp2f1_series(double a, double b, double c, double z)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 200; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

} // namespace

double angular_average(double r, double delta, const QuadratureSettings& q)
{
    if (r < 0.0)
        throw std::invalid_argument("angular_average: r must be nonnegative");
    if (r == 1.0 && delta <= -1.0)
        return inf;
    if (r == 0.0 || delta == 0.0)
        return 1.0;

    auto f = [r, delta](double a) { return std::pow(kernel_base(r, a), 0.5 * delta); };
    const double peak = std::abs(r - 1.0) / std::max(1.0, std::sqrt(r));

    double total = 0.0;
    if (delta > -1.0 && delta < 0.0) {
        // alpha = u^p flattens |alpha|^delta into a bounded integrand.
        const double p = 1.0 / (1.0 + delta);
        const double split = std::min(q.singular_split, pi);
        const double u_end = std::pow(split, 1.0 / p);
        auto g = [&](double u) {
            const double a = std::pow(u, p);
            return p * std::pow(u, p - 1.0) * f(a);
        };
        const double u_peak = peak > 0.0 ? std::pow(peak, 1.0 / p) : 0.0;
        total += integrate_panels(g, geometric_breaks(0.0, u_end, u_peak), q).value;
        if (split < pi)
            total += integrate_panels(f, geometric_breaks(split, pi, peak), q).value;
    } else {
        total = integrate_panels(f, geometric_breaks(0.0, pi, 0.25 * peak), q).value;
    }
    return total / pi;
}

AngularAverageSeries::AngularAverageSeries(double delta) : delta_(delta)
{
    if (!(delta > -2.0 && delta < 0.0) || delta == -1.0)
        throw std::invalid_argument("AngularAverageSeries: delta must lie in (-2,0) \\ {-1}");
    s_ = -0.5 * delta;
    e_ = 1.0 + delta;
    A_ = std::tgamma(e_) / std::pow(std::tgamma(1.0 - s_), 2);
    B_ = std::tgamma(-e_) / std::pow(std::tgamma(s_), 2);
}

double AngularAverageSeries::inner(double x, double w) const
{
    const double z = x * x;
    if (z <= 0.5)
        return hyp2f1_series(s_, s_, 1.0, z);
    if (w == 0.0)
        return e_ > 0.0 ? A_ : inf;
    return A_ * hyp2f1_series(s_, s_, 1.0 - e_, w)
           + std::pow(w, e_) * B_ * hyp2f1_series(1.0 - s_, 1.0 - s_, 1.0 + e_, w);
}

double AngularAverageSeries::operator()(double r) const
{
    if (r <= 1.0)
        return inner(r, (1.0 - r) * (1.0 + r));
    const double x = 1.0 / r;
    return std::pow(r, delta_) * inner(x, (1.0 - x) * (1.0 + x));
}

double pair_kernel(const AngularAverageSeries& h, double r, double rho)
{
    const double hi = std::max(r, rho);
    const double lo = std::min(r, rho);
    if (hi == 0.0)
        return inf;
    return std::pow(hi, h.delta()) * h.inner(lo / hi, (hi - lo) * (hi + lo) / (hi * hi));
}

double pair_kernel_centred(const AngularAverageSeries& h, double s, double d)
{
    const double hi = s + 0.5 * d;
    if (hi == 0.0)
        return inf;
    return std::pow(hi, h.delta()) * h.inner((s - 0.5 * d) / hi, 2.0 * s * d / (hi * hi));
}

double kink_angle(double r, double gamma, double n)
{
    if (n <= 0.0)
        return pi;
    const double bstar = std::pow(n, 2.0 / gamma);
    if (r == 0.0)
        return bstar >= 1.0 ? pi : 0.0;
    const double s2 = (bstar - (r - 1.0) * (r - 1.0)) / (4.0 * r);
    if (s2 <= 0.0)
        return 0.0;
    if (s2 >= 1.0)
        return pi;
    return 2.0 * std::asin(std::sqrt(s2));
}

double truncated_rate(double r, const ModelParams& params, double Lambda, const QuadratureSettings& q)
{
    const double n = params.trunc_n;
    if (n <= 0.0)
        return 0.0;
    const double g = params.gamma;
    const double ak = kink_angle(r, g, n);
    double integral = n * ak;
    if (ak < pi) {
        auto f = [r, g](double a) { return std::pow(kernel_base(r, a), 0.5 * g); };
        const double peak = std::max(ak, 0.25 * std::abs(r - 1.0) / std::max(1.0, std::sqrt(r)));
        integral += integrate_panels(f, geometric_breaks(ak, pi, peak), q).value;
    }
    return Lambda * integral / pi;
}

AlphaEnvelope AlphaEnvelope::make(double r, double gamma, double n)
{
    AlphaEnvelope e;
    e.gamma = gamma;
    e.cap = r == 1.0 ? n : std::min(n, std::pow(std::abs(r - 1.0), gamma));
    if (r == 0.0) {
        e.C = inf;
        e.a_core = pi;
    } else {
        e.C = std::pow(0.4 * r, 0.5 * gamma);
        e.a_core = std::min(pi, std::pow(e.cap / e.C, 1.0 / gamma));
    }
    double half = e.cap * e.a_core;
    if (e.a_core < pi)
        half += e.C * (std::pow(pi, gamma + 1.0) - std::pow(e.a_core, gamma + 1.0)) / (gamma + 1.0);
    e.mass = 2.0 * half;
    return e;
}

double AlphaEnvelope::value(double alpha) const
{
    const double a = std::abs(alpha);
    return a <= a_core ? cap : C * std::pow(a, gamma);
}

double AlphaEnvelope::sample(RandomStream& stream) const
{
    const double core = cap * a_core;
    const double x = stream.uniform() * 0.5 * mass;
    double a;
    if (x < core) {
        a = x / cap;
    } else {
        const double g1 = gamma + 1.0;
        const double lo = std::pow(a_core, g1);
        const double hi = std::pow(pi, g1);
        const double v = std::min(1.0, (x - core) / (0.5 * mass - core));
        a = std::min(pi, std::pow(lo + v * (hi - lo), 1.0 / g1));
    }
    return stream.uniform() < 0.5 ? a : -a;
}

double sample_alpha(double r, const ModelParams& params, RandomStream& stream)
{
    if (!(params.trunc_n > 0.0))
        throw std::invalid_argument("sample_alpha: trunc_n must be positive");
    const AlphaEnvelope env = AlphaEnvelope::make(r, params.gamma, params.trunc_n);
    for (;;) {
        const double a = env.sample(stream);
        const double k = kernel_weight(r, a, params.gamma, params.trunc_n);
        if (stream.uniform() * env.value(a) <= k)
            return a;
    }
}

namespace {

// 2/(gamma+2) * int_0^1 h(x) dx, the self-interaction of [0,1].
double riesz_unit_from_origin(const AngularAverageSeries& h, const QuadratureSettings& q)
{
    const double gamma = h.delta();
    const double p = 1.0 / (gamma + 2.0);
    // x = 1 - t^p flattens the (1-x^2)^{1+gamma} endpoint.
    auto f = [&](double t) {
        const double tp = std::pow(t, p);
        const double x = 1.0 - tp;
        return h.inner(x, tp * (2.0 - tp)) * p * std::pow(t, p - 1.0);
    };
    return 2.0 * p * integrate(f, 0.0, 1.0, q).value;
}

} // namespace

double riesz_self_cell(const AngularAverageSeries& h, double a, double b, const QuadratureSettings& q)
{
    using gl = boost::math::quadrature::gauss<double, 16>;
    const double w = b - a;
    const double gamma = h.delta();
    // g is homogeneous of degree gamma.
    if (a == 0.0)
        return std::pow(w, gamma + 2.0) * riesz_unit_from_origin(h, q);

    const double qexp = 1.0 / (gamma + 2.0);
    QuadratureSettings loose = q;
    loose.rel_tol = std::max(q.rel_tol, 1e-10);

    // Inner integral over the centre s for fixed separation d.
    auto inner = [&](double d) {
        // Length w - d taken directly; b - a - d would lose digits for narrow cells far from 0.
        const double len = w - d;
        if (!(len > 0.0))
            return 0.0;
        const double lo = a + 0.5 * d;
        return len * gl::integrate([&](double t) { return pair_kernel_centred(h, lo + len * t, d); }, 0.0, 1.0);
    };
    // d = w u^{1/(gamma+2)} removes the d^{gamma+1} endpoint behaviour.
    auto outer = [&](double u) {
        const double d = w * std::pow(u, qexp);
        const double jac = w * qexp * std::pow(u, qexp - 1.0);
        return jac * inner(d);
    };
    return 2.0 * integrate(outer, 0.0, 1.0, loose).value;
}

double radial_riesz_energy(const RadialMeasure& lambda, double gamma, const QuadratureSettings& q)
{
    if (lambda.has_atoms())
        return inf;
    const AngularAverageSeries h(gamma);
    const auto& g = lambda.grid();
    const int n = g.cells();
    std::vector<int> live;
    for (int i = 0; i < n; ++i)
        if (lambda.cell_mass[i] > 0.0)
            live.push_back(i);
    if (live.empty())
        return 0.0;

    std::vector<double> self(n, -1.0);
    auto S = [&](int i) {
        if (self[i] < 0.0)
            self[i] = riesz_self_cell(h, g.lo(i), g.hi(i), q);
        return self[i];
    };
    using gl2 = boost::math::quadrature::gauss<double, 2>;
    using gl3 = boost::math::quadrature::gauss<double, 3>;

    double total = 0.0;
    for (std::size_t x = 0; x < live.size(); ++x) {
        const int i = live[x];
        const double ci = lambda.cell_mass[i] / g.width(i);
        total += ci * ci * S(i);
        for (std::size_t y = x + 1; y < live.size(); ++y) {
            const int j = live[y];
            const double cj = lambda.cell_mass[j] / g.width(j);
            double pij;
            const double gap = g.lo(j) - g.hi(i);
            const double wmax = std::max(g.width(i), g.width(j));
            if (gap < 2.0 * wmax) {
                // Inclusion-exclusion over self-interactions of unions.
                const double outer = riesz_self_cell(h, g.lo(i), g.hi(j), q);
                const double left = j == i + 1 ? S(i) : riesz_self_cell(h, g.lo(i), g.lo(j), q);
                const double right = j == i + 1 ? S(j) : riesz_self_cell(h, g.hi(i), g.hi(j), q);
                const double middle = j == i + 1 ? 0.0 : riesz_self_cell(h, g.hi(i), g.lo(j), q);
                pij = 0.5 * (outer - left - right + middle);
            } else {
                if (gap > 32.0 * wmax) {
                    pij = gl2::integrate(
                        [&](double r) {
                            return gl2::integrate([&](double rho) { return pair_kernel(h, r, rho); }, g.lo(j),
                                                  g.hi(j));
                        },
                        g.lo(i), g.hi(i));
                } else {
                    pij = gl3::integrate(
                        [&](double r) {
                            return gl3::integrate([&](double rho) { return pair_kernel(h, r, rho); }, g.lo(j),
                                                  g.hi(j));
                        },
                        g.lo(i), g.hi(i));
                }
            }
            total += 2.0 * ci * cj * pij;
        }
    }
    return total;
}

} // namespace lbsoft
