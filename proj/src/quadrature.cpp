#include "lbsoft/quadrature.hpp"

#include "lbsoft/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <string>

namespace lbsoft {

void QuadratureSettings::validate() const
{
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
        throw std::invalid_argument("quad.rel_tol: must lie in (0, 1e-3]");
    if (max_subdivisions < 16)
        throw std::invalid_argument("quad.max_subdivisions: must be >= 16");
    if (!(singular_split > 0.0 && singular_split <= 3.14159))
        throw std::invalid_argument("quad.singular_split: must lie in (0, pi)");
}

namespace {

using gk21 = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel
{
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel rule(const std::function<double(double)>& f, double a, double b)
{
    double err = 0.0;
    const double v = gk21::integrate(f, a, b, 0, 0.0, &err);
    // Boost reports the depth-0 estimate on the reference interval [-1, 1].
    return {a, b, v, 0.5 * (b - a) * err};
}

} // namespace

QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  const std::vector<double>& breaks,
                                  const QuadratureSettings& q,
                                  double abs_tol)
{
    std::priority_queue<Panel> heap;
    double total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            continue;
        Panel p = rule(f, breaks[i], breaks[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    const int budget = q.max_subdivisions * std::max<int>(1, static_cast<int>(heap.size()));
    int count = static_cast<int>(heap.size());

    auto require_finite = [&] {
        if (!std::isfinite(total) || std::isnan(err)) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "quadrature: integrand not finite on [%.6g, %.6g]", breaks.front(),
                          breaks.back());
            throw NumericalError(msg);
        }
    };
    require_finite();
    while (!heap.empty() && err > std::max(q.rel_tol * std::abs(total), abs_tol)) {
        if (count >= budget)
        {
            char msg[160];
            std::snprintf(msg, sizeof msg, "quadrature did not converge: value %.6g, error estimate %.3g on [%.6g, %.6g]",
                          total, err, breaks.front(), breaks.back());
            throw NumericalError(msg);
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Cannot split further in double precision; accept the panel as is.
            total -= worst.value;
            err -= worst.error;
            worst.error = 0.0;
            total += worst.value;
            heap.push(worst);
            continue;
        }
        Panel l = rule(f, worst.a, mid);
        Panel r = rule(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++count;
        require_finite();
    }

    // Re-sum to shed the drift of incremental updates.
    QuadratureResult out;
    out.intervals = count;
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
        heap.pop();
    }
    return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSettings& q, double abs_tol)
{
    return integrate_panels(f, {a, b}, q, abs_tol);
}

std::vector<double> geometric_breaks(double a, double b, double first)
{
    std::vector<double> out{a};
    if (first > 0.0) {
        for (double x = first; x < b; x *= 2.0)
            if (x > a)
                out.push_back(x);
    }
    out.push_back(b);
    return out;
}

} // namespace lbsoft
