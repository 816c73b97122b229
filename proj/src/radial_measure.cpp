#include "lbsoft/radial_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lbsoft {

void GridSpec::validate() const
{
    if (levels < 0 || levels > 48)
        throw std::invalid_argument("grid.levels: must lie in [0, 48]");
    if (!(eps_max > 0.0 && eps_max < 1.0))
        throw std::invalid_argument("grid.eps_max: must lie in (0, 1)");
    if (!(background_h > 0.0 && background_h <= 0.5))
        throw std::invalid_argument("grid.background_h: must lie in (0, 0.5]");
    if (!(r_max > 1.0 + eps_max) || !std::isfinite(r_max))
        throw std::invalid_argument("grid.r_max: must exceed 1 + grid.eps_max");
}

RadialGrid RadialGrid::make(const GridSpec& spec)
{
    spec.validate();
    std::vector<double> e;
    const long nb = std::lround(std::ceil(spec.r_max / spec.background_h));
    for (long k = 0; k < nb; ++k)
        e.push_back(static_cast<double>(k) * spec.background_h);
    e.push_back(spec.r_max);
    e.push_back(1.0);
    for (int j = 0; j <= spec.levels; ++j) {
        const double off = std::ldexp(spec.eps_max, -j);
        e.push_back(1.0 - off);
        e.push_back(1.0 + off);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    e.erase(std::remove_if(e.begin(), e.end(), [&](double x) { return x < 0.0 || x > spec.r_max; }), e.end());
    return from_edges(std::move(e));
}

RadialGrid RadialGrid::from_edges(std::vector<double> edges)
{
    if (edges.size() < 2 || edges.front() != 0.0)
        throw std::invalid_argument("grid: edges must start at 0 and contain at least one cell");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]) || !std::isfinite(edges[i]))
            throw std::invalid_argument("grid: edges must be finite and strictly increasing");
    RadialGrid g;
    g.edges_ = std::move(edges);
    g.mid_.resize(g.edges_.size() - 1);
    for (std::size_t i = 0; i + 1 < g.edges_.size(); ++i)
        g.mid_[i] = 0.5 * (g.edges_[i] + g.edges_[i + 1]);
    return g;
}

double RadialGrid::min_width() const
{
    double w = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cells(); ++i)
        w = std::min(w, width(i));
    return w;
}

double RadialGrid::max_width() const
{
    double w = 0.0;
    for (int i = 0; i < cells(); ++i)
        w = std::max(w, width(i));
    return w;
}

int RadialGrid::locate(double r) const
{
    if (r < 0.0)
        return -1;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
    return static_cast<int>(it - edges_.begin()) - 1;
}

DepositTarget RadialGrid::deposit_target(double r) const
{
    DepositTarget t;
    if (r > r_max()) {
        t.overflow = true;
        return t;
    }
    const int n = cells();
    if (r <= mid_.front()) {
        t.lo = t.hi = 0;
        return t;
    }
    if (r >= mid_.back()) {
        t.lo = t.hi = n - 1;
        return t;
    }
    auto it = std::upper_bound(mid_.begin(), mid_.end(), r);
    const int k = static_cast<int>(it - mid_.begin()) - 1;
    const double a = mid_[k];
    const double b = mid_[k + 1];
    t.lo = k;
    t.hi = k + 1;
    t.w_hi = (r - a) / (b - a);
    t.w_lo = 1.0 - t.w_hi;
    if (t.w_hi == 0.0)
        t.hi = k;
    return t;
}

RadialMeasure::RadialMeasure(std::shared_ptr<const RadialGrid> grid)
    : cell_mass(grid->cells(), 0.0), grid_(std::move(grid))
{
}

RadialMeasure RadialMeasure::dirac_at_one(std::shared_ptr<const RadialGrid> grid)
{
    RadialMeasure m(std::move(grid));
    m.atom_at_1 = 1.0;
    return m;
}

double RadialMeasure::density_total() const
{
    double s = 0.0;
    for (double c : cell_mass)
        s += c;
    return s;
}

double RadialMeasure::total() const
{
    return atom_at_1 + atom_at_0 + density_total() + overflow;
}

void RadialMeasure::deposit(double r, double m)
{
    if (!(m >= 0.0))
        throw std::invalid_argument("deposit: mass must be nonnegative");
    const DepositTarget t = grid_->deposit_target(r);
    if (t.overflow) {
        overflow += m;
        return;
    }
    if (t.hi == t.lo) {
        cell_mass[t.lo] += m;
        return;
    }
    const double up = m * t.w_hi;
    cell_mass[t.hi] += up;
    cell_mass[t.lo] += m - up;
}

double RadialMeasure::window_mass(double eps) const
{
    const double a = std::sqrt(std::max(0.0, 1.0 - eps));
    const double b = std::sqrt(1.0 + eps);
    double s = atom_at_1;
    if (eps >= 1.0)
        s += atom_at_0;
    const auto& g = *grid_;
    const int i0 = std::max(0, g.locate(a));
    for (int i = i0; i < g.cells() && g.lo(i) < b; ++i) {
        if (cell_mass[i] == 0.0)
            continue;
        const double lo = std::max(a, g.lo(i));
        const double hi = std::min(b, g.hi(i));
        if (hi > lo)
            s += cell_mass[i] * (hi >= g.hi(i) && lo <= g.lo(i) ? 1.0 : (hi - lo) / g.width(i));
    }
    return s;
}

double RadialMeasure::first_moment() const
{
    double s = atom_at_1;
    const auto& mid = grid_->midpoints();
    for (std::size_t i = 0; i < cell_mass.size(); ++i)
        s += cell_mass[i] * mid[i];
    return s + overflow * grid_->r_max();
}

std::optional<double> RadialMeasure::density_2d(Velocity v) const
{
    const double r = v.norm();
    if (r == 0.0)
        return 0.0;
    if (r == 1.0 && atom_at_1 > 0.0)
        return std::nullopt;
    const int i = grid_->locate(r);
    if (i < 0 || i >= grid_->cells())
        return 0.0;
    return cell_mass[i] / grid_->width(i) / (2.0 * std::numbers::pi * r);
}

RadialMeasure& RadialMeasure::operator+=(const RadialMeasure& o)
{
    if (!(*grid_ == *o.grid_))
        throw std::invalid_argument("grid mismatch");
    atom_at_1 += o.atom_at_1;
    atom_at_0 += o.atom_at_0;
    overflow += o.overflow;
    for (std::size_t i = 0; i < cell_mass.size(); ++i)
        cell_mass[i] += o.cell_mass[i];
    return *this;
}

RadialMeasure& RadialMeasure::operator*=(double s)
{
    atom_at_1 *= s;
    atom_at_0 *= s;
    overflow *= s;
    for (double& c : cell_mass)
        c *= s;
    return *this;
}

double wasserstein1(const RadialMeasure& a, const RadialMeasure& b)
{
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("wasserstein1: grid mismatch");
    if (std::abs(a.total() - b.total()) > 1e-8)
        throw std::invalid_argument("wasserstein1: total mass mismatch");
    const auto& g = a.grid();
    // D = F_a - F_b, linear inside each cell; atoms jump at edges 0 and 1.
    double d = a.atom_at_0 - b.atom_at_0;
    double s = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        if (g.lo(i) == 1.0)
            d += a.atom_at_1 - b.atom_at_1;
        const double d1 = d + a.cell_mass[i] - b.cell_mass[i];
        const double w = g.width(i);
        if ((d >= 0.0) == (d1 >= 0.0))
            s += 0.5 * w * std::abs(d + d1);
        else
            s += 0.5 * w * (d * d + d1 * d1) / (std::abs(d) + std::abs(d1));
        d = d1;
    }
    return s;
}

std::string format_real(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_snapshot(std::ostream& os, const RadialMeasure& m)
{
    const auto& g = m.grid();
    os << "kind,r_lo,r_hi,mass\n";
    os << "atom,1,1," << format_real(m.atom_at_1) << '\n';
    os << "atom,0,0," << format_real(m.atom_at_0) << '\n';
    for (int i = 0; i < g.cells(); ++i)
        os << "cell," << format_real(g.lo(i)) << ',' << format_real(g.hi(i)) << ','
           << format_real(m.cell_mass[i]) << '\n';
    os << "overflow," << format_real(g.r_max()) << ",inf," << format_real(m.overflow) << '\n';
}

RadialMeasure read_snapshot(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "kind,r_lo,r_hi,mass")
        throw std::invalid_argument("snapshot: missing header");
    double a1 = 0, a0 = 0, of = 0;
    std::vector<double> edges{0.0};
    std::vector<double> mass;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string kind, lo, hi, m;
        if (!std::getline(ss, kind, ',') || !std::getline(ss, lo, ',') || !std::getline(ss, hi, ',')
            || !std::getline(ss, m, ','))
            throw std::invalid_argument("snapshot: malformed line " + std::to_string(lineno));
        const double v = std::stod(m);
        if (kind == "atom") {
            (lo == "1" ? a1 : a0) = v;
        } else if (kind == "overflow") {
            of = v;
        } else if (kind == "cell") {
            if (std::stod(lo) != edges.back())
                throw std::invalid_argument("snapshot: cells not contiguous at line " + std::to_string(lineno));
            edges.push_back(std::stod(hi));
            mass.push_back(v);
        } else {
            throw std::invalid_argument("snapshot: unknown row kind '" + kind + "' at line " + std::to_string(lineno));
        }
    }
    auto grid = std::make_shared<const RadialGrid>(RadialGrid::from_edges(std::move(edges)));
    RadialMeasure out(grid);
    out.atom_at_1 = a1;
    out.atom_at_0 = a0;
    out.overflow = of;
    out.cell_mass = std::move(mass);
    return out;
}

} // namespace lbsoft
