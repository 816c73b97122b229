#include "lbsoft/cross_section.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lbsoft {

namespace {

constexpr double half_pi = 0.5 * std::numbers::pi;

[[noreturn]] void reject(const std::string& field, const std::string& why)
{
    throw std::invalid_argument(field + ": " + why);
}

template <int N>
void push_gauss(std::vector<ThetaNode>& out, const BetaDensityPiece& p)
{
    using rule = boost::math::quadrature::gauss<double, N>;
    const double c = 0.5 * (p.lo + p.hi);
    const double h = 0.5 * (p.hi - p.lo);
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    // boost stores the nonnegative half of the symmetric rule.
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double wk = w[k] * h * p.value;
        if (x[k] == 0.0) {
            out.push_back({c, wk});
            out.push_back({-c, wk});
            continue;
        }
        for (double s : {-1.0, 1.0}) {
            out.push_back({c + s * h * x[k], wk});
            out.push_back({-(c + s * h * x[k]), wk});
        }
    }
}

} // namespace

AngularCrossSection AngularCrossSection::validate(const CrossSectionSpec& spec)
{
    AngularCrossSection out;
    double theta0 = half_pi;
    double half = 0.0;

    for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        const auto& a = spec.atoms[i];
        const std::string field = "beta.atoms[" + std::to_string(i) + "]";
        if (!std::isfinite(a.theta) || !std::isfinite(a.weight))
            reject(field, "non-finite entry");
        if (a.theta == 0.0)
            reject(field, "atom at theta = 0 is not allowed");
        if (std::abs(a.theta) > half_pi)
            reject(field, "theta outside [-pi/2, pi/2]");
        if (!(a.weight > 0.0))
            reject(field, "weight must be positive");
        // Symmetric by construction: a negative angle names the same mirrored pair.
        out.atoms_.push_back({std::abs(a.theta), a.weight});
        theta0 = std::min(theta0, std::abs(a.theta));
        half += a.weight;
    }

    for (std::size_t i = 0; i < spec.density.size(); ++i) {
        const auto& p = spec.density[i];
        const std::string field = "beta.density[" + std::to_string(i) + "]";
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !std::isfinite(p.value))
            reject(field, "non-finite entry");
        if (!(p.lo < p.hi))
            reject(field, "need lo < hi");
        if (p.lo <= 0.0)
            reject(field, "interval must stay away from theta = 0 (lo > 0)");
        if (p.hi > half_pi)
            reject(field, "interval exceeds pi/2");
        if (!(p.value >= 0.0))
            reject(field, "density must be nonnegative");
        if (p.value == 0.0)
            continue;
        out.density_.push_back(p);
        theta0 = std::min(theta0, p.lo);
        half += p.value * (p.hi - p.lo);
    }

    if (!(half > 0.0))
        reject("beta", "total mass must be positive");
    if (!std::isfinite(half))
        reject("beta", "total mass must be finite");

    double acc = 0.0;
    for (const auto& a : out.atoms_)
        out.cumulative_.push_back(acc += a.weight);
    for (const auto& p : out.density_)
        out.cumulative_.push_back(acc += p.value * (p.hi - p.lo));

    out.lambda_ = 2.0 * half;
    out.theta0_ = theta0;
    return out;
}

std::vector<ThetaNode> AngularCrossSection::theta_nodes(int nodes_per_piece) const
{
    std::vector<ThetaNode> out;
    for (const auto& a : atoms_) {
        out.push_back({a.theta, a.weight});
        out.push_back({-a.theta, a.weight});
    }
    for (const auto& p : density_) {
        switch (nodes_per_piece) {
        case 8: push_gauss<8>(out, p); break;
        case 16: push_gauss<16>(out, p); break;
        case 32: push_gauss<32>(out, p); break;
        case 64: push_gauss<64>(out, p); break;
        default:
            throw std::invalid_argument("beta.nodes_per_piece: supported values are 8, 16, 32, 64");
        }
    }
    return out;
}

double AngularCrossSection::sample_theta(RandomStream& stream) const
{
    const double half = cumulative_.back();
    const double u = stream.uniform() * half;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);

    double theta;
    if (k < atoms_.size()) {
        theta = atoms_[k].theta;
    } else {
        const auto& p = density_[k - atoms_.size()];
        theta = p.lo + stream.uniform() * (p.hi - p.lo);
    }
    return stream.uniform() < 0.5 ? theta : -theta;
}

} // namespace lbsoft
