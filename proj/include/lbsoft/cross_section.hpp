// Angular cross section beta: a finite, even measure on [-pi/2, pi/2] \ {0}
// with a support gap around 0.  Only the positive half is stored; the
// negative half is its mirror image.

#pragma once

#include "lbsoft/random.hpp"

#include <span>
#include <vector>

namespace lbsoft {

struct BetaAtom
{
    double theta;   // in (0, pi/2]
    double weight;  // > 0, mass of each of the two mirrored atoms
};

struct BetaDensityPiece
{
    double lo;      // 0 < lo < hi <= pi/2
    double hi;
    double value;   // constant density on [lo,hi] (and on [-hi,-lo])
};

// Raw description as read from a config, prior to validation.
struct CrossSectionSpec
{
    std::vector<BetaAtom> atoms;
    std::vector<BetaDensityPiece> density;
};

// A signed angle with its quadrature/point weight.
struct ThetaNode
{
    double theta;
    double weight;
};

class AngularCrossSection
{
public:
    // Validates and builds; throws std::invalid_argument with a field name
    // ("beta.atoms[i]" / "beta.density[i]" / "beta") on failure.
    static AngularCrossSection validate(const CrossSectionSpec& spec);

    std::span<const BetaAtom> atoms() const { return atoms_; }
    std::span<const BetaDensityPiece> density() const { return density_; }

    // Total mass over both halves.
    double total_mass() const { return lambda_; }
    double theta0() const { return theta0_; }

    // beta([theta0, pi/2]), i.e. mass of the positive half.
    double half_mass() const { return 0.5 * lambda_; }

    // Signed nodes covering both halves: atoms exactly, density pieces by
    // Gauss-Legendre with `nodes_per_piece` nodes.  Weights sum to total_mass().
    std::vector<ThetaNode> theta_nodes(int nodes_per_piece = 32) const;

    // Draws theta ~ beta / Lambda (both signs).
    double sample_theta(RandomStream& stream) const;

private:
    std::vector<BetaAtom> atoms_;
    std::vector<BetaDensityPiece> density_;
    std::vector<double> cumulative_;  // cumulative half-masses over atoms then pieces
    double lambda_ = 0.0;
    double theta0_ = 0.0;
};

} // namespace lbsoft
