// Deterministic evolution of the radius law under the truncated radial
// generator.  States: 0 is the atom at r = 1, 1..C are grid cells (mass
// located at the midpoint), C+1 is the absorbing overflow bucket.

#pragma once

#include "lbsoft/cross_section.hpp"
#include "lbsoft/geometry.hpp"
#include "lbsoft/quadrature.hpp"
#include "lbsoft/radial_measure.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lbsoft {

struct SparseRows
{
    std::vector<std::size_t> ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }
};

struct GeneratorMatrix
{
    int states = 0;
    SparseRows rates;               // off-diagonal q(i -> j) >= 0, row = source
    SparseRows inflow;              // transpose of `rates`, row = target
    std::vector<double> out_rate;   // -diagonal; equals the row sum of `rates`
    std::vector<double> rate_check; // truncated_rate at each source radius
    int theta_nodes = 0;
    int alpha_nodes_max = 0;
    std::vector<std::string> warnings;
    std::string digest;             // content key, see generator_key

    double max_out_rate() const;
    // max_i |diagonal_i + sum_j q_ij| / max(1, out_rate_i)
    double row_residual() const;
};

struct AssemblyOptions
{
    int workers = 1;
    int nodes_per_piece = 32;
    std::filesystem::path cache_dir;  // empty: no caching
};

std::string generator_key(const RadialGrid& grid, const AngularCrossSection& beta, const ModelParams& params,
                          int nodes_per_piece);

// Throws NumericalError when the fixed alpha rule misses truncated_rate at a
// source by more than max(1e3 rel_tol, 1e-8) relative.
GeneratorMatrix assemble_generator(const RadialGrid& grid, const AngularCrossSection& beta,
                                   const ModelParams& params, const QuadratureSettings& q,
                                   const AssemblyOptions& opt = {});

// The fixed alpha rule on (0, pi) used for a source at radius r: nodes and
// weights for the positive half.
void alpha_rule(double r, double gamma, double n, std::vector<double>& nodes, std::vector<double>& weights);

struct Snapshot
{
    double t = 0.0;
    RadialMeasure lambda;
    long long survivors = -1;  // MC only
};

using Trajectory = std::vector<Snapshot>;

struct EvolveStats
{
    long long steps = 0;
    double dt = 0.0;
    double max_mass_drift = 0.0;
    double min_component = 0.0;
};

// Explicit Euler from lambda0 through the increasing record times (each
// segment split into ceil(span/dt) equal steps).  dt <= 0 selects
// positivity_factor / max_out_rate.  Throws std::invalid_argument when dt
// breaks the positivity rule and NumericalError on negativity below -1e-15
// or mass drift above 1e-8.
Trajectory evolve(const RadialMeasure& lambda0, const GeneratorMatrix& Q, double dt,
                  const std::vector<double>& record_times, double positivity_factor,
                  EvolveStats* stats = nullptr);

} // namespace lbsoft
