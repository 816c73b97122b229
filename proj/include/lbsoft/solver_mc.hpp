// Exact event-driven simulation of independent radius-valued particles
// against the frozen background on the unit circle.
//
// Jump times come from thinning: candidate events arrive at the envelope
// rate Lambda * mass(env) / 2pi, each candidate draws alpha from the
// envelope and is kept with probability min(K, n) / env(alpha).  The kept
// events form a Poisson stream with the exact truncated rate, and the kept
// alpha has density proportional to min(K, n).

#pragma once

#include "lbsoft/cross_section.hpp"
#include "lbsoft/geometry.hpp"
#include "lbsoft/random.hpp"
#include "lbsoft/solver_det.hpp"

#include <cstdint>
#include <vector>

namespace lbsoft {

struct ParticleEnsemble
{
    std::vector<double> radii;
    std::vector<RandomStream> streams;
    std::vector<std::uint8_t> jumped;
    double clock = 0.0;
    std::uint64_t seed = 0;

    // N particles at r = 1 with streams derive(seed, i).
    static ParticleEnsemble at_circle(std::size_t N, std::uint64_t seed);
};

// Radius at t_end of a particle at radius r at time t.  `jumps`, if given,
// is incremented per accepted jump.  Throws NumericalError if the particle
// hits r = 0, or stays exactly at r = 1 after leaving the circle.
double advance_particle(double r, double t, double t_end, const ModelParams& params,
                        const AngularCrossSection& beta, RandomStream& stream, long long* jumps = nullptr);

struct SimulateOptions
{
    int workers = 1;
};

// Snapshots at each time: empirical law binned on the grid (each particle
// to the cell containing it, r = 1 to the atom), plus survivors = particles
// that never jumped.  Bitwise independent of the worker count.
Trajectory simulate(std::size_t N, const std::vector<double>& snapshot_times, const ModelParams& params,
                    const AngularCrossSection& beta, std::uint64_t seed,
                    std::shared_ptr<const RadialGrid> grid, const SimulateOptions& opt = {});

} // namespace lbsoft
