#include "lbsoft/solver_mc.hpp"

#include "lbsoft/errors.hpp"
#include "lbsoft/kernel_integrals.hpp"

#include <algorithm>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace lbsoft {

ParticleEnsemble ParticleEnsemble::at_circle(std::size_t N, std::uint64_t seed)
{
    ParticleEnsemble e;
    e.seed = seed;
    e.radii.assign(N, 1.0);
    e.jumped.assign(N, 0);
    e.streams.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
        e.streams.push_back(RandomStream::derive(seed, i));
    return e;
}

double advance_particle(double r, double t, double t_end, const ModelParams& params,
                        const AngularCrossSection& beta, RandomStream& stream, long long* jumps)
{
    const double n = params.trunc_n;
    if (!(n > 0.0))
        return r;
    const double Lambda = beta.total_mass();
    for (;;) {
        const AlphaEnvelope env = AlphaEnvelope::make(r, params.gamma, n);
        t += stream.exponential(Lambda * env.mass / (2.0 * std::numbers::pi));
        if (t > t_end)
            return r;
        const double a = env.sample(stream);
        if (stream.uniform() * env.value(a) > kernel_weight(r, a, params.gamma, n))
            continue;
        const double theta = beta.sample_theta(stream);
        const double from = r;
        r = post_collision_radius(r, theta, a);
        if (jumps)
            ++*jumps;
        if (!(r > 0.0))
            throw NumericalError("advance_particle: particle reached r = 0 from r = " + format_real(from));
        if (from == 1.0 && r == 1.0)
            throw NumericalError("advance_particle: jump from the circle landed on the circle (alpha = "
                                 + format_real(a) + ")");
    }
}

namespace {

struct Counts
{
    std::vector<long long> cells;
    long long atom1 = 0, atom0 = 0, overflow = 0, survivors = 0;
};

} // namespace

Trajectory simulate(std::size_t N, const std::vector<double>& snapshot_times, const ModelParams& params,
                    const AngularCrossSection& beta, std::uint64_t seed,
                    std::shared_ptr<const RadialGrid> grid, const SimulateOptions& opt)
{
    if (N < 1)
        throw std::invalid_argument("simulate: N must be >= 1");
    ParticleEnsemble ens = ParticleEnsemble::at_circle(N, seed);
    const int C = grid->cells();
    const int workers = static_cast<int>(std::clamp<std::size_t>(opt.workers < 1 ? 1 : opt.workers, 1, N));

    Trajectory out;
    for (double t_end : snapshot_times) {
        if (t_end < ens.clock)
            throw std::invalid_argument("simulate: snapshot times must be nondecreasing and >= 0");
        std::vector<Counts> partial(workers);
        std::vector<std::exception_ptr> errors(workers);

        auto run = [&](int w) {
            Counts& c = partial[w];
            c.cells.assign(C, 0);
            const std::size_t lo = N * w / workers;
            const std::size_t hi = N * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    long long jumps = 0;
                    double& r = ens.radii[i];
                    r = advance_particle(r, ens.clock, t_end, params, beta, ens.streams[i], &jumps);
                    if (jumps > 0)
                        ens.jumped[i] = 1;
                    if (!ens.jumped[i])
                        ++c.survivors;
                    if (r == 1.0)
                        ++c.atom1;
                    else if (r == 0.0)
                        ++c.atom0;
                    else if (r > grid->r_max())
                        ++c.overflow;
                    else
                        ++c.cells[std::min(grid->locate(r), C - 1)];
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        };
        if (workers == 1) {
            run(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(run, w);
            for (auto& th : pool)
                th.join();
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);

        Counts total;
        total.cells.assign(C, 0);
        for (const auto& c : partial) {
            for (int i = 0; i < C; ++i)
                total.cells[i] += c.cells[i];
            total.atom1 += c.atom1;
            total.atom0 += c.atom0;
            total.overflow += c.overflow;
            total.survivors += c.survivors;
        }
        const double inv = 1.0 / static_cast<double>(N);
        Snapshot s{t_end, RadialMeasure(grid)};
        s.lambda.atom_at_1 = static_cast<double>(total.atom1) * inv;
        s.lambda.atom_at_0 = static_cast<double>(total.atom0) * inv;
        s.lambda.overflow = static_cast<double>(total.overflow) * inv;
        for (int i = 0; i < C; ++i)
            s.lambda.cell_mass[i] = static_cast<double>(total.cells[i]) * inv;
        s.survivors = total.survivors;
        out.push_back(std::move(s));
        ens.clock = t_end;
    }
    return out;
}

} // namespace lbsoft
