#include "lbsoft/kernel_integrals.hpp"
#include "lbsoft/solver_det.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace lbsoft;

namespace {

struct Setup
{
    std::shared_ptr<const RadialGrid> grid = std::make_shared<const RadialGrid>(RadialGrid::make(GridSpec{}));
    AngularCrossSection beta = AngularCrossSection::validate({{{std::numbers::pi / 4, 1.0}}, {}});
    ModelParams params;
    QuadratureSettings quad;
};

const GeneratorMatrix& default_generator()
{
    static const GeneratorMatrix Q = [] {
        Setup s;
        return assemble_generator(*s.grid, s.beta, s.params, s.quad);
    }();
    return Q;
}

std::vector<double> times(double T, int k)
{
    std::vector<double> t;
    for (int i = 0; i <= k; ++i)
        t.push_back(T * i / k);
    return t;
}

} // namespace

TEST_SUITE("solver_det")
{
TEST_CASE("zero truncation gives the zero generator")
{
    Setup s;
    s.params.trunc_n = 0.0;
    const auto Q = assemble_generator(*s.grid, s.beta, s.params, s.quad);
    CHECK(Q.rates.nnz() == 0);
    CHECK(Q.max_out_rate() == 0.0);
    const auto traj = evolve(RadialMeasure::dirac_at_one(s.grid), Q, 0.0, {0.0, 0.5}, 0.2);
    REQUIRE(traj.size() == 2);
    CHECK(traj.back().lambda.atom_at_1 == 1.0);
    CHECK(traj.back().lambda.cell_mass == traj.front().lambda.cell_mass);
}

TEST_CASE("atom out-rate matches the oracle")
{
    const auto& Q = default_generator();
    CHECK(Q.out_rate[0] == doctest::Approx(oracle::rate_n100).epsilon(1e-8));
    CHECK(Q.rate_check[0] == doctest::Approx(oracle::rate_n100).epsilon(1e-10));
}

TEST_CASE("generator structure")
{
    const auto& Q = default_generator();
    CHECK(Q.states == default_generator().states);
    CHECK(Q.row_residual() < 1e-12);
    CHECK(Q.warnings.empty());
    // Nothing flows into the circle atom, the overflow state never leaves.
    CHECK(Q.inflow.ptr[1] == Q.inflow.ptr[0]);
    CHECK(Q.out_rate[Q.states - 1] == 0.0);
    for (std::size_t p = 0; p < Q.rates.nnz(); ++p)
        REQUIRE(Q.rates.val[p] > 0.0);
    for (int i = 0; i < Q.states; ++i)
        for (std::size_t p = Q.rates.ptr[i]; p < Q.rates.ptr[i + 1]; ++p)
            REQUIRE(Q.rates.col[p] != i);
    CHECK(Q.rates.nnz() == Q.inflow.nnz());
}

TEST_CASE("assembly is independent of worker count and round-trips through the cache")
{
    Setup s;
    s.params.trunc_n = 50.0;
    GridSpec coarse;
    coarse.levels = 8;
    coarse.background_h = 1.0 / 32.0;
    const auto grid = RadialGrid::make(coarse);
    const auto dir = std::filesystem::temp_directory_path() / "lbsoft_test_cache";
    std::filesystem::remove_all(dir);
    const auto a = assemble_generator(grid, s.beta, s.params, s.quad, {1, 32, {}});
    const auto b = assemble_generator(grid, s.beta, s.params, s.quad, {3, 32, dir});
    const auto c = assemble_generator(grid, s.beta, s.params, s.quad, {2, 32, dir});
    for (const auto* m : {&b, &c}) {
        CHECK(m->rates.ptr == a.rates.ptr);
        CHECK(m->rates.col == a.rates.col);
        CHECK(m->rates.val == a.rates.val);
        CHECK(m->out_rate == a.out_rate);
        CHECK(m->digest == a.digest);
    }
    CHECK(std::filesystem::exists(dir / (a.digest + ".bin")));
    std::filesystem::remove_all(dir);
    const auto dens = AngularCrossSection::validate({{}, {{0.3, 1.2, 1.0}}});
    CHECK(generator_key(grid, dens, s.params, 32) != generator_key(grid, dens, s.params, 16));
    CHECK(generator_key(grid, s.beta, s.params, 32) == generator_key(grid, s.beta, s.params, 16));
}

TEST_CASE("alpha rule integrates the truncated kernel")
{
    QuadratureSettings q;
    ModelParams p;
    for (double r : {0.0, 0.5, 1.0, 1.0 + 1e-6, 1.3}) {
        std::vector<double> x, w;
        alpha_rule(r, p.gamma, p.trunc_n, x, w);
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            s += w[k] * kernel_weight(r, x[k], p.gamma, p.trunc_n);
        CHECK(2.0 * s / std::numbers::pi == doctest::Approx(truncated_rate(r, p, 2.0, q)).epsilon(1e-9));
    }
}

TEST_CASE("evolution conserves mass and stays nonnegative")
{
    Setup s;
    EvolveStats st;
    const auto traj = evolve(RadialMeasure::dirac_at_one(s.grid), default_generator(), 0.0, times(0.5, 20), 0.2, &st);
    CHECK(st.max_mass_drift <= 1e-10);
    CHECK(st.min_component >= -1e-15);
    for (const auto& snap : traj) {
        CHECK(std::abs(snap.lambda.total() - 1.0) <= 1e-10);
        CHECK(snap.lambda.atom_at_0 == 0.0);
    }
    CHECK(traj.back().lambda.overflow < 1e-6);
}

TEST_CASE("atom mass is the discrete exponential")
{
    Setup s;
    const auto& Q = default_generator();
    const double dt = 0.025 / 8;
    const auto traj = evolve(RadialMeasure::dirac_at_one(s.grid), Q, dt, times(0.5, 20), 0.2);
    for (const auto& snap : traj) {
        const double steps = std::round(snap.t / dt);
        CHECK(snap.lambda.atom_at_1 == doctest::Approx(std::pow(1.0 - dt * Q.out_rate[0], steps)).epsilon(1e-12));
    }
}

TEST_CASE("step size above the positivity limit is rejected")
{
    Setup s;
    CHECK_THROWS_AS(evolve(RadialMeasure::dirac_at_one(s.grid), default_generator(), 1.0, {0.0, 1.0}, 0.2),
                    std::invalid_argument);
}
}
