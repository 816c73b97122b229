#include "lbsoft/radial_measure.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace lbsoft;

namespace {

std::shared_ptr<const RadialGrid> default_grid()
{
    static auto g = std::make_shared<const RadialGrid>(RadialGrid::make(GridSpec{}));
    return g;
}

// Spreads `mass` uniformly over [a, b]; a and b must be grid edges.
void fill_uniform(RadialMeasure& m, double a, double b, double mass)
{
    const auto& g = m.grid();
    for (int i = 0; i < g.cells(); ++i)
        if (g.lo(i) >= a && g.hi(i) <= b)
            m.cell_mass[i] += mass * g.width(i) / (b - a);
}

} // namespace

TEST_SUITE("radial_measure")
{
TEST_CASE("grid layout")
{
    const auto& g = *default_grid();
    CHECK(g.edges().front() == 0.0);
    CHECK(g.r_max() == 4.0);
    CHECK(g.max_width() == doctest::Approx(1.0 / 128.0));
    CHECK(g.min_width() == doctest::Approx(std::ldexp(0.5, -24)));
    const int k = g.locate(1.0);
    CHECK(g.lo(k) == 1.0);
    CHECK(g.locate(0.0) == 0);
    for (int i = 0; i < g.cells(); ++i)
        REQUIRE(g.width(i) > 0.0);
}

TEST_CASE("grid parameter validation")
{
    GridSpec s;
    s.levels = -1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = GridSpec{};
    s.r_max = 0.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("window mass examples")
{
    auto g = default_grid();
    CHECK(RadialMeasure::dirac_at_one(g).window_mass(0.5) == 1.0);
    RadialMeasure u(g);
    fill_uniform(u, 0.0, 0.5, 1.0);
    CHECK(u.window_mass(0.5) == 0.0);
    RadialMeasure mix(g);
    mix.atom_at_1 = 0.4;
    fill_uniform(mix, 2.0, 3.0, 0.6);
    CHECK(mix.window_mass(0.1) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("deposit examples")
{
    auto g = default_grid();
    RadialMeasure m(g);
    const int i = g->locate(2.3);
    m.deposit(g->midpoints()[i], 1.0);
    CHECK(m.cell_mass[i] == 1.0);

    RadialMeasure h(g);
    h.deposit(2.5, 1.0);
    const int j = g->locate(2.5);
    CHECK(h.cell_mass[j - 1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(h.cell_mass[j] == doctest::Approx(0.5).epsilon(1e-12));

    RadialMeasure o(g);
    o.deposit(g->r_max() + 1.0, 0.3);
    CHECK(o.overflow == 0.3);
    CHECK(o.density_total() == 0.0);
}

TEST_CASE("deposit preserves mass and mean")
{
    auto g = default_grid();
    for (double r : {0.001, 0.3, 0.999, 1.0 + 1e-9, 1.2, 2.71, 3.999}) {
        RadialMeasure m(g);
        m.deposit(r, 2.0);
        CHECK(m.total() == doctest::Approx(2.0).epsilon(1e-15));
        double mean = 0.0;
        for (int i = 0; i < g->cells(); ++i)
            mean += m.cell_mass[i] * g->midpoints()[i];
        if (r > g->midpoints().front() && r < g->midpoints().back())
            CHECK(mean == doctest::Approx(2.0 * r).epsilon(1e-12));
    }
}

TEST_CASE("wasserstein examples")
{
    auto g = default_grid();
    RadialMeasure one = RadialMeasure::dirac_at_one(g);
    RadialMeasure two(g);
    two.deposit(2.0, 1.0);
    CHECK(wasserstein1(one, two) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(wasserstein1(one, one) == 0.0);
    CHECK(wasserstein1(two, two) == 0.0);

    RadialMeasure u(g);
    fill_uniform(u, 0.0, 1.0, 1.0);
    RadialMeasure half(g);
    half.deposit(0.5, 1.0);
    // The deposit at 0.5 is a uniform law on [0.5 - h, 0.5 + h].
    const double h = 1.0 / 128.0;
    CHECK(wasserstein1(u, half) == doctest::Approx(0.25 - 0.5 * h).epsilon(1e-12));
}

TEST_CASE("wasserstein is symmetric and satisfies the triangle inequality")
{
    auto g = default_grid();
    RadialMeasure a(g), b(g), c(g);
    fill_uniform(a, 0.5, 1.0, 1.0);
    b.atom_at_1 = 0.5;
    fill_uniform(b, 1.5, 2.0, 0.5);
    c.deposit(3.3, 1.0);
    CHECK(wasserstein1(a, b) == doctest::Approx(wasserstein1(b, a)).epsilon(1e-15));
    CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-14);
    CHECK(wasserstein1(a, b) == doctest::Approx(0.5 * 0.25 + 0.5 * 1.0).epsilon(1e-12));
}

TEST_CASE("density in the plane")
{
    auto g = default_grid();
    RadialMeasure m(g);
    const double c = 0.8;
    fill_uniform(m, 1.0, 2.0, c);
    const auto d = m.density_2d({1.5, 0.0});
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(c / (3.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(*m.density_2d({0.0, 0.0}) == 0.0);
    CHECK_FALSE(RadialMeasure::dirac_at_one(g).density_2d({0.0, 1.0}).has_value());
}

TEST_CASE("first moment places overflow at r_max")
{
    auto g = default_grid();
    RadialMeasure m(g);
    m.atom_at_1 = 0.5;
    m.overflow = 0.5;
    CHECK(m.first_moment() == doctest::Approx(0.5 + 0.5 * 4.0));
}

TEST_CASE("snapshot round trip is exact")
{
    auto g = default_grid();
    RadialMeasure m(g);
    m.atom_at_1 = 0.125;
    m.overflow = 1e-30;
    m.deposit(1.0 + 1e-7, 0.3);
    m.deposit(0.1234567890123, 0.575);
    std::ostringstream os;
    write_snapshot(os, m);
    std::istringstream is(os.str());
    const RadialMeasure back = read_snapshot(is);
    CHECK(back.grid() == m.grid());
    CHECK(back.atom_at_1 == m.atom_at_1);
    CHECK(back.overflow == m.overflow);
    CHECK(back.cell_mass == m.cell_mass);
    std::ostringstream again;
    write_snapshot(again, back);
    CHECK(again.str() == os.str());
}

TEST_CASE("real formatting")
{
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(INFINITY) == "inf");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
}
