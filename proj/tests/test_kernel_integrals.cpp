#include "lbsoft/kernel_integrals.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace lbsoft;
using std::numbers::pi;

namespace {

ModelParams params(double n)
{
    ModelParams p;
    p.trunc_n = n;
    return p;
}

} // namespace

TEST_SUITE("kernel_integrals")
{
TEST_CASE("angular average at the origin is one")
{
    QuadratureSettings q;
    CHECK(angular_average(0.0, -0.5, q) == 1.0);
    CHECK(AngularAverageSeries(-0.5)(0.0) == 1.0);
    CHECK(AngularAverageSeries(-1.5)(0.0) == 1.0);
}

TEST_CASE("angular average matches the frozen oracle")
{
    QuadratureSettings q;
    q.rel_tol = 1e-12;
    const AngularAverageSeries h(-0.5);
    CHECK(h(0.5) == doctest::Approx(oracle::h_m05_at_half).epsilon(1e-13));
    CHECK(h(1.0) == doctest::Approx(oracle::h_m05_at_one).epsilon(1e-13));
    CHECK(h(1.5) == doctest::Approx(oracle::h_m05_at_1p5).epsilon(1e-13));
    CHECK(h(10.0) == doctest::Approx(oracle::h_m05_at_ten).epsilon(1e-13));
    CHECK(angular_average(1.0, -0.5, q) == doctest::Approx(oracle::h_m05_at_one).epsilon(1e-11));
    CHECK(angular_average(10.0, -0.5, q) == doctest::Approx(oracle::h_m05_at_ten).epsilon(1e-11));
    const AngularAverageSeries h75(-0.75);
    CHECK(h75(1.0) == doctest::Approx(oracle::h_m075_at_one).epsilon(1e-13));
    CHECK(h75(2.0) == doctest::Approx(oracle::h_m075_at_two).epsilon(1e-13));
}

TEST_CASE("frozen values agree with the live GSL oracle")
{
    CHECK(oracle::angular_average(1.5, -0.5) == doctest::Approx(oracle::h_m05_at_1p5).epsilon(1e-10));
    CHECK(oracle::angular_average_series(0.5, -0.5) == doctest::Approx(oracle::h_m05_at_half).epsilon(1e-12));
    CHECK(oracle::truncated_rate(1.0, -1.5, 100.0, 2.0) == doctest::Approx(oracle::rate_n100).epsilon(1e-10));
}

TEST_CASE("large-r asymptote")
{
    CHECK(AngularAverageSeries(-0.5)(10.0) == doctest::Approx(std::pow(10.0, -0.5)).epsilon(0.02));
}

TEST_CASE("series and quadrature agree across radii and exponents")
{
    QuadratureSettings q;
    q.rel_tol = 1e-11;
    for (double d : {-0.25, -0.5, -0.9, -1.5, -1.9}) {
        const AngularAverageSeries h(d);
        for (double r : {0.05, 0.4, 0.8, 0.97, 0.999, 1.001, 1.03, 1.4, 2.5, 7.0}) {
            const double ref = oracle::angular_average(r, d);
            CHECK(h(r) == doctest::Approx(ref).epsilon(1e-9));
            CHECK(angular_average(r, d, q) == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("inversion symmetry")
{
    const AngularAverageSeries h(-1.2);
    for (double r : {0.2, 0.7, 0.95})
        CHECK(h(1.0 / r) == doctest::Approx(std::pow(r, 1.2) * h(r)).epsilon(1e-13));
}

TEST_CASE("divergent at the circle for delta <= -1")
{
    QuadratureSettings q;
    CHECK(std::isinf(angular_average(1.0, -1.5, q)));
    CHECK(std::isinf(AngularAverageSeries(-1.5)(1.0)));
}

TEST_CASE("pair kernel forms agree")
{
    const AngularAverageSeries h(-1.5);
    for (auto [r, rho] : {std::pair{1.0, 2.0}, {3.0, 3.5}, {0.2, 0.21}})
        CHECK(pair_kernel_centred(h, 0.5 * (r + rho), rho - r) == doctest::Approx(pair_kernel(h, r, rho)).epsilon(1e-12));
    CHECK(pair_kernel(h, 2.0, 1.0) == pair_kernel(h, 1.0, 2.0));
}

TEST_CASE("truncated rate examples")
{
    QuadratureSettings q;
    CHECK(truncated_rate(0.0, params(5.0), 2.0, q) == doctest::Approx(2.0).epsilon(1e-14));
    const double r10 = truncated_rate(1.0, params(10.0), 2.0, q);
    const double r100 = truncated_rate(1.0, params(100.0), 2.0, q);
    const double r1000 = truncated_rate(1.0, params(1000.0), 2.0, q);
    const double r10000 = truncated_rate(1.0, params(10000.0), 2.0, q);
    CHECK(r10 < r100);
    CHECK(r100 < r1000);
    CHECK(r10 == doctest::Approx(oracle::rate_n10).epsilon(1e-10));
    CHECK(r100 == doctest::Approx(oracle::rate_n100).epsilon(1e-10));
    CHECK(r1000 == doctest::Approx(oracle::rate_n1000).epsilon(1e-10));
    CHECK(r10000 == doctest::Approx(oracle::rate_n10000).epsilon(1e-10));
    CHECK(truncated_rate(1.2, params(100.0), 2.0, q) == doctest::Approx(oracle::rate_n100_r1p2).epsilon(1e-10));
}

TEST_CASE("truncated rate matches the GSL oracle off the circle")
{
    QuadratureSettings q;
    for (double r : {0.3, 0.9, 0.99, 1.01, 1.1, 2.0, 3.9})
        for (double n : {3.0, 100.0, 10000.0})
            CHECK(truncated_rate(r, params(n), 2.0, q) == doctest::Approx(oracle::truncated_rate(r, -1.5, n, 2.0)).epsilon(1e-9));
}

TEST_CASE("rate is bounded in n away from the circle")
{
    QuadratureSettings q;
    const double a = truncated_rate(1.2, params(100.0), 2.0, q);
    const double b = truncated_rate(1.2, params(1e6), 2.0, q);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("kink angle solves K = n")
{
    for (double r : {0.98, 1.0, 1.02}) {
        const double a = kink_angle(r, -1.5, 100.0);
        REQUIRE(a > 0.0);
        CHECK(kernel_weight(r, a, -1.5) == doctest::Approx(100.0).epsilon(1e-12));
    }
    CHECK(kink_angle(2.0, -1.5, 100.0) == 0.0);
    CHECK(kink_angle(1.0, -1.5, 0.0) == pi);
}

TEST_CASE("alpha envelope dominates the truncated kernel")
{
    for (double r : {0.0, 0.3, 0.99, 1.0, 1.0 + 1e-6, 1.5, 3.0})
        for (double n : {1.0, 100.0, 1e4}) {
            const auto env = AlphaEnvelope::make(r, -1.5, n);
            for (int k = -400; k <= 400; ++k) {
                const double a = pi * k / 400.0;
                CHECK(env.value(a) >= kernel_weight(r, a, -1.5, n) * (1.0 - 1e-12));
            }
        }
}

TEST_CASE("sample_alpha: uniform at the origin")
{
    RandomStream s = RandomStream::derive(11, 0);
    const ModelParams p = params(100.0);
    const int N = 100000;
    std::vector<double> xs(N);
    for (auto& x : xs)
        x = sample_alpha(0.0, p, s);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < N; ++i) {
        const double F = (xs[i] + pi) / (2.0 * pi);
        ks = std::max({ks, std::abs(F - double(i) / N), std::abs(F - double(i + 1) / N)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("sample_alpha: symmetric and distributed as K")
{
    const ModelParams p = params(100.0);
    QuadratureSettings q;
    for (double r : {0.5, 1.0, 1.3}) {
        RandomStream s = RandomStream::derive(12, static_cast<std::uint64_t>(r * 10));
        const int N = 50000;
        int pos = 0, small = 0;
        const double cut = 0.3;
        for (int i = 0; i < N; ++i) {
            const double a = sample_alpha(r, p, s);
            pos += a > 0.0;
            small += std::abs(a) < cut;
        }
        CHECK(std::abs(pos - 0.5 * N) < 3.0 * std::sqrt(0.25 * N));
        const double total = integrate([&](double a) { return kernel_weight(r, a, -1.5, 100.0); }, 0.0, pi, q).value;
        const double part = integrate_panels([&](double a) { return kernel_weight(r, a, -1.5, 100.0); },
                                             {0.0, kink_angle(r, -1.5, 100.0), cut}, q)
                                .value;
        const double pr = part / total;
        CHECK(std::abs(double(small) / N - pr) < 4.0 * std::sqrt(pr * (1 - pr) / N));
    }
}

TEST_CASE("Riesz energy: atom is infinite")
{
    auto g = std::make_shared<const RadialGrid>(RadialGrid::make(GridSpec{}));
    CHECK(std::isinf(radial_riesz_energy(RadialMeasure::dirac_at_one(g), -1.5, QuadratureSettings{})));
}

namespace {

RadialMeasure uniform_on(std::shared_ptr<const RadialGrid> g, int first, int count, double mass)
{
    RadialMeasure m(g);
    for (int i = first; i < first + count; ++i)
        m.cell_mass[i] = mass / count;
    return m;
}

} // namespace

TEST_CASE("Riesz energy of uniform laws matches the brute-force oracle")
{
    std::vector<double> e;
    for (int i = 0; i <= 256; ++i)
        e.push_back(i / 64.0);
    auto g = std::make_shared<const RadialGrid>(RadialGrid::from_edges(e));
    QuadratureSettings q;
    const double a = radial_riesz_energy(uniform_on(g, 64, 64, 1.0), -1.5, q);
    CHECK(a == doctest::Approx(oracle::riesz_uniform_1_2).epsilon(1e-6));
    const double b = radial_riesz_energy(uniform_on(g, 192, 64, 1.0), -1.5, q);
    CHECK(b == doctest::Approx(oracle::riesz_uniform_3_4).epsilon(1e-6));
    RadialMeasure mix = uniform_on(g, 64, 64, 0.5);
    mix += uniform_on(g, 192, 64, 0.5);
    const double m = radial_riesz_energy(mix, -1.5, q);
    CHECK(m == doctest::Approx(oracle::riesz_mix).epsilon(1e-6));
    CHECK(m > 0.25 * a);
    CHECK(m > 0.25 * b);
}

TEST_CASE("Riesz self-cell")
{
    const AngularAverageSeries h(-1.5);
    QuadratureSettings q;
    CHECK(riesz_self_cell(h, 1.0, 2.0, q) == doctest::Approx(oracle::riesz_uniform_1_2).epsilon(1e-9));
    CHECK(riesz_self_cell(h, 3.0, 4.0, q) == doctest::Approx(oracle::riesz_uniform_3_4).epsilon(1e-9));
    CHECK(riesz_self_cell(h, 0.0, 1.0, q) == doctest::Approx(oracle::riesz_unit_from_origin).epsilon(1e-12));
    const double w = 1.0 / 128.0;
    CHECK(riesz_self_cell(h, 0.0, w, q) == doctest::Approx(std::pow(w, 0.5) * oracle::riesz_unit_from_origin).epsilon(1e-12));
    // Narrow cell at the circle.
    const double narrow = riesz_self_cell(h, 1.0, 1.0 + std::ldexp(1.0, -25), q);
    CHECK(std::isfinite(narrow));
    CHECK(narrow > 0.0);
}

TEST_CASE("Riesz energy ignores the overflow bucket")
{
    auto g = std::make_shared<const RadialGrid>(RadialGrid::make(GridSpec{}));
    RadialMeasure m = uniform_on(g, 10, 4, 1.0);
    const double e0 = radial_riesz_energy(m, -1.5, QuadratureSettings{});
    m.overflow = 0.5;
    CHECK(radial_riesz_energy(m, -1.5, QuadratureSettings{}) == e0);
}
}
