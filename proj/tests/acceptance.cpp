// Acceptance harness: one PASS/FAIL line per criterion.
//
//   lbsoft_acceptance [criterion ...]     (default: all ten)

#include "lbsoft/config.hpp"
#include "lbsoft/diagnostics.hpp"
#include "lbsoft/kernel_integrals.hpp"
#include "lbsoft/runner.hpp"
#include "lbsoft/solver_det.hpp"
#include "lbsoft/solver_mc.hpp"

#include "oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lbsoft;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty())
            detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string num(double x, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Default experiment: gamma = -1.5, beta = {(pi/4, 1)}, n = 100, J = 24, T = 0.5.
struct Baseline
{
    ExperimentConfig cfg = ExperimentConfig::defaults();
    std::shared_ptr<const RadialGrid> grid = std::make_shared<const RadialGrid>(RadialGrid::make(cfg.grid));
    AngularCrossSection beta = AngularCrossSection::validate(cfg.beta);

    GeneratorMatrix generator(double n) const
    {
        ModelParams p = cfg.model;
        p.trunc_n = n;
        return assemble_generator(*grid, beta, p, cfg.quad, {1, cfg.beta_nodes_per_piece, {}});
    }
};

const Baseline& baseline()
{
    static const Baseline b;
    return b;
}

const GeneratorMatrix& generator100()
{
    static const GeneratorMatrix Q = baseline().generator(100.0);
    return Q;
}

const Trajectory& det_trajectory()
{
    static const Trajectory traj = [] {
        const auto& b = baseline();
        return evolve(RadialMeasure::dirac_at_one(b.grid), generator100(), b.cfg.solver_dt, b.cfg.snapshot_times,
                      b.cfg.model.positivity_factor);
    }();
    return traj;
}

// 1. Conservation and positivity of the deterministic run.
Outcome conservation()
{
    Stopwatch sw;
    const auto& b = baseline();
    EvolveStats st;
    const auto traj = evolve(RadialMeasure::dirac_at_one(b.grid), b.generator(b.cfg.model.trunc_n), b.cfg.solver_dt,
                             b.cfg.snapshot_times, b.cfg.model.positivity_factor, &st);
    double drift = 0.0, low = 0.0;
    for (const auto& s : traj) {
        drift = std::max(drift, std::abs(s.lambda.total() - 1.0));
        low = std::min({low, s.lambda.atom_at_1, s.lambda.atom_at_0, s.lambda.overflow});
        for (double m : s.lambda.cell_mass)
            low = std::min(low, m);
    }
    const double secs = sw.seconds();
    Outcome o;
    o.require(drift <= 1e-10, "max |mass - 1| = " + num(drift));
    o.require(low >= -1e-15, "min component = " + num(low));
    o.require(traj.size() == b.cfg.snapshot_times.size(), std::to_string(traj.size()) + " snapshots");
    o.require(secs <= 60.0, "runtime " + num(secs, 3) + " s");
    return o;
}

// 2. Atom decay law: Richardson-extrapolated deterministic atom mass and MC survivors.
Outcome atom_decay()
{
    Stopwatch sw;
    const auto& b = baseline();
    const auto& Q = generator100();
    const double R = oracle::rate_n100;
    const auto& times = b.cfg.snapshot_times;
    const double spacing = 0.025;

    // Three step sizes h, h/2, h/4 that divide the snapshot spacing; Euler is first order.
    std::vector<std::vector<double>> p;
    for (int m : {8, 16, 32}) {
        const auto traj = evolve(RadialMeasure::dirac_at_one(b.grid), Q, spacing / m, times, b.cfg.model.positivity_factor);
        std::vector<double> atom;
        for (const auto& s : traj)
            atom.push_back(s.lambda.atom_at_1);
        p.push_back(std::move(atom));
    }
    double err = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double r1 = 2.0 * p[1][k] - p[0][k];
        const double r2 = 2.0 * p[2][k] - p[1][k];
        const double rich = (4.0 * r2 - r1) / 3.0;
        err = std::max(err, std::abs(rich - std::exp(-R * times[k])));
    }

    const std::size_t N = 100000;
    const auto mc = simulate(N, times, b.cfg.model, b.beta, b.cfg.seed, b.grid);
    double worst = 0.0;
    for (const auto& s : mc) {
        const double q = std::exp(-R * s.t);
        const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(N));
        const double dev = std::abs(static_cast<double>(s.survivors) / static_cast<double>(N) - q);
        worst = std::max(worst, sigma > 0.0 ? dev / sigma : (dev > 0.0 ? INFINITY : 0.0));
    }
    const double secs = sw.seconds();
    Outcome o;
    o.require(std::abs(Q.out_rate[0] - R) <= 1e-8 * R, "generator atom rate " + num(Q.out_rate[0], 14) + " vs oracle "
                                                        + num(R, 14));
    o.require(err <= 1e-6, "Richardson |p - exp(-R t)| = " + num(err));
    o.require(worst <= 3.0, "MC survivors max deviation " + num(worst, 3) + " sigma");
    o.require(secs <= 120.0, "runtime " + num(secs, 3) + " s");
    return o;
}

// 3. Regularization trend over n.
Outcome regularization_trend()
{
    const auto& b = baseline();
    const std::vector<double> ns{100.0, 1000.0, 10000.0};
    const std::vector<double> frozen{oracle::rate_n100, oracle::rate_n1000, oracle::rate_n10000};
    const double T = b.cfg.model.horizon_T;
    std::vector<double> R, lhs;
    Outcome o;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        ModelParams p = b.cfg.model;
        p.trunc_n = ns[k];
        R.push_back(truncated_rate(1.0, p, b.beta.total_mass(), b.cfg.quad));
        lhs.push_back((1.0 - std::exp(-R.back() * T)) / R.back());
        o.require(std::abs(R.back() - frozen[k]) <= 1e-8 * frozen[k], "R_" + num(ns[k]) + "(1) = " + num(R.back(), 10));
    }
    o.require(lhs[0] > lhs[1] && lhs[1] > lhs[2], "int p = " + num(lhs[0]) + ", " + num(lhs[1]) + ", " + num(lhs[2]));
    const double ratio = lhs[2] / lhs[0];
    o.require(ratio < 1e-2, "ratio n=1e4 / n=1e2 = " + num(ratio) + " (required < 1e-2)");
    const double g = b.cfg.model.gamma;
    const auto fit = fit_loglog("rate", ns, R);
    const double want = (g + 1.0) / g;
    o.require(std::abs(fit.value - want) <= 0.1 * want, "R_n(1) exponent " + num(fit.value) + " vs " + num(want));
    return o;
}

// 4. Window functional scalings.
Outcome window_scalings()
{
    Stopwatch sw;
    const auto& b = baseline();
    const double g = b.cfg.model.gamma;
    RadialMeasure circle = RadialMeasure::dirac_at_one(b.grid);
    std::vector<double> ea, va, eb, vb;
    for (int k = 0; k <= 8; ++k) {
        ea.push_back(std::pow(10.0, -4.0 + 0.25 * k));
        va.push_back(a_eps_functional(circle, ea.back(), b.beta, b.cfg.model, b.cfg.quad));
        eb.push_back(std::pow(10.0, -5.0 + 0.25 * k));
        vb.push_back(b_eps_pointwise(1.2, eb.back(), b.beta, b.cfg.model, b.cfg.quad));
    }
    const auto fa = fit_loglog("a", ea, va);
    const auto fb = fit_loglog("b", eb, vb);
    const double secs = sw.seconds();
    Outcome o;
    o.require(std::abs(fa.value - (g + 1.0)) <= 0.05 * std::abs(g + 1.0),
              "A_eps slope " + num(fa.value) + " vs " + num(g + 1.0));
    o.require(std::abs(fb.value - 1.0) <= 0.1, "B_eps slope " + num(fb.value) + " vs 1");
    o.require(secs <= 60.0, "runtime " + num(secs, 3) + " s");
    return o;
}

// 5. Truncation rate of the operator defect.
Outcome truncation_rate()
{
    const auto& b = baseline();
    ExperimentConfig cfg = b.cfg;
    cfg.scan_phi = "abs";
    const auto rep = truncation_scan(LipschitzTest::parse("abs"), scan_radii(cfg), cfg.n_list, b.beta, cfg.model,
                                     cfg.quad);
    Outcome o;
    for (const auto& c : rep.checks)
        if (c.name.find("pointwise") != std::string::npos || c.name.find("slope") != std::string::npos)
            o.require(c.pass, c.name + ": " + c.detail);
    if (o.detail.empty())
        o.require(false, "scan report is missing its checks");
    return o;
}

// 6. Monte Carlo against the deterministic solver.
Outcome mc_vs_det()
{
    Stopwatch sw;
    const auto& b = baseline();
    const std::size_t N = 100000;
    const auto& det = det_trajectory();
    const auto mc = simulate(N, b.cfg.snapshot_times, b.cfg.model, b.beta, b.cfg.seed, b.grid);
    const double tol = 3.0 / std::sqrt(static_cast<double>(N)) + 2.0 * b.cfg.grid.background_h;
    double worst = 0.0;
    for (std::size_t k = 0; k < det.size(); ++k)
        worst = std::max(worst, wasserstein1(det[k].lambda, mc[k].lambda));
    const double secs = sw.seconds();
    Outcome o;
    o.require(worst <= tol, "max W1 = " + num(worst) + " vs 3/sqrt(N) + 2h = " + num(tol));
    o.require(secs <= 300.0, "runtime " + num(secs, 3) + " s");
    return o;
}

// 7. The angular average h_delta.
Outcome angular_average_checks()
{
    const auto& b = baseline();
    const double delta = b.cfg.model.gamma + 1.0;
    const AngularAverageSeries h(delta);
    const auto& grid = *b.grid;
    Outcome o;
    o.require(h(0.0) == 1.0 && angular_average(0.0, delta, b.cfg.quad) == 1.0, "h(0) = 1 exactly");

    double best = -1.0, arg = 0.0;
    for (double r : grid.edges()) {
        const double v = h(r);
        if (!std::isfinite(v)) {
            o.require(false, "h infinite at r = " + num(r, 17));
            return o;
        }
        if (v > best) {
            best = v;
            arg = r;
        }
    }
    for (double r : grid.midpoints())
        if (h(r) > best) {
            best = h(r);
            arg = r;
        }
    const int cell = std::min(grid.locate(arg), grid.cells() - 1);
    const int at_one = grid.locate(1.0);
    o.require(std::abs(cell - at_one) <= 1, "sup " + num(best, 10) + " at r = " + num(arg, 10));

    double worst = 0.0;
    QuadratureSettings tight = b.cfg.quad;
    tight.rel_tol = 1e-11;
    std::vector<double> radii;
    for (int i = 0; i < grid.cells(); i += 7)
        radii.push_back(grid.midpoints()[i]);
    for (double r : {0.5, 1.0, 1.5, 10.0})
        radii.push_back(r);
    for (double r : radii) {
        const double ref = oracle::angular_average(r, delta);
        worst = std::max({worst, std::abs(h(r) - ref) / ref, std::abs(angular_average(r, delta, tight) - ref) / ref});
    }
    o.require(worst <= 1e-8, "max relative deviation from oracle " + num(worst) + " over " + std::to_string(radii.size())
                                 + " radii");
    return o;
}

// 8. de la Vallee Poussin construction on random measures.
Outcome vallee_poussin_checks()
{
    const auto& b = baseline();
    const auto& grid = *b.grid;
    Outcome o;
    int ok = 0;
    std::string first_failure;
    for (int trial = 0; trial < 20; ++trial) {
        RandomStream s = RandomStream::derive(b.cfg.seed, 1000 + trial);
        RadialMeasure mu(b.grid);
        const int pieces = 1 + static_cast<int>(s.uniform() * 60);
        for (int k = 0; k < pieces; ++k) {
            // Half of the pieces sit in the refined cells around the circle.
            int cell;
            if (s.uniform() < 0.5) {
                const int one = grid.locate(1.0);
                const int off = static_cast<int>(s.uniform() * 50) - 25;
                cell = std::clamp(one + off, 0, grid.cells() - 1);
            } else {
                cell = static_cast<int>(s.uniform() * grid.cells());
            }
            mu.cell_mass[cell] += std::ldexp(s.uniform(), -static_cast<int>(s.uniform() * 10));
        }
        if (s.uniform() < 0.3)
            mu.atom_at_0 = s.uniform();
        if (s.uniform() < 0.2)
            mu.overflow = 1e-3 * s.uniform();
        try {
            const auto vp = vallee_poussin(mu);
            const auto rep = vallee_poussin_report(vp, "vp");
            if (rep.all_pass()) {
                ++ok;
            } else if (first_failure.empty()) {
                for (const auto& c : rep.checks)
                    if (!c.pass)
                        first_failure = "trial " + std::to_string(trial) + ": " + c.name + " " + c.detail;
            }
        } catch (const std::exception& e) {
            if (first_failure.empty())
                first_failure = "trial " + std::to_string(trial) + ": " + e.what();
        }
    }
    o.require(ok == 20, std::to_string(ok) + "/20 measures satisfy monotonicity, growth and the integral bound");
    if (!first_failure.empty())
        o.require(false, first_failure);
    return o;
}

// 9. Riesz energy: infinite on the circle, finite on the density part afterwards.
Outcome riesz_signature()
{
    const auto& b = baseline();
    const auto& traj = det_trajectory();
    const double g = b.cfg.model.gamma;
    Outcome o;
    o.require(std::isinf(radial_riesz_energy(RadialMeasure::dirac_at_one(b.grid), g, b.cfg.quad)),
              "delta_1 flagged infinite");
    for (double t : {0.1, 0.25, 0.5}) {
        const auto it = std::find_if(traj.begin(), traj.end(), [t](const Snapshot& s) { return std::abs(s.t - t) < 1e-12; });
        if (it == traj.end()) {
            o.require(false, "no snapshot at t = " + num(t));
            continue;
        }
        RadialMeasure dens = it->lambda;
        dens.atom_at_1 = 0.0;
        dens.atom_at_0 = 0.0;
        const double e = radial_riesz_energy(dens, g, b.cfg.quad);
        o.require(std::isfinite(e) && e > 0.0, "t = " + num(t) + ": " + num(e, 10));
    }
    return o;
}

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        files[e.path().filename().string()] = os.str();
    }
    return files;
}

// 10. Byte-identical artifacts across worker counts.
Outcome reproducibility()
{
    const fs::path root = fs::temp_directory_path() / "lbsoft_acceptance_repro";
    fs::remove_all(root);
    Outcome o;
    for (const std::string mode : {"det", "mc"}) {
        std::map<std::string, std::string> first;
        for (int workers : {1, 4, 8}) {
            ExperimentConfig cfg = baseline().cfg;
            cfg.mode = mode;
            cfg.output_dir = (root / (mode + "_w" + std::to_string(workers))).string();
            cfg.cache_dir = (root / ("cache_w" + std::to_string(workers))).string();
            std::ostringstream log;
            run_experiment(cfg, {workers}, log);
            auto files = read_dir(cfg.output_dir);
            if (workers == 1) {
                first = std::move(files);
                continue;
            }
            bool same = files.size() == first.size();
            std::string diff;
            for (const auto& [name, bytes] : first) {
                const auto it = files.find(name);
                if (it == files.end() || it->second != bytes) {
                    same = false;
                    diff = name;
                    break;
                }
            }
            o.require(same, mode + ": " + std::to_string(first.size()) + " files, workers 1 vs "
                                + std::to_string(workers) + (same ? " identical" : " differ in " + diff));
        }
    }
    fs::remove_all(root);
    return o;
}

struct Criterion
{
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {"conservation_positivity", conservation},
        {"atom_decay_law", atom_decay},
        {"regularization_trend", regularization_trend},
        {"window_scalings", window_scalings},
        {"truncation_rate", truncation_rate},
        {"mc_det_agreement", mc_vs_det},
        {"angular_average", angular_average_checks},
        {"vallee_poussin", vallee_poussin_checks},
        {"riesz_signature", riesz_signature},
        {"reproducibility", reproducibility},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(all.size())) {
            std::fprintf(stderr, "usage: %s [criterion 1..%zu ...]\n", argv[0], all.size());
            return 2;
        }
        which.push_back(k);
    }
    if (which.empty())
        for (int k = 1; k <= static_cast<int>(all.size()); ++k)
            which.push_back(k);

    int failed = 0;
    for (int k : which) {
        Outcome o;
        try {
            o = all[k - 1].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s c%d %s: %s\n", o.pass ? "PASS" : "FAIL", k, all[k - 1].name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
