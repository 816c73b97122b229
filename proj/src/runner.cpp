#include "lbsoft/runner.hpp"

#include "lbsoft/digest.hpp"
#include "lbsoft/errors.hpp"
#include "lbsoft/kernel_integrals.hpp"
#include "lbsoft/solver_det.hpp"
#include "lbsoft/solver_mc.hpp"

#include <boost/version.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef LBSOFT_VERSION
#define LBSOFT_VERSION "0.0.0"
#endif

namespace lbsoft {

namespace fs = std::filesystem;

namespace {

constexpr const char* resolved_name = "resolved_config.conf";

struct Artifacts
{
    fs::path dir;
    std::map<std::string, std::string> digests;

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
        if (!os)
            throw ConfigError("output_dir: cannot write " + (dir / name).string());
        os << content;
        digests[name] = sha256_hex(content);
    }
};

std::string snapshot_name(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_t%.10g.csv", t);
    return buf;
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<double>& eps_grid, bool survivors)
{
    std::ostringstream os;
    os << "t,atom1_mass,atom0_mass,overflow,first_moment";
    for (std::size_t k = 0; k < eps_grid.size(); ++k)
        os << ",window_mass_eps" << k + 1;
    if (survivors)
        os << ",survivors";
    os << '\n';
    for (const auto& s : traj) {
        os << format_real(s.t) << ',' << format_real(s.lambda.atom_at_1) << ',' << format_real(s.lambda.atom_at_0)
           << ',' << format_real(s.lambda.overflow) << ',' << format_real(s.lambda.first_moment());
        for (double e : eps_grid)
            os << ',' << format_real(s.lambda.window_mass(e));
        if (survivors)
            os << ',' << s.survivors;
        os << '\n';
    }
    return os.str();
}

void write_trajectory(Artifacts& art, const Trajectory& traj, const ExperimentConfig& cfg, bool survivors)
{
    art.write("trajectory.csv", trajectory_csv(traj, cfg.eps_grid, survivors));
    for (const auto& s : traj) {
        std::ostringstream os;
        write_snapshot(os, s.lambda);
        art.write(snapshot_name(s.t), os.str());
    }
}

std::string grid_digest(const RadialGrid& g)
{
    Digest d;
    d.bytes("grid").reals(g.edges());
    return d.hex();
}

std::string beta_digest(const AngularCrossSection& b)
{
    Digest d;
    d.bytes("beta");
    for (const auto& a : b.atoms())
        d.bytes("atom").real(a.theta).real(a.weight);
    for (const auto& p : b.density())
        d.bytes("piece").real(p.lo).real(p.hi).real(p.value);
    return d.hex();
}

double sup_h(double delta, const QuadratureSettings& q, double* argmax)
{
    double best = 0.0, at = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double r = k / 100.0;
        const double v = angular_average(r, delta, q);
        if (v > best) {
            best = v;
            at = r;
        }
    }
    if (argmax)
        *argmax = at;
    return best;
}

RadialMeasure density_part(const RadialMeasure& m)
{
    RadialMeasure out = m;
    out.atom_at_1 = 0.0;
    out.atom_at_0 = 0.0;
    return out;
}

DiagnosticsReport det_report(const ExperimentConfig& cfg, const GeneratorMatrix& Q, const Trajectory& traj,
                             const EvolveStats& st, const AngularCrossSection& beta, const RadialGrid& grid)
{
    DiagnosticsReport rep;
    const double R = Q.rate_check[0];
    const double Lambda = beta.total_mass();
    const double h = cfg.grid.background_h;

    double drift = 0.0, low = 0.0, decay_err = 0.0, atom0 = 0.0;
    for (const auto& s : traj) {
        drift = std::max(drift, std::abs(s.lambda.total() - 1.0));
        low = std::min({low, s.lambda.atom_at_1, s.lambda.overflow,
                        *std::min_element(s.lambda.cell_mass.begin(), s.lambda.cell_mass.end())});
        decay_err = std::max(decay_err, std::abs(s.lambda.atom_at_1 - std::exp(-R * s.t)));
        atom0 = std::max(atom0, s.lambda.atom_at_0);
    }
    low = std::min(low, st.min_component);
    rep.constants.push_back({"truncated_rate_at_circle", R, "adaptive quadrature, n = " + format_real(cfg.model.trunc_n)});
    rep.constants.push_back({"generator_out_rate_at_circle", Q.out_rate[0], "fixed alpha rule"});
    rep.constants.push_back({"euler_dt", st.dt, "steps = " + std::to_string(st.steps)});
    rep.constants.push_back({"max_out_rate", Q.max_out_rate(), ""});
    rep.constants.push_back({"atom_decay_max_abs_error", decay_err, "|p(t) - exp(-R t)| at fixed dt"});
    rep.checks.push_back({"mass_conservation", drift <= 1e-10, "max |mass - 1| = " + format_real(drift)});
    rep.checks.push_back({"positivity", low >= -1e-15, "min component = " + format_real(low)});
    const double T = traj.back().t;
    const double euler_budget = R * R * st.dt * T + std::abs(Q.out_rate[0] - R) * T + 1e-12;
    rep.checks.push_back({"atom_decay_first_order_in_dt", decay_err <= euler_budget,
                          "error " + format_real(decay_err) + " vs R^2 dt T = " + format_real(euler_budget)});
    rep.checks.push_back({"no_mass_at_zero", atom0 == 0.0, "max atom_at_0 = " + format_real(atom0)});
    rep.checks.push_back({"overflow_below_1e-6", traj.back().lambda.overflow <= 1e-6,
                          "overflow at T = " + format_real(traj.back().lambda.overflow)});
    rep.checks.push_back({"generator_row_balance", Q.row_residual() < 1e-12,
                          "max residual = " + format_real(Q.row_residual())});

    double argmax = 0.0;
    const double M = sup_h(cfg.model.gamma + 1.0, cfg.quad, &argmax);
    rep.constants.push_back({"sup_h_gamma_plus_1", M, "argmax r = " + format_real(argmax)});
    bool moments = true, equicont = true;
    double worst_m = 0.0, worst_w = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double m1 = traj[k].lambda.first_moment();
        const double cap = 1.0 + Lambda * M * traj[k].t + 2.0 * h;
        moments = moments && m1 <= cap;
        worst_m = std::max(worst_m, m1 - (1.0 + Lambda * M * traj[k].t));
        if (k > 0) {
            const double w = wasserstein1(traj[k].lambda, traj[k - 1].lambda);
            const double dt = traj[k].t - traj[k - 1].t;
            equicont = equicont && w <= Lambda * M * dt + 2.0 * h;
            worst_w = std::max(worst_w, w / (Lambda * M * dt + 2.0 * h));
        }
    }
    rep.checks.push_back({"first_moment_growth", moments,
                          "max excess over 1 + Lambda M t = " + format_real(worst_m)});
    rep.checks.push_back({"time_equicontinuity_w1", equicont, "max W1 / (Lambda M dt + 2h) = " + format_real(worst_w)});

    rep.merge(ob1_report(traj, cfg.eps_grid, cfg.model, R, st.dt));
    (void)grid;
    return rep;
}

void write_report(Artifacts& art, DiagnosticsReport rep, const std::string& inputs)
{
    rep.inputs_digest = inputs;
    art.write("report.json", rep.to_json().dump(2) + "\n");
}

void write_manifest(Artifacts& art, const ExperimentConfig& cfg, const std::map<std::string, std::string>& digests)
{
    nlohmann::json j;
    j["tool"] = "lbsoft";
    j["version"] = LBSOFT_VERSION;
    j["mode"] = cfg.mode;
    j["versions"] = {{"lbsoft", LBSOFT_VERSION}, {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}};
    j["digests"] = digests;
    j["files"] = art.digests;
    std::ofstream os(art.dir / "manifest.json", std::ios::binary | std::ios::trunc);
    os << j.dump(2) << "\n";
}

} // namespace

RadialMeasure time_integrated_off_atom(const Trajectory& traj)
{
    RadialMeasure mu(traj.front().lambda.grid_ptr());
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double w = 0.5 * (traj[k].t - traj[k - 1].t);
        for (std::size_t j : {k - 1, k}) {
            RadialMeasure part = density_part(traj[j].lambda);
            part.atom_at_0 = traj[j].lambda.atom_at_0;
            part *= w;
            mu += part;
        }
    }
    return mu;
}

DiagnosticsReport kernel_report(const ExperimentConfig& cfg, const AngularCrossSection& beta)
{
    DiagnosticsReport rep;
    const double g = cfg.model.gamma;
    const double Lambda = beta.total_mass();
    const QuadratureSettings& q = cfg.quad;

    double argmax = 0.0;
    const double M = sup_h(g + 1.0, q, &argmax);
    rep.constants.push_back({"sup_h_gamma_plus_1", M, "over r = 0, 0.01, ..., 4"});
    rep.checks.push_back({"h_zero_is_one", angular_average(0.0, g + 1.0, q) == 1.0, "h_delta(0) = 1 exactly"});
    rep.checks.push_back({"h_sup_finite_near_circle", std::isfinite(M) && std::abs(argmax - 1.0) <= 0.01,
                          "sup " + format_real(M) + " at r = " + format_real(argmax)});

    std::vector<double> rates, lhs;
    const double T = cfg.model.horizon_T;
    for (double n : cfg.n_list) {
        ModelParams p = cfg.model;
        p.trunc_n = n;
        const double R = truncated_rate(1.0, p, Lambda, q);
        rates.push_back(R);
        lhs.push_back((1.0 - std::exp(-R * T)) / R);
    }
    rep.curves["rate_n"] = cfg.n_list;
    rep.curves["rate_at_circle"] = rates;
    rep.curves["atom_time_integral"] = lhs;
    if (cfg.n_list.size() >= 2) {
        ExponentFit fit = fit_loglog("rate_at_circle_growth", cfg.n_list, rates);
        const double theory = (g + 1.0) / g;
        rep.checks.push_back({"rate_growth_within_10pct", std::abs(fit.value - theory) <= 0.1 * theory,
                              "fitted " + format_real(fit.value) + " vs (gamma+1)/gamma = " + format_real(theory)});
        rep.exponent_fits.push_back(fit);
        bool dec = true;
        for (std::size_t k = 1; k < lhs.size(); ++k)
            dec = dec && lhs[k] < lhs[k - 1];
        const double ratio = lhs.back() / lhs.front();
        rep.checks.push_back({"atom_time_integral_decreasing", dec, "over n_list"});
        rep.checks.push_back({"atom_time_integral_ratio_below_1e-2", ratio <= 1e-2,
                              "last/first = " + format_real(ratio)});
        // Away from the circle the rate saturates once n exceeds |r-1|^gamma.
        std::vector<double> off;
        for (double n : cfg.n_list) {
            ModelParams p = cfg.model;
            p.trunc_n = n;
            off.push_back(truncated_rate(1.2, p, Lambda, q));
        }
        const double spread = std::abs(off.back() - off.front()) / off.front();
        rep.checks.push_back({"rate_bounded_off_circle", spread <= 1e-8,
                              "relative spread of R_n(1.2) = " + format_real(spread)});
    }
    return rep;
}

DiagnosticsReport window_report(const ExperimentConfig& cfg, const AngularCrossSection& beta)
{
    DiagnosticsReport rep;
    const QuadratureSettings& q = cfg.quad;
    const double g = cfg.model.gamma;

    const std::vector<double> ea{1e-2, 1e-3, 1e-4};
    std::vector<double> av;
    double c0 = std::numeric_limits<double>::infinity();
    for (double e : ea) {
        av.push_back(a_eps_pointwise(1.0, e, beta, cfg.model, q));
        c0 = std::min(c0, av.back() / std::pow(e, g + 1.0));
    }
    ExponentFit fa = fit_loglog("a_eps_slope_at_circle", ea, av);
    rep.checks.push_back({"a_eps_slope_within_5pct", std::abs(fa.value - (g + 1.0)) <= 0.05 * std::abs(g + 1.0),
                          "fitted " + format_real(fa.value) + " vs gamma+1 = " + format_real(g + 1.0)});
    rep.exponent_fits.push_back(fa);
    rep.constants.push_back({"c0", c0, "min over eps of A_eps(1) / eps^(gamma+1)"});
    rep.checks.push_back({"a_eps_lower_bound_positive", c0 > 0.0, "c0 = " + format_real(c0)});
    rep.curves["a_eps_eps"] = ea;
    rep.curves["a_eps_values"] = av;

    const std::vector<double> eb{1e-3, 1e-4, 1e-5};
    std::vector<double> bv;
    for (double e : eb)
        bv.push_back(b_eps_pointwise(1.2, e, beta, cfg.model, q));
    ExponentFit fb = fit_loglog("b_eps_slope_off_circle", eb, bv);
    rep.checks.push_back({"b_eps_slope_within_10pct", std::abs(fb.value - 1.0) <= 0.1,
                          "fitted " + format_real(fb.value) + " vs 1"});
    rep.exponent_fits.push_back(fb);
    double c1 = 0.0;
    for (std::size_t k = 0; k < eb.size(); ++k)
        c1 = std::max(c1, bv[k] / (eb[k] * std::pow(std::abs(1.2 * 1.2 - 1.0), g)));
    rep.constants.push_back({"c1", c1, "max over eps of B_eps(1.2) / (eps |r^2-1|^gamma)"});
    rep.curves["b_eps_eps"] = eb;
    rep.curves["b_eps_values"] = bv;

    double c2 = 0.0;
    bool far_ok = true;
    const double far_bound = beta.total_mass() * std::pow(2.0, g);
    for (double e : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double v = b_eps_pointwise(3.0, e, beta, cfg.model, q);
        c2 = std::max(c2, v);
        far_ok = far_ok && v <= far_bound;
    }
    rep.constants.push_back({"c2", c2, "max over eps of B_eps(3)"});
    rep.checks.push_back({"b_eps_far_zone_bounded", far_ok,
                          "B_eps(3) <= Lambda |r-1|^gamma = " + format_real(far_bound)});
    return rep;
}

DiagnosticsReport riesz_report(const Trajectory& traj, double gamma, const QuadratureSettings& q)
{
    DiagnosticsReport rep;
    bool ok = true;
    std::vector<double> ts, es;
    for (const auto& s : traj) {
        const bool pick = s.t == 0.0 || s.t == 0.1 || s.t == 0.25 || s.t == 0.5 || &s == &traj.back();
        if (!pick)
            continue;
        // At t = 0 the law is the atom itself; later only its density part is examined.
        const double e = s.t == 0.0 ? radial_riesz_energy(s.lambda, gamma, q)
                                    : radial_riesz_energy(density_part(s.lambda), gamma, q);
        ts.push_back(s.t);
        es.push_back(e);
        ok = ok && (s.t == 0.0 ? std::isinf(e) : std::isfinite(e));
        rep.constants.push_back({"riesz_energy_t" + format_real(s.t), e, s.t == 0.0 ? "full law" : "density part"});
    }
    rep.curves["riesz_t"] = ts;
    rep.curves["riesz_energy"] = es;
    rep.checks.push_back({"riesz_infinite_at_start_finite_after", ok, "atom at t = 0, density part for t > 0"});
    return rep;
}

std::vector<double> scan_radii(const ExperimentConfig& cfg)
{
    std::vector<double> r_grid;
    for (long k = 0;; ++k) {
        const double r = static_cast<double>(k) * cfg.scan_r_step;
        if (r > cfg.grid.r_max)
            break;
        r_grid.push_back(r);
    }
    r_grid.push_back(1.0);
    // The defect lives on |r - 1| < n^{1/gamma}; resolve that band for every n.
    for (double n : cfg.n_list) {
        const double band = truncation_scale(n, cfg.model.gamma);
        for (int j = 1; j <= 32; ++j) {
            const double off = band * j / 32.0;
            for (double r : {1.0 - off, 1.0 + off})
                if (r >= 0.0 && r <= cfg.grid.r_max)
                    r_grid.push_back(r);
        }
    }
    std::sort(r_grid.begin(), r_grid.end());
    r_grid.erase(std::unique(r_grid.begin(), r_grid.end()), r_grid.end());
    return r_grid;
}

void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log)
{
    cfg.validate();
    Artifacts art;
    art.dir = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(art.dir, ec);
    if (ec)
        throw ConfigError("output_dir: cannot create " + cfg.output_dir + ": " + ec.message());

    const std::string resolved = cfg.resolved(false);
    art.write(resolved_name, resolved);
    const std::string inputs = sha256_hex(resolved);

    const AngularCrossSection beta = AngularCrossSection::validate(cfg.beta);
    auto grid = std::make_shared<const RadialGrid>(RadialGrid::make(cfg.grid));
    std::map<std::string, std::string> digests{
        {"config", inputs}, {"grid", grid_digest(*grid)}, {"beta", beta_digest(beta)}};

    DiagnosticsReport rep;
    if (cfg.mode == "det" || cfg.mode == "diagnose") {
        AssemblyOptions ao;
        ao.workers = opt.workers;
        ao.nodes_per_piece = cfg.beta_nodes_per_piece;
        ao.cache_dir = cfg.cache_dir;
        const GeneratorMatrix Q = assemble_generator(*grid, beta, cfg.model, cfg.quad, ao);
        for (const auto& w : Q.warnings)
            log << "warning: " << w << "\n";
        digests["generator"] = Q.digest;
        const double limit = cfg.model.positivity_factor / Q.max_out_rate();
        if (cfg.solver_dt > limit)
            throw ConfigError("solver.dt: " + format_real(cfg.solver_dt)
                              + " exceeds model.positivity_factor / max out-rate = " + format_real(limit));
        EvolveStats st;
        const Trajectory traj = evolve(RadialMeasure::dirac_at_one(grid), Q, cfg.solver_dt, cfg.snapshot_times,
                                       cfg.model.positivity_factor, &st);
        write_trajectory(art, traj, cfg, false);
        rep = det_report(cfg, Q, traj, st, beta, *grid);
        rep.merge(riesz_report(traj, cfg.model.gamma, cfg.quad));
        if (cfg.mode == "diagnose") {
            rep.merge(kernel_report(cfg, beta));
            rep.merge(window_report(cfg, beta));
            rep.merge(vallee_poussin_report(vallee_poussin(time_integrated_off_atom(traj)), "vp_time_integrated"));
        }
    } else if (cfg.mode == "mc") {
        SimulateOptions so;
        so.workers = opt.workers;
        const Trajectory traj = simulate(static_cast<std::size_t>(cfg.mc_N), cfg.snapshot_times, cfg.model, beta,
                                         cfg.seed, grid, so);
        write_trajectory(art, traj, cfg, true);
        const double R = truncated_rate(1.0, cfg.model, beta.total_mass(), cfg.quad);
        const double N = static_cast<double>(cfg.mc_N);
        const auto& last = traj.back();
        const double p = std::exp(-R * last.t);
        const double frac = static_cast<double>(last.survivors) / N;
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) / N);
        rep.constants.push_back({"truncated_rate_at_circle", R, "adaptive quadrature"});
        rep.constants.push_back({"survivor_fraction_at_T", frac, "N = " + std::to_string(cfg.mc_N)});
        rep.checks.push_back({"survivors_match_exponential_3sigma", std::abs(frac - p) <= 3.0 * sigma,
                              "|" + format_real(frac) + " - " + format_real(p) + "| vs 3 sigma = "
                                  + format_real(3.0 * sigma)});
        double drift = 0.0, atom0 = 0.0;
        for (const auto& s : traj) {
            drift = std::max(drift, std::abs(s.lambda.total() - 1.0));
            atom0 = std::max(atom0, s.lambda.atom_at_0);
        }
        rep.checks.push_back({"particle_count_conserved", drift <= 1e-12, "max |mass - 1| = " + format_real(drift)});
        rep.checks.push_back({"no_mass_at_zero", atom0 == 0.0, "max atom_at_0 = " + format_real(atom0)});
    } else {
        const LipschitzTest phi = LipschitzTest::parse(cfg.scan_phi);
        const std::vector<double> r_grid = scan_radii(cfg);
        rep = truncation_scan(phi, r_grid, cfg.n_list, beta, cfg.model, cfg.quad);
        std::ostringstream os;
        os << "r";
        for (double n : cfg.n_list)
            os << ",defect_n" << format_real(n) << ",bound_n" << format_real(n);
        os << '\n';
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            os << format_real(r_grid[i]);
            for (double n : cfg.n_list) {
                const auto& curve = rep.curves.at("scan_" + phi.name() + "_n" + format_real(n));
                os << ',' << format_real(curve[i]) << ','
                   << format_real(truncation_bound(r_grid[i], phi, n, beta, cfg.model, cfg.quad));
            }
            os << '\n';
        }
        art.write("scan.csv", os.str());
    }
    write_report(art, rep, inputs);
    write_manifest(art, cfg, digests);
    for (const auto& c : rep.checks)
        log << (c.pass ? "ok    " : "FAIL  ") << c.name << ": " << c.detail << "\n";
}

bool compare_runs(const fs::path& a, const fs::path& b, const CompareOptions& opt, std::ostream& out)
{
    auto read_cfg = [](const fs::path& d) {
        std::ifstream is(d / resolved_name);
        if (!is)
            throw ConfigError("compare: missing " + (d / resolved_name).string());
        std::stringstream ss;
        ss << is.rdbuf();
        return parse_config_text(ss.str(), (d / resolved_name).string());
    };
    const ExperimentConfig ca = read_cfg(a);
    const ExperimentConfig cb = read_cfg(b);
    double tol = opt.w1_tol;
    if (tol < 0.0) {
        tol = 2.0 * std::max(ca.grid.background_h, cb.grid.background_h);
        for (const auto* c : {&ca, &cb})
            if (c->mode == "mc")
                tol += 3.0 / std::sqrt(static_cast<double>(c->mc_N));
    }

    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) {
        const std::string n = e.path().filename().string();
        if (n.rfind("snapshot_t", 0) == 0 && e.path().extension() == ".csv")
            names.push_back(n);
    }
    auto time_of = [](const std::string& n) { return std::stod(n.substr(10, n.size() - 14)); };
    std::sort(names.begin(), names.end(),
              [&](const std::string& x, const std::string& y) { return time_of(x) < time_of(y); });
    if (names.empty())
        throw ConfigError("compare: no snapshots in " + a.string());

    auto load = [](const fs::path& p) {
        std::ifstream is(p);
        if (!is)
            throw ConfigError("compare: missing " + p.string());
        return read_snapshot(is);
    };
    bool pass = true;
    out << "snapshot,w1,atom1_delta,tolerance,pass\n";
    for (const auto& n : names) {
        const RadialMeasure ma = load(a / n);
        const RadialMeasure mb = load(b / n);
        if (!(ma.grid() == mb.grid()))
            throw ConfigError("compare: grid mismatch in " + n);
        const double w = wasserstein1(ma, mb);
        const bool ok = w <= tol;
        pass = pass && ok;
        out << n << ',' << format_real(w) << ',' << format_real(ma.atom_at_1 - mb.atom_at_1) << ','
            << format_real(tol) << ',' << (ok ? "yes" : "no") << '\n';
    }
    return pass;
}

} // namespace lbsoft
