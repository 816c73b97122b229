// Experiment driver behind the `lbsoft` command line tool.

#pragma once

#include "lbsoft/config.hpp"
#include "lbsoft/diagnostics.hpp"

#include <filesystem>
#include <iosfwd>

namespace lbsoft {

struct RunOptions
{
    int workers = 1;  // runtime only; never part of the resolved config
};

// Runs cfg.mode and writes the artifact directory cfg.output_dir:
// resolved_config.conf, trajectory.csv, snapshot_t<time>.csv, report.json,
// manifest.json (scan mode writes scan.csv instead of trajectory and
// snapshots).  Throws ConfigError / NumericalError.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);

struct CompareOptions
{
    double w1_tol = -1.0;  // < 0: derive from the runs (2 h, plus 3/sqrt(N) per MC run)
};

// Per-snapshot W1 and atom deltas printed as CSV to `out`; returns true when
// every snapshot is within tolerance.  Throws ConfigError on grid mismatch
// or missing snapshots.
bool compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, const CompareOptions& opt,
                  std::ostream& out);

// Sections of the diagnose report, exposed for the acceptance harness.
DiagnosticsReport kernel_report(const ExperimentConfig& cfg, const AngularCrossSection& beta);
DiagnosticsReport window_report(const ExperimentConfig& cfg, const AngularCrossSection& beta);
DiagnosticsReport riesz_report(const Trajectory& traj, double gamma, const QuadratureSettings& q);

// Radii for scan mode: multiples of scan.r_step up to r_max, r = 1 exactly,
// and 32 points on each side of 1 across |r - 1| < n^{1/gamma} for every n.
std::vector<double> scan_radii(const ExperimentConfig& cfg);

// Time integral over the snapshots of the off-atom part of the law.
RadialMeasure time_integrated_off_atom(const Trajectory& traj);

} // namespace lbsoft
