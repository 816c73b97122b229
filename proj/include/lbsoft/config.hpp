// Flat `key = value` experiment configuration with dotted keys.
//
// Values are JSON scalars or arrays (`beta.atoms = [[0.785, 1.0]]`); string
// keys also accept bare words.  `#` starts a comment.  Unknown keys, bad
// values and failed validation raise ConfigError naming the line or key.

#pragma once

#include "lbsoft/cross_section.hpp"
#include "lbsoft/geometry.hpp"
#include "lbsoft/quadrature.hpp"
#include "lbsoft/radial_measure.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lbsoft {

struct ExperimentConfig
{
    std::string mode = "det";  // det | mc | diagnose | scan
    ModelParams model;
    QuadratureSettings quad;
    CrossSectionSpec beta;
    int beta_nodes_per_piece = 32;
    GridSpec grid;
    double solver_dt = 0.0;    // 0: positivity_factor / max out-rate
    long long mc_N = 100000;
    std::vector<double> snapshot_times;
    std::vector<double> eps_grid;
    std::vector<double> n_list;
    std::string scan_phi = "abs";
    double scan_r_step = 0.01;
    std::uint64_t seed = 12345;
    std::string output_dir = "out";
    std::string cache_dir = ".lbsoft-cache";

    static ExperimentConfig defaults();

    // Applies one assignment; `where` prefixes error messages (e.g. "line 4").
    void set(const std::string& key, const std::string& value, const std::string& where);

    // Runs every module validator; failures become ConfigError.
    void validate() const;

    // Every key, sorted, one `key = value` per line; parsing it back yields
    // an identical configuration.  Without locations, output_dir and
    // cache.dir are left out so the text depends only on the experiment.
    std::string resolved(bool with_locations = true) const;

    static std::vector<std::string> keys();
};

// Reads the file (if `path` is non-empty), then applies `overrides` in
// order, then validates.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace lbsoft
