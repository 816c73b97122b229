#include "lbsoft/config.hpp"

#include "lbsoft/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lbsoft {

namespace {

using nlohmann::json;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

json parse_value(const std::string& key, const std::string& raw, const std::string& where)
{
    try {
        return json::parse(raw);
    } catch (const json::exception&) {
        throw ConfigError(where + ": " + key + ": cannot parse value '" + raw + "'");
    }
}

double as_real(const std::string& key, const json& v, const std::string& where)
{
    if (!v.is_number())
        throw ConfigError(where + ": " + key + ": expected a number");
    return v.get<double>();
}

long long as_integer(const std::string& key, const json& v, const std::string& where)
{
    if (!v.is_number_integer())
        throw ConfigError(where + ": " + key + ": expected an integer");
    return v.get<long long>();
}

std::vector<double> as_reals(const std::string& key, const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ConfigError(where + ": " + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v)
        out.push_back(as_real(key, x, where));
    return out;
}

std::vector<std::vector<double>> as_rows(const std::string& key, const json& v, std::size_t width,
                                         const std::string& where)
{
    if (!v.is_array())
        throw ConfigError(where + ": " + key + ": expected an array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto row = as_reals(key + "[" + std::to_string(i) + "]", v[i], where);
        if (row.size() != width)
            throw ConfigError(where + ": " + key + "[" + std::to_string(i) + "]: expected " + std::to_string(width)
                              + " entries");
        out.push_back(std::move(row));
    }
    return out;
}

std::string as_word(const std::string& raw)
{
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        return json::parse(raw).get<std::string>();
    return raw;
}

std::string reals_text(const std::vector<double>& xs)
{
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? ", " : "") + format_real(xs[i]);
    return s + "]";
}

} // namespace

ExperimentConfig ExperimentConfig::defaults()
{
    ExperimentConfig c;
    c.beta.atoms = {{0.78539816339744828, 1.0}};
    c.snapshot_times = {0,     0.025, 0.05,  0.075, 0.1,  0.125, 0.15,  0.175, 0.2,  0.225, 0.25,
                        0.275, 0.3,   0.325, 0.35,  0.375, 0.4, 0.425, 0.45,  0.475, 0.5};
    c.eps_grid = {0.01, 0.02, 0.05};
    c.n_list = {100, 1000, 10000};
    return c;
}

std::vector<std::string> ExperimentConfig::keys()
{
    return {"beta.atoms",         "beta.density",      "beta.nodes_per_piece", "cache.dir",
            "eps_grid",           "grid.background_h", "grid.eps_max",         "grid.levels",
            "grid.r_max",         "mc.N",              "mode",                 "model.gamma",
            "model.horizon_T",    "model.positivity_factor", "model.r0",       "model.trunc_n",
            "n_list",             "output_dir",        "quad.max_subdivisions", "quad.rel_tol",
            "quad.singular_split", "scan.phi",         "scan.r_step",          "seed",
            "snapshot_times",     "solver.dt"};
}

void ExperimentConfig::set(const std::string& key, const std::string& raw, const std::string& where)
{
    if (key == "mode") {
        mode = as_word(raw);
        return;
    }
    if (key == "output_dir") {
        output_dir = as_word(raw);
        return;
    }
    if (key == "cache.dir") {
        cache_dir = as_word(raw);
        return;
    }
    if (key == "scan.phi") {
        scan_phi = as_word(raw);
        return;
    }
    const json v = parse_value(key, raw, where);
    if (key == "model.gamma")
        model.gamma = as_real(key, v, where);
    else if (key == "model.trunc_n")
        model.trunc_n = as_real(key, v, where);
    else if (key == "model.r0")
        model.r0 = as_real(key, v, where);
    else if (key == "model.horizon_T")
        model.horizon_T = as_real(key, v, where);
    else if (key == "model.positivity_factor")
        model.positivity_factor = as_real(key, v, where);
    else if (key == "quad.rel_tol")
        model.quad_rel_tol = quad.rel_tol = as_real(key, v, where);
    else if (key == "quad.max_subdivisions")
        quad.max_subdivisions = static_cast<int>(as_integer(key, v, where));
    else if (key == "quad.singular_split")
        quad.singular_split = as_real(key, v, where);
    else if (key == "beta.atoms") {
        beta.atoms.clear();
        for (const auto& row : as_rows(key, v, 2, where))
            beta.atoms.push_back({row[0], row[1]});
    } else if (key == "beta.density") {
        beta.density.clear();
        for (const auto& row : as_rows(key, v, 3, where))
            beta.density.push_back({row[0], row[1], row[2]});
    } else if (key == "beta.nodes_per_piece")
        beta_nodes_per_piece = static_cast<int>(as_integer(key, v, where));
    else if (key == "grid.levels")
        grid.levels = static_cast<int>(as_integer(key, v, where));
    else if (key == "grid.eps_max")
        grid.eps_max = as_real(key, v, where);
    else if (key == "grid.background_h")
        grid.background_h = as_real(key, v, where);
    else if (key == "grid.r_max")
        grid.r_max = as_real(key, v, where);
    else if (key == "solver.dt")
        solver_dt = as_real(key, v, where);
    else if (key == "mc.N")
        mc_N = as_integer(key, v, where);
    else if (key == "snapshot_times")
        snapshot_times = as_reals(key, v, where);
    else if (key == "eps_grid")
        eps_grid = as_reals(key, v, where);
    else if (key == "n_list")
        n_list = as_reals(key, v, where);
    else if (key == "scan.r_step")
        scan_r_step = as_real(key, v, where);
    else if (key == "seed") {
        if (!v.is_number_unsigned())
            throw ConfigError(where + ": seed: expected a nonnegative integer");
        seed = v.get<std::uint64_t>();
    } else
        throw ConfigError(where + ": unknown key '" + key + "'");
}

void ExperimentConfig::validate() const
{
    try {
        model.validate();
        quad.validate();
        grid.validate();
        AngularCrossSection::validate(beta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (mode != "det" && mode != "mc" && mode != "diagnose" && mode != "scan")
        throw ConfigError("mode: expected det, mc, diagnose or scan, got '" + mode + "'");
    if (beta_nodes_per_piece != 8 && beta_nodes_per_piece != 16 && beta_nodes_per_piece != 32
        && beta_nodes_per_piece != 64)
        throw ConfigError("beta.nodes_per_piece: supported values are 8, 16, 32, 64");
    if (!(model.trunc_n > 0.0) && mode != "scan")
        throw ConfigError("model.trunc_n: must be positive for evolution runs");
    if (solver_dt < 0.0)
        throw ConfigError("solver.dt: must be >= 0 (0 selects the positivity rule)");
    if (mc_N < 1)
        throw ConfigError("mc.N: must be >= 1");
    if (snapshot_times.empty())
        throw ConfigError("snapshot_times: must not be empty");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        const double t = snapshot_times[i];
        if (!(t >= 0.0) || t > model.horizon_T || (i > 0 && !(t > snapshot_times[i - 1])))
            throw ConfigError("snapshot_times: must be strictly increasing within [0, model.horizon_T]");
    }
    for (double e : eps_grid)
        if (!(e > 0.0))
            throw ConfigError("eps_grid: entries must be positive");
    for (double n : n_list)
        if (!(n > 0.0))
            throw ConfigError("n_list: entries must be positive");
    if (!(scan_r_step > 0.0))
        throw ConfigError("scan.r_step: must be positive");
    if (scan_phi != "abs" && scan_phi != "coord" && scan_phi != "bump")
        throw ConfigError("scan.phi: expected abs, coord or bump, got '" + scan_phi + "'");
    if (output_dir.empty())
        throw ConfigError("output_dir: must not be empty");
}

std::string ExperimentConfig::resolved(bool with_locations) const
{
    std::map<std::string, std::string> kv;
    kv["mode"] = mode;
    kv["model.gamma"] = format_real(model.gamma);
    kv["model.trunc_n"] = format_real(model.trunc_n);
    kv["model.r0"] = format_real(model.r0);
    kv["model.horizon_T"] = format_real(model.horizon_T);
    kv["model.positivity_factor"] = format_real(model.positivity_factor);
    kv["quad.rel_tol"] = format_real(quad.rel_tol);
    kv["quad.max_subdivisions"] = std::to_string(quad.max_subdivisions);
    kv["quad.singular_split"] = format_real(quad.singular_split);
    std::string atoms = "[";
    for (std::size_t i = 0; i < beta.atoms.size(); ++i)
        atoms += (i ? ", " : "") + reals_text({beta.atoms[i].theta, beta.atoms[i].weight});
    kv["beta.atoms"] = atoms + "]";
    std::string dens = "[";
    for (std::size_t i = 0; i < beta.density.size(); ++i)
        dens += (i ? ", " : "") + reals_text({beta.density[i].lo, beta.density[i].hi, beta.density[i].value});
    kv["beta.density"] = dens + "]";
    kv["beta.nodes_per_piece"] = std::to_string(beta_nodes_per_piece);
    kv["grid.levels"] = std::to_string(grid.levels);
    kv["grid.eps_max"] = format_real(grid.eps_max);
    kv["grid.background_h"] = format_real(grid.background_h);
    kv["grid.r_max"] = format_real(grid.r_max);
    kv["solver.dt"] = format_real(solver_dt);
    kv["mc.N"] = std::to_string(mc_N);
    kv["snapshot_times"] = reals_text(snapshot_times);
    kv["eps_grid"] = reals_text(eps_grid);
    kv["n_list"] = reals_text(n_list);
    kv["scan.phi"] = scan_phi;
    kv["scan.r_step"] = format_real(scan_r_step);
    kv["seed"] = std::to_string(seed);
    if (with_locations) {
        kv["output_dir"] = output_dir;
        kv["cache.dir"] = cache_dir;
    }
    std::string out;
    for (const auto& [k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin)
{
    ExperimentConfig c = ExperimentConfig::defaults();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = origin + " line " + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides)
{
    ExperimentConfig c = ExperimentConfig::defaults();
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is)
            throw ConfigError("cannot read config file " + path.string());
        std::stringstream ss;
        ss << is.rdbuf();
        c = parse_config_text(ss.str(), path.string());
    }
    for (const auto& [k, v] : overrides)
        c.set(k, v, "--set " + k);
    c.validate();
    return c;
}

} // namespace lbsoft
