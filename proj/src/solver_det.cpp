#include "lbsoft/solver_det.hpp"

#include "lbsoft/digest.hpp"
#include "lbsoft/errors.hpp"
#include "lbsoft/kernel_integrals.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace lbsoft {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int uniform_panels = 64;
constexpr int geometric_levels = 40;
constexpr int rule_version = 1;

SparseRows transpose(const SparseRows& a, int n)
{
    SparseRows t;
    std::vector<std::size_t> count(n + 1, 0);
    for (int c : a.col)
        ++count[c + 1];
    for (int i = 0; i < n; ++i)
        count[i + 1] += count[i];
    t.ptr = count;
    t.col.resize(a.nnz());
    t.val.resize(a.nnz());
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (int i = 0; i < n; ++i)
        for (std::size_t k = a.ptr[i]; k < a.ptr[i + 1]; ++k) {
            const std::size_t at = fill[a.col[k]]++;
            t.col[at] = i;
            t.val[at] = a.val[k];
        }
    return t;
}

template <class T>
void put(std::ofstream& os, const std::vector<T>& v)
{
    const std::uint64_t n = v.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <class T>
bool get(std::ifstream& is, std::vector<T>& v)
{
    std::uint64_t n = 0;
    if (!is.read(reinterpret_cast<char*>(&n), sizeof n) || n > (1ULL << 34))
        return false;
    v.resize(n);
    return static_cast<bool>(is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

bool load_cache(const std::filesystem::path& file, GeneratorMatrix& Q)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        return false;
    std::vector<int> head;
    std::vector<std::size_t> ptr;
    if (!get(is, head) || head.size() != 4 || !get(is, ptr) || !get(is, Q.rates.col) || !get(is, Q.rates.val)
        || !get(is, Q.out_rate) || !get(is, Q.rate_check))
        return false;
    Q.states = head[0];
    Q.theta_nodes = head[1];
    Q.alpha_nodes_max = head[2];
    Q.rates.ptr = std::move(ptr);
    return head[3] == rule_version && static_cast<int>(Q.out_rate.size()) == Q.states
           && Q.rates.ptr.size() == static_cast<std::size_t>(Q.states) + 1;
}

void store_cache(const std::filesystem::path& file, const GeneratorMatrix& Q)
{
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            return;
        put(os, std::vector<int>{Q.states, Q.theta_nodes, Q.alpha_nodes_max, rule_version});
        put(os, Q.rates.ptr);
        put(os, Q.rates.col);
        put(os, Q.rates.val);
        put(os, Q.out_rate);
        put(os, Q.rate_check);
    }
    std::filesystem::rename(tmp, file, ec);
}

} // namespace

double GeneratorMatrix::max_out_rate() const
{
    double m = 0.0;
    for (double r : out_rate)
        m = std::max(m, r);
    return m;
}

double GeneratorMatrix::row_residual() const
{
    double worst = 0.0;
    for (int i = 0; i < states; ++i) {
        double s = -out_rate[i];
        for (std::size_t k = rates.ptr[i]; k < rates.ptr[i + 1]; ++k)
            s += rates.val[k];
        worst = std::max(worst, std::abs(s) / std::max(1.0, out_rate[i]));
    }
    return worst;
}

void alpha_rule(double r, double gamma, double n, std::vector<double>& nodes, std::vector<double>& weights)
{
    using gl = boost::math::quadrature::gauss<double, 8>;
    std::vector<double> br;
    const double h = pi / uniform_panels;
    for (int k = 0; k <= uniform_panels; ++k)
        br.push_back(k * h);
    for (int j = 1; j <= geometric_levels; ++j)
        br.push_back(std::ldexp(h, -j));
    const double ak = kink_angle(r, gamma, n);
    if (ak > 0.0 && ak < pi)
        br.push_back(ak);
    br.push_back(0.0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    nodes.clear();
    weights.clear();
    const auto& x = gl::abscissa();
    const auto& w = gl::weights();
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        const double c = 0.5 * (br[p] + br[p + 1]);
        const double hw = 0.5 * (br[p + 1] - br[p]);
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (double s : {-1.0, 1.0}) {
                if (x[k] == 0.0 && s > 0.0)
                    continue;
                nodes.push_back(c + s * hw * x[k]);
                weights.push_back(hw * w[k]);
            }
        }
    }
}

std::string generator_key(const RadialGrid& grid, const AngularCrossSection& beta, const ModelParams& params,
                          int nodes_per_piece)
{
    Digest d;
    d.bytes("lbsoft-generator").integer(rule_version).reals(grid.edges());
    for (const auto& t : beta.theta_nodes(nodes_per_piece))
        d.real(t.theta).real(t.weight);
    d.real(params.gamma).real(params.trunc_n).real(params.quad_rel_tol);
    return d.hex();
}

GeneratorMatrix assemble_generator(const RadialGrid& grid, const AngularCrossSection& beta,
                                   const ModelParams& params, const QuadratureSettings& q,
                                   const AssemblyOptions& opt)
{
    params.validate();
    const int C = grid.cells();
    GeneratorMatrix Q;
    Q.states = C + 2;
    Q.digest = generator_key(grid, beta, params, opt.nodes_per_piece);

    const double scale = truncation_scale(params.trunc_n, params.gamma);
    if (params.trunc_n > 0.0 && grid.min_width() > scale)
        Q.warnings.push_back("finest cell width " + format_real(grid.min_width())
                             + " exceeds the truncation scale n^(1/gamma) = " + format_real(scale));

    const auto file = opt.cache_dir.empty() ? std::filesystem::path() : opt.cache_dir / (Q.digest + ".bin");
    if (!file.empty() && load_cache(file, Q)) {
        Q.inflow = transpose(Q.rates, Q.states);
        return Q;
    }

    const auto thetas = beta.theta_nodes(opt.nodes_per_piece);
    Q.theta_nodes = static_cast<int>(thetas.size());
    const double n = params.trunc_n;
    const double tol = std::max(1e3 * q.rel_tol, 1e-8);

    std::vector<std::vector<int>> row_col(Q.states);
    std::vector<std::vector<double>> row_val(Q.states);
    Q.out_rate.assign(Q.states, 0.0);
    Q.rate_check.assign(Q.states, 0.0);
    std::vector<int> alpha_count(Q.states, 0);
    std::vector<std::string> failures(Q.states);

    auto build_row = [&](int s) {
        if (s == C + 1 || n <= 0.0)
            return;
        const double r = s == 0 ? 1.0 : grid.midpoints()[s - 1];
        std::vector<double> an, aw;
        alpha_rule(r, params.gamma, n, an, aw);
        alpha_count[s] = static_cast<int>(an.size());
        std::vector<double> dense(Q.states, 0.0);
        double raw = 0.0;
        for (std::size_t k = 0; k < an.size(); ++k) {
            const double base = aw[k] * kernel_weight(r, an[k], params.gamma, n) / (2.0 * pi);
            for (double sign : {-1.0, 1.0}) {
                const double a = sign * an[k];
                for (const auto& th : thetas) {
                    const double w = th.weight * base;
                    raw += w;
                    const double rp = post_collision_radius(r, th.theta, a);
                    const DepositTarget t = grid.deposit_target(rp);
                    if (t.overflow) {
                        dense[C + 1] += w;
                    } else {
                        dense[1 + t.lo] += w * t.w_lo;
                        if (t.hi != t.lo)
                            dense[1 + t.hi] += w * t.w_hi;
                    }
                }
            }
        }
        dense[s] = 0.0;  // a self-loop moves no mass
        double out = 0.0;
        for (int j = 0; j < Q.states; ++j)
            if (dense[j] > 0.0) {
                row_col[s].push_back(j);
                row_val[s].push_back(dense[j]);
                out += dense[j];
            }
        Q.out_rate[s] = out;
        const double ref = truncated_rate(r, params, beta.total_mass(), q);
        Q.rate_check[s] = ref;
        if (std::abs(raw - ref) > tol * ref)
            failures[s] = "alpha rule at r = " + format_real(r) + " gives " + format_real(raw)
                          + " against adaptive rate " + format_real(ref);
    };

    const int workers = std::max(1, opt.workers);
    if (workers == 1) {
        for (int s = 0; s < Q.states; ++s)
            build_row(s);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int s = w; s < Q.states; s += workers)
                    build_row(s);
            });
        for (auto& t : pool)
            t.join();
    }
    for (const auto& f : failures)
        if (!f.empty())
            throw NumericalError("generator assembly: " + f);

    for (int s = 0; s < Q.states; ++s) {
        Q.rates.col.insert(Q.rates.col.end(), row_col[s].begin(), row_col[s].end());
        Q.rates.val.insert(Q.rates.val.end(), row_val[s].begin(), row_val[s].end());
        Q.rates.ptr.push_back(Q.rates.col.size());
        Q.alpha_nodes_max = std::max(Q.alpha_nodes_max, alpha_count[s]);
    }
    Q.inflow = transpose(Q.rates, Q.states);
    if (!file.empty())
        store_cache(file, Q);
    return Q;
}

Trajectory evolve(const RadialMeasure& lambda0, const GeneratorMatrix& Q, double dt,
                  const std::vector<double>& record_times, double positivity_factor, EvolveStats* stats)
{
    const int C = lambda0.grid().cells();
    if (Q.states != C + 2)
        throw std::invalid_argument("evolve: generator does not match the grid");
    const double rmax = Q.max_out_rate();
    const double dt_limit = rmax > 0.0 ? positivity_factor / rmax : std::numeric_limits<double>::infinity();
    if (dt <= 0.0)
        dt = std::isfinite(dt_limit) ? dt_limit : 1.0;
    if (dt > dt_limit * (1.0 + 1e-12))
        throw std::invalid_argument("evolve: dt = " + format_real(dt) + " exceeds positivity_factor / max out-rate = "
                                    + format_real(dt_limit));

    std::vector<double> x(Q.states), y(Q.states);
    x[0] = lambda0.atom_at_1;
    for (int i = 0; i < C; ++i)
        x[1 + i] = lambda0.cell_mass[i];
    x[C + 1] = lambda0.overflow;
    const double mass0 = lambda0.total();

    auto snapshot = [&](double t) {
        Snapshot s{t, RadialMeasure(lambda0.grid_ptr())};
        s.lambda.atom_at_1 = x[0];
        s.lambda.atom_at_0 = lambda0.atom_at_0;
        std::copy(x.begin() + 1, x.begin() + 1 + C, s.lambda.cell_mass.begin());
        s.lambda.overflow = x[C + 1];
        return s;
    };

    EvolveStats st;
    st.dt = dt;
    Trajectory out;
    double t = 0.0;
    for (double target : record_times) {
        if (target < t)
            throw std::invalid_argument("evolve: record times must be nondecreasing and >= 0");
        const long long steps = target > t ? static_cast<long long>(std::ceil((target - t) / dt - 1e-9)) : 0;
        const double h = steps > 0 ? (target - t) / static_cast<double>(steps) : 0.0;
        for (long long k = 0; k < steps; ++k) {
            for (int j = 0; j < Q.states; ++j) {
                double gain = 0.0;
                for (std::size_t p = Q.inflow.ptr[j]; p < Q.inflow.ptr[j + 1]; ++p)
                    gain += x[Q.inflow.col[p]] * Q.inflow.val[p];
                y[j] = x[j] * (1.0 - h * Q.out_rate[j]) + h * gain;
            }
            x.swap(y);
            double mass = lambda0.atom_at_0, low = 0.0;
            for (double v : x) {
                mass += v;
                low = std::min(low, v);
            }
            st.min_component = std::min(st.min_component, low);
            st.max_mass_drift = std::max(st.max_mass_drift, std::abs(mass - mass0));
            if (low < -1e-15)
                throw NumericalError("evolve: negative component " + format_real(low) + " at t = "
                                     + format_real(t + (k + 1) * h) + "; dt too large");
            if (std::abs(mass - mass0) > 1e-8)
                throw NumericalError("evolve: mass drift " + format_real(mass - mass0) + " at t = "
                                     + format_real(t + (k + 1) * h));
        }
        st.steps += steps;
        t = target;
        out.push_back(snapshot(t));
    }
    if (stats)
        *stats = st;
    return out;
}

} // namespace lbsoft
