#include "uvsb/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace uvsb {

std::vector<ParamViolation> validate_params(const ModelParams& p)
{
    std::vector<ParamViolation> out;
    auto add = [&out](std::string field, std::string rule, bool unsupported = false) {
        out.push_back({std::move(field), std::move(rule), unsupported});
    };

    if (!(p.x0 > 0.0) || !std::isfinite(p.x0)) add("x0", "x0 > 0");
    if (!(p.z0 > 0.0) || !std::isfinite(p.z0)) add("z0", "z0 > 0");
    if (!(p.T > 0.0) || !std::isfinite(p.T)) add("T", "T > 0");
    if (!(p.d > 0.0 && p.d < 1.0 && p.u > 1.0) || !std::isfinite(p.u)) {
        add("d,u", "0 < d < 1 < u");
    }
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) add("kappa", "kappa > 0");
    if (!(p.theta > 0.0) || !std::isfinite(p.theta)) add("theta", "theta > 0");
    if (!(p.theta * p.kappa >= 0.5)) add("theta,kappa", "Feller condition theta * kappa >= 1/2");
    if (!(p.delta >= 0.0 && p.delta <= 1.0)) add("delta", "0 <= delta <= 1");
    if (!(std::abs(p.rho) < 1.0)) add("rho", "|rho| < 1");
    if (!std::isfinite(p.r)) {
        add("r", "r finite");
    } else if (p.r != 0.0) {
        add("r", "only r = 0 is implemented", true);
    }
    return out;
}

void require_valid(const ModelParams& p)
{
    const auto violations = validate_params(p);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid model parameters:";
    for (const auto& v : violations) {
        msg << " [" << v.field << ": " << v.rule << (v.unsupported ? " (unsupported)" : "") << "]";
    }
    throw ConfigError(msg.str());
}

std::vector<std::string> validate_grid(const GridSpec& s)
{
    std::vector<std::string> out;
    const bool finite = std::isfinite(s.x_min) && std::isfinite(s.x_max) && std::isfinite(s.z_min)
                        && std::isfinite(s.z_max);
    if (!finite) {
        out.emplace_back("grid bounds must be finite");
        return out;
    }
    if (!(s.x_min >= 0.0)) out.emplace_back("x_min >= 0");
    if (!(s.x_min < s.x_max)) out.emplace_back("x_min < x_max");
    if (!(s.z_min >= 0.0)) out.emplace_back("z_min >= 0");
    if (s.n_x < 3) out.emplace_back("n_x >= 3");
    if (s.n_z < 1) out.emplace_back("n_z >= 1");
    if (s.n_z == 1 && s.z_min != s.z_max) out.emplace_back("n_z = 1 requires z_min = z_max");
    if (s.n_z >= 2 && !(s.z_min < s.z_max)) out.emplace_back("z_min < z_max");
    if (s.n_t < 1) out.emplace_back("n_t >= 1");
    return out;
}

GridPtr build_grid(const GridSpec& spec, double maturity)
{
    auto problems = validate_grid(spec);
    if (!(maturity > 0.0) || !std::isfinite(maturity)) problems.emplace_back("maturity > 0");
    if (!problems.empty()) {
        std::string msg = "invalid grid:";
        for (const auto& p : problems) msg += " [" + p + "]";
        throw ConfigError(msg);
    }

    auto g = std::make_shared<Grid2D>();
    g->spec = spec;
    g->maturity = maturity;
    g->dx = (spec.x_max - spec.x_min) / (spec.n_x - 1);
    g->dz = spec.n_z > 1 ? (spec.z_max - spec.z_min) / (spec.n_z - 1) : 0.0;
    g->dt = maturity / spec.n_t;

    g->x.resize(spec.n_x);
    for (int i = 0; i < spec.n_x; ++i) g->x[i] = spec.x_min + i * g->dx;
    g->z.resize(spec.n_z);
    for (int j = 0; j < spec.n_z; ++j) g->z[j] = spec.z_min + j * g->dz;
    g->t.resize(spec.n_t + 1);
    for (int n = 0; n <= spec.n_t; ++n) g->t[n] = n * g->dt;
    return g;
}

Field::Field(int nx, int nz, double fill)
    : nx_(nx), nz_(nz), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz), fill)
{
    if (nx < 0 || nz < 0) throw ConfigError("negative field dimensions");
}

Surface::Surface(GridPtr grid, int time_index, Field values)
    : grid_(std::move(grid)), time_index_(time_index), values_(std::move(values))
{
    if (!grid_) throw ConfigError("surface without grid");
    if (values_.nx() != grid_->nx() || values_.nz() != grid_->nz()) {
        throw ConfigError("surface dimensions do not match grid");
    }
    for (double v : values_.data()) {
        if (!std::isfinite(v)) throw ConfigError("surface holds a non-finite value");
    }
}

Surface Surface::filled(GridPtr grid, int time_index, double value)
{
    Field f(grid->nx(), grid->nz(), value);
    return Surface(std::move(grid), time_index, std::move(f));
}

namespace {

// Cell index and weight of `v` in a uniform axis, clamped to the ends.
std::pair<int, double> locate(const std::vector<double>& axis, double step, double v)
{
    const int n = static_cast<int>(axis.size());
    if (n == 1 || step == 0.0) return {0, 0.0};
    double s = (v - axis.front()) / step;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    int k = std::min(static_cast<int>(std::floor(s)), n - 2);
    return {k, s - k};
}

}  // namespace

double Surface::sample(double x, double z) const
{
    const auto& g = *grid_;
    auto [i, wx] = locate(g.x, g.dx, x);
    auto [j, wz] = locate(g.z, g.dz, z);
    const int i1 = std::min(i + 1, g.nx() - 1);
    const int j1 = std::min(j + 1, g.nz() - 1);
    const double lo = (1.0 - wx) * values_(i, j) + wx * values_(i1, j);
    const double hi = (1.0 - wx) * values_(i, j1) + wx * values_(i1, j1);
    return (1.0 - wz) * lo + wz * hi;
}

SolverConfig default_solver_config(const ModelParams& p)
{
    SolverConfig cfg;
    cfg.gamma_eps = 1e-9 * p.x0 * p.x0;
    return cfg;
}

void validate(const SolverConfig& c)
{
    std::string msg;
    if (!(c.cn_weight >= 0.0 && c.cn_weight <= 1.0)) msg += " [cn_weight in [0,1]]";
    if (c.corrector_passes < 1 || c.corrector_passes > 10) msg += " [corrector_passes in 1..10]";
    if (!(c.gamma_eps > 0.0)) msg += " [gamma_eps > 0]";
    if (!(c.lin_tol > 0.0)) msg += " [lin_tol > 0]";
    if (c.rannacher_steps < 0) msg += " [rannacher_steps >= 0]";
    if (c.direct_limit < 1) msg += " [direct_limit >= 1]";
    if (!msg.empty()) throw ConfigError("invalid solver config:" + msg);
}

std::string to_string(OptimizerMode mode)
{
    return mode == OptimizerMode::guarded ? "guarded" : "paper-exact";
}

std::string to_string(LinearStrategy s)
{
    switch (s) {
    case LinearStrategy::direct: return "direct";
    case LinearStrategy::iterative: return "iterative";
    default: return "automatic";
    }
}

}  // namespace uvsb

namespace uvsb {

namespace {
std::atomic<long> g_p0p1_solves{0};
std::atomic<long> g_pdelta_solves{0};
}  // namespace

SolveCounts solve_counts() { return {g_p0p1_solves.load(), g_pdelta_solves.load()}; }

void reset_solve_counts()
{
    g_p0p1_solves = 0;
    g_pdelta_solves = 0;
}

namespace detail {
void count_p0p1_solve() { ++g_p0p1_solves; }
void count_pdelta_solve() { ++g_pdelta_solves; }
}  // namespace detail

}  // namespace uvsb
