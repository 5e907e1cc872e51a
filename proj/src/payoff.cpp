#include "uvsb/payoff.hpp"

#include "uvsb/solver_p0p1.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uvsb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

std::array<double, 3> butterfly_weights(const Butterfly& b)
{
    const double span = b.k3 - b.k2;
    return {1.0, (b.k3 - b.k1) / span, (b.k2 - b.k1) / span};
}

void validate(const PayoffSpec& spec)
{
    std::visit(overloaded{
                   [](const Butterfly& b) {
                       if (!(b.k1 > 0.0 && b.k1 < b.k2 && b.k2 < b.k3) || !std::isfinite(b.k3)) {
                           throw ConfigError("butterfly strikes must satisfy 0 < k1 < k2 < k3");
                       }
                   },
                   [](const Call& c) {
                       if (!(c.strike > 0.0) || !std::isfinite(c.strike)) throw ConfigError("call strike must be > 0");
                   },
                   [](const Put& c) {
                       if (!(c.strike > 0.0) || !std::isfinite(c.strike)) throw ConfigError("put strike must be > 0");
                   },
                   [](const CappedLinear& c) {
                       if (!(c.strike > 0.0) || !std::isfinite(c.strike)) throw ConfigError("cap must be > 0");
                   },
                   [](const Tabulated& t) {
                       if (t.x.size() < 2 || t.x.size() != t.h.size()) {
                           throw ConfigError("tabulated payoff needs >= 2 (x, h) pairs of equal length");
                       }
                       for (std::size_t k = 0; k < t.x.size(); ++k) {
                           if (!std::isfinite(t.x[k]) || !std::isfinite(t.h[k])) {
                               throw ConfigError("tabulated payoff holds a non-finite value");
                           }
                           if (k > 0 && !(t.x[k] > t.x[k - 1])) {
                               throw ConfigError("tabulated x values must be strictly increasing");
                           }
                       }
                   },
               },
               spec);
}

std::string payoff_name(const PayoffSpec& spec)
{
    return std::visit(overloaded{
                          [](const Butterfly&) { return std::string("butterfly"); },
                          [](const Call&) { return std::string("call"); },
                          [](const Put&) { return std::string("put"); },
                          [](const CappedLinear&) { return std::string("capped_linear"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      spec);
}

double evaluate(const PayoffSpec& spec, double x)
{
    return std::visit(overloaded{
                          [x](const Butterfly& b) {
                              const auto w = butterfly_weights(b);
                              return w[0] * pos(x - b.k1) - w[1] * pos(x - b.k2) + w[2] * pos(x - b.k3);
                          },
                          [x](const Call& c) { return pos(x - c.strike); },
                          [x](const Put& c) { return pos(c.strike - x); },
                          [x](const CappedLinear& c) { return std::min(x, c.strike); },
                          [x](const Tabulated& t) {
                              if (x <= t.x.front()) return t.h.front();
                              if (x >= t.x.back()) return t.h.back();
                              const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
                              const auto k = static_cast<std::size_t>(it - t.x.begin());
                              const double w = (x - t.x[k - 1]) / (t.x[k] - t.x[k - 1]);
                              return (1.0 - w) * t.h[k - 1] + w * t.h[k];
                          },
                      },
                      spec);
}

Surface terminal_surface(const PayoffSpec& spec, const GridPtr& grid)
{
    validate(spec);
    Field f(grid->nx(), grid->nz());
    for (int i = 0; i < grid->nx(); ++i) {
        const double h = evaluate(spec, grid->x[i]);
        for (int j = 0; j < grid->nz(); ++j) f(i, j) = h;
    }
    return Surface(grid, grid->nt(), std::move(f));
}

PayoffSpec regularize(const PayoffSpec& spec, const ModelParams& p, const GridSpec& grid,
                      const SolverConfig& cfg, double eps)
{
    if (!(eps > 0.0 && eps <= p.T / 10.0)) {
        throw ConfigError("regularization time must lie in (0, T/10]");
    }
    GridSpec slice = grid;
    slice.z_min = slice.z_max = p.z0;
    slice.n_z = 1;
    const double step = p.T / grid.n_t;
    slice.n_t = std::max(1, static_cast<int>(std::ceil(eps / step - 1e-12)));

    ModelParams q = p;
    q.T = eps;
    const auto sol = solve_p0p1(spec, q, slice, cfg);

    Tabulated t;
    t.x = sol.grid->x;
    t.h.assign(sol.p0.line(0).begin(), sol.p0.line(0).end());
    return t;
}

Tabulated load_tabulated_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open payoff table " + path.string());
    Tabulated t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0, h = 0.0;
        if (!(row >> x >> h)) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("malformed payoff table row: " + line);
        }
        first = false;
        t.x.push_back(x);
        t.h.push_back(h);
    }
    validate(PayoffSpec{t});
    return t;
}

}  // namespace uvsb
