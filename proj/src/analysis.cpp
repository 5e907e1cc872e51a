#include "uvsb/analysis.hpp"

#include "uvsb/blackscholes.hpp"
#include "uvsb/parallel.hpp"
#include "uvsb/stencils.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace uvsb {

namespace {

struct SupPoint {
    double value = 0.0;
    int i = 0;
    int j = 0;
};

}  // namespace

SweepReport error_sweep(const PayoffSpec& payoff, const ModelParams& p, std::vector<double> deltas,
                        const GridSpec& grid, const SolverConfig& cfg, const SweepOptions& opts)
{
    if (deltas.empty()) throw ConfigError("error sweep: empty delta list");
    std::sort(deltas.begin(), deltas.end());
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0) || !std::isfinite(deltas[k])) {
            throw ConfigError("error sweep: delta values must be positive");
        }
        if (k > 0 && deltas[k] == deltas[k - 1]) throw ConfigError("error sweep: repeated delta value");
    }
    if (!(opts.window_x_min <= opts.window_x_max)) throw ConfigError("error sweep: empty x window");
    if (!(opts.window_z_min <= opts.window_z_max)) throw ConfigError("error sweep: empty z window");
    require_valid(p);

    const P0P1Solution base = solve_p0p1(payoff, p, grid, cfg);
    const Grid2D& g = *base.grid;
    const int n = static_cast<int>(deltas.size());

    SweepReport report;
    report.records.resize(n);
    std::vector<std::optional<Surface>> kept(n);

    parallel_for_dynamic(n, [&](int k) {
        ModelParams pk = p;
        pk.delta = deltas[k];
        const auto start = std::chrono::steady_clock::now();
        PdeltaSolution sol = [&] {
            try {
                return solve_pdelta(payoff, pk, grid, cfg);
            } catch (const LinearSolveError& e) {
                throw LinearSolveError("delta = " + std::to_string(deltas[k]) + ": " + e.what(), e.row(),
                                       e.residual_history());
            } catch (const SolverError& e) {
                throw SolverError("delta = " + std::to_string(deltas[k]) + ": " + e.what());
            }
        }();
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const double sd = std::sqrt(deltas[k]);
        SupPoint window, full;
        for (int j = 0; j < g.nz(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const double e = std::abs(sol.p_delta(i, j) - base.p0(i, j) - sd * base.p1(i, j));
                if (e > full.value) full = {e, i, j};
                const bool inside = g.x[i] >= opts.window_x_min && g.x[i] <= opts.window_x_max
                                    && g.z[j] >= opts.window_z_min && g.z[j] <= opts.window_z_max;
                if (inside && e > window.value) {
                    window = {e, i, j};
                }
            }
        }
        SweepRecord& r = report.records[k];
        r.delta = deltas[k];
        r.error = window.value;
        r.x_sup = g.x[window.i];
        r.z_sup = g.z[window.j];
        r.error_full = full.value;
        r.x_sup_full = g.x[full.i];
        r.z_sup_full = g.z[full.j];
        r.runtime_s = elapsed;
        r.candidate_c_fraction = sol.candidate_c_fraction;
        r.clamped_nodes = sol.clamped_nodes;
        if (opts.keep_surfaces) kept[k] = std::move(sol.p_delta);
    });

    const int n_fit = std::max(2, (n + 1) / 2);
    if (n >= 2) {
        std::vector<double> lx, ly;
        bool usable = true;
        for (int k = 0; k < std::min(n_fit, n); ++k) {
            report.records[k].in_fit = true;
            if (!(report.records[k].error > 0.0)) usable = false;
            lx.push_back(std::log(report.records[k].delta));
            ly.push_back(usable ? std::log(report.records[k].error) : 0.0);
        }
        if (usable) {
            report.fit = fit_line(lx, ly);
            report.n_fit = static_cast<int>(lx.size());
        }
    }
    if (opts.keep_surfaces) {
        report.base = base;
        for (auto& s : kept) report.p_delta.push_back(std::move(*s));
    }
    return report;
}

int gamma_sign(double lxx, double gamma_eps)
{
    if (std::abs(lxx) < gamma_eps) return 0;
    return lxx > 0.0 ? 1 : -1;
}

GammaDiagnostics gamma_diagnostics(const Surface& p0, const Surface& p_delta, double gamma_eps)
{
    const Grid2D& g = p0.grid();
    if (!g.same_shape(p_delta.grid())) throw ConfigError("gamma diagnostics: grid mismatch");
    const Field l0 = apply_stencil(StencilOp::L_xx, p0).values;
    const Field ld = apply_stencil(StencilOp::L_xx, p_delta).values;
    const Field g0 = apply_stencil(StencilOp::d_xx, p0).values;

    GammaDiagnostics out;
    out.mismatch.assign(g.size(), 0);
    for (int j = 0; j < g.nz(); ++j) {
        GammaSlice s;
        s.z = g.z[j];
        int prev_i = -1;
        int prev_sign = 0;
        double worst = 0.0;
        for (int i = 1; i < g.nx() - 1; ++i) {
            s.peak_lxx_p0 = std::max(s.peak_lxx_p0, l0(i, j));
            s.min_lxx_pdelta = std::min(s.min_lxx_pdelta, ld(i, j));
            const int s0 = gamma_sign(l0(i, j), gamma_eps);
            const int sd = gamma_sign(ld(i, j), gamma_eps);
            if (s0 != 0 && sd != 0 && s0 != sd) {
                ++s.mismatch_nodes;
                out.mismatch[g.index(i, j)] = 1;
                worst = std::max(worst, std::abs(ld(i, j)));
            }
            if (s0 == 0) continue;
            if (prev_sign != 0 && s0 != prev_sign) {
                // Zero of the linear interpolant of d_xx P0 between the two nodes.
                const double a = g0(prev_i, j);
                const double b = g0(i, j);
                const double w = a / (a - b);
                s.crossings.push_back(g.x[prev_i] + w * (g.x[i] - g.x[prev_i]));
            }
            prev_sign = s0;
            prev_i = i;
        }
        s.mismatch_width = s.mismatch_nodes * g.dx;
        if (s.peak_lxx_p0 > 0.0) s.oscillation_ratio = worst / s.peak_lxx_p0;
        out.total_mismatch += s.mismatch_nodes;
        out.slices.push_back(std::move(s));
    }
    return out;
}

std::vector<BsRow> compare_bs(const Surface& p0, const PayoffSpec& payoff, const ModelParams& p, double x_min,
                              double x_max, double tol)
{
    if (!(x_min <= x_max)) throw ConfigError("compare_bs: empty x range");
    if (!(tol >= 0.0)) throw ConfigError("compare_bs: tolerance must be non-negative");
    const Grid2D& g = p0.grid();
    const double maturity = g.maturity - g.t[p0.time_index()];
    const double vlow = p.d * std::sqrt(p.z0);
    const double vhigh = p.u * std::sqrt(p.z0);
    std::vector<BsRow> rows;
    for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x[i];
        if (x < x_min || x > x_max) continue;
        BsRow r;
        r.x = x;
        r.p0 = p0.sample(x, p.z0);
        r.bs_low = bs_price(payoff, x, vlow, maturity, p.r);
        r.bs_high = bs_price(payoff, x, vhigh, maturity, p.r);
        r.dominates = r.p0 >= std::max(r.bs_low, r.bs_high) - tol;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace uvsb
