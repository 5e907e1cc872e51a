#include "uvsb/solver_p0p1.hpp"

#include "uvsb/linsolve.hpp"
#include "uvsb/parallel.hpp"
#include "uvsb/stencils.hpp"

#include <algorithm>
#include <string>

namespace uvsb {

namespace {

// (I - theta dt A) out = (I + (1 - theta) dt A) next + dt * source on one
// z-slice, with A = 1/2 q^2 z x^2 d_xx and A = 0 on the two boundary nodes.
void cn_slice(const Grid2D& g, int j, std::span<const double> next, std::span<const double> q,
              const StepControl& step, std::span<const double> source, double lin_tol, std::span<double> out)
{
    const int n = g.nx();
    const double z = g.z[j];
    const double inv_dx2 = 1.0 / (g.dx * g.dx);

    TriDiag sys;
    sys.lower.assign(n - 1, 0.0);
    sys.upper.assign(n - 1, 0.0);
    sys.main.assign(n, 1.0);
    std::vector<double> rhs(next.begin(), next.end());

    const double imp = step.theta * step.dt;
    const double exp = (1.0 - step.theta) * step.dt;
    for (int i = 1; i < n - 1; ++i) {
        const double c = 0.5 * q[i] * q[i] * z * g.x[i] * g.x[i] * inv_dx2;
        sys.lower[i - 1] = -imp * c;
        sys.main[i] = 1.0 + 2.0 * imp * c;
        sys.upper[i] = -imp * c;
        rhs[i] += exp * c * (next[i + 1] + next[i - 1] - 2.0 * next[i]);
    }
    if (!source.empty()) {
        for (int i = 0; i < n; ++i) rhs[i] += step.dt * source[i];
    }
    const auto x = solve_tridiag(sys, rhs, lin_tol);
    std::copy(x.begin(), x.end(), out.begin());
}

Field cn_all_slices(const Surface& next, const Field& q, const StepControl& step, const Field* source,
                    double lin_tol, const char* stage)
{
    const Grid2D& g = next.grid();
    Field out(g.nx(), g.nz());
    parallel_for(g.nz(), [&](int j) {
        try {
            cn_slice(g, j, next.line(j), q.line(j), step,
                     source ? source->line(j) : std::span<const double>{}, lin_tol, out.line(j));
        } catch (const LinearSolveError& e) {
            throw LinearSolveError(std::string(stage) + " at level " + std::to_string(step.target_level)
                                       + ", z-slice " + std::to_string(j) + ": " + e.what(),
                                   e.row(), e.residual_history());
        }
    });
    return out;
}

Field weighted(const Field& now, const Field& next, double theta)
{
    Field out(now.nx(), now.nz());
    auto o = out.data();
    auto a = now.data();
    auto b = next.data();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = theta * a[k] + (1.0 - theta) * b[k];
    return out;
}

}  // namespace

StepControl default_step(const Surface& next, const SolverConfig& cfg)
{
    return {next.grid().dt, cfg.cn_weight, next.time_index() - 1};
}

Field select_q0(const Field& lxx, const ModelParams& p, double gamma_eps)
{
    Field q(lxx.nx(), lxx.nz());
    auto out = q.data();
    auto in = lxx.data();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = in[k] > -gamma_eps ? p.u : p.d;
    return q;
}

P0Step step_p0_predictor(const Surface& next, const ModelParams& p, const SolverConfig& cfg,
                         std::optional<StepControl> step)
{
    const StepControl s = step.value_or(default_step(next, cfg));
    Field q = select_q0(apply_stencil(StencilOp::L_xx, next).values, p, cfg.gamma_eps);
    Field u = cn_all_slices(next, q, s, nullptr, cfg.lin_tol, "P0 predictor");
    return {Surface(next.grid_ptr(), s.target_level, std::move(u)), std::move(q)};
}

P0Step step_p0_corrector(const Surface& next, const Surface& provisional, const ModelParams& p,
                         const SolverConfig& cfg, std::optional<StepControl> step)
{
    if (!next.grid().same_shape(provisional.grid())) throw ConfigError("P0 corrector: grid mismatch");
    const StepControl s = step.value_or(default_step(next, cfg));
    const Grid2D& g = next.grid();

    Field current = provisional.field();
    Field q_used;  // empty until a corrector solve happens
    for (int pass = 0; pass < cfg.corrector_passes; ++pass) {
        const Field mid = weighted(current, next.field(), s.theta);
        Field q = select_q0(apply_stencil(StencilOp::L_xx, g, mid).values, p, cfg.gamma_eps);
        if (pass > 0 && q == q_used) break;
        if (pass == 0) {
            // Same control as the predictor means the same linear system.
            Field q_pred = select_q0(apply_stencil(StencilOp::L_xx, next).values, p, cfg.gamma_eps);
            if (q == q_pred) {
                q_used = std::move(q);
                continue;
            }
        }
        current = cn_all_slices(next, q, s, nullptr, cfg.lin_tol, "P0 corrector");
        q_used = std::move(q);
    }
    return {Surface(next.grid_ptr(), s.target_level, std::move(current)), std::move(q_used)};
}

Surface step_p1(const Surface& p1_next, const Field& q, const Surface& p0_now, const Surface& p0_next,
                const ModelParams& p, const SolverConfig& cfg, std::optional<StepControl> step)
{
    const Grid2D& g = p1_next.grid();
    if (!g.same_shape(p0_now.grid()) || !g.same_shape(p0_next.grid()) || q.nx() != g.nx() || q.nz() != g.nz()) {
        throw ConfigError("P1 step: grid mismatch");
    }
    const StepControl s = step.value_or(default_step(p1_next, cfg));

    const Field mid = weighted(p0_now.field(), p0_next.field(), s.theta);
    Field source = apply_stencil(StencilOp::L_xz, g, mid).values;
    auto src = source.data();
    auto qs = q.data();
    for (std::size_t k = 0; k < src.size(); ++k) src[k] = p.rho * (qs[k] * src[k]);

    Field v = cn_all_slices(p1_next, q, s, &source, cfg.lin_tol, "P1 step");
    return Surface(p1_next.grid_ptr(), s.target_level, std::move(v));
}

P0P1Solution solve_p0p1(const PayoffSpec& payoff, const ModelParams& p, const GridSpec& spec,
                        const SolverConfig& cfg)
{
    require_valid(p);
    validate(cfg);
    const GridPtr grid = build_grid(spec, p.T);
    const int N = grid->nt();

    Surface u = terminal_surface(payoff, grid);
    Surface v = Surface::filled(grid, N, 0.0);
    Field q_last(grid->nx(), grid->nz(), p.u);

    std::vector<Surface> hu, hv;
    std::vector<Field> hq;
    if (cfg.keep_history) {
        hu.push_back(u);
        hv.push_back(v);
        hq.emplace_back();
    }

    for (int n = N - 1; n >= 0; --n) {
        const bool startup = n == N - 1 && cfg.rannacher_steps > 0;
        const int substeps = startup ? cfg.rannacher_steps : 1;
        const StepControl s{grid->dt / substeps, startup ? 1.0 : cfg.cn_weight, n};
        for (int k = 0; k < substeps; ++k) {
            auto pred = step_p0_predictor(u, p, cfg, s);
            auto corr = step_p0_corrector(u, pred.surface, p, cfg, s);
            v = step_p1(v, corr.q, corr.surface, u, p, cfg, s);
            u = std::move(corr.surface);
            q_last = std::move(corr.q);
        }
        if (cfg.keep_history) {
            hu.push_back(u);
            hv.push_back(v);
            hq.push_back(q_last);
        }
    }
    std::reverse(hu.begin(), hu.end());
    std::reverse(hv.begin(), hv.end());
    std::reverse(hq.begin(), hq.end());

    detail::count_p0p1_solve();
    return {grid, std::move(u), std::move(v), std::move(q_last), std::move(hu), std::move(hv), std::move(hq)};
}

}  // namespace uvsb
