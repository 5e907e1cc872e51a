#include "uvsb/solver_pdelta.hpp"

#include "uvsb/parallel.hpp"
#include "uvsb/stencils.hpp"

#include <algorithm>
#include <cmath>

namespace uvsb {

char to_char(CandidateTag tag)
{
    switch (tag) {
    case CandidateTag::A: return 'A';
    case CandidateTag::B: return 'B';
    default: return 'C';
    }
}

QChoice select_q(double lxx, double lxz, const ModelParams& p, double gamma_eps, OptimizerMode mode)
{
    const double s = p.rho * std::sqrt(p.delta);
    const double a = std::abs(lxx) < gamma_eps ? 0.0 : lxx;

    const double fa = 0.5 * p.u * p.u * a + p.u * s * lxz;
    const double fb = 0.5 * p.d * p.d * a + p.d * s * lxz;
    QChoice best = fa >= fb ? QChoice{p.u, CandidateTag::A} : QChoice{p.d, CandidateTag::B};
    const double fbest = std::max(fa, fb);

    if (a == 0.0) return best;
    const double q_hat = -s * lxz / a;
    const double fc = -s * s * lxz * lxz / (2.0 * a);
    if (mode == OptimizerMode::guarded) {
        if (a < 0.0 && q_hat >= p.d && q_hat <= p.u && fc > fbest) return {q_hat, CandidateTag::C};
        return best;
    }
    if (fc > fbest) {
        const double q = std::clamp(q_hat, p.d, p.u);
        return {q, CandidateTag::C, q != q_hat};
    }
    return best;
}

BandedSystem assemble_operator(const Grid2D& g, const Field& q, const ModelParams& p)
{
    if (q.nx() != g.nx() || q.nz() != g.nz()) throw ConfigError("assemble_operator: control does not match grid");
    const int nx = g.nx();
    const int nz = g.nz();
    const int I = nx - 1;
    const int J = nz - 1;
    const double sd = std::sqrt(p.delta);
    BandedSystem A(static_cast<int>(g.size()));

    parallel_for(nz, [&](int j) {
        const double z = g.z[j];
        const int jp = std::min(j + 1, J), jm = std::max(j - 1, 0);
        for (int i = 0; i < nx; ++i) {
            const int r = static_cast<int>(g.index(i, j));
            for (int b = -1; b <= 1; ++b) {
                for (int a = -1; a <= 1; ++a) {
                    const int ii = i + a, jj = j + b;
                    if (ii >= 0 && ii <= I && jj >= 0 && jj <= J) A.add(r, static_cast<int>(g.index(ii, jj)), 0.0);
                }
            }

            const double x = g.x[i];
            const double qi = q(i, j);
            const int ip = std::min(i + 1, I), im = std::max(i - 1, 0);

            // 1/2 q^2 z x^2 d_xx
            if (i > 0 && i < I) {
                const double c = 0.5 * qi * qi * z * x * x / (g.dx * g.dx);
                A.add(r, static_cast<int>(g.index(i - 1, j)), c);
                A.add(r, r, -2.0 * c);
                A.add(r, static_cast<int>(g.index(i + 1, j)), c);
            }
            if (J == 0) continue;

            // q rho sqrt(delta) x z d_xz
            const double cxz = qi * p.rho * sd * x * z / ((ip - im) * g.dx * (jp - jm) * g.dz);
            A.add(r, static_cast<int>(g.index(ip, jp)), cxz);
            A.add(r, static_cast<int>(g.index(im, jm)), cxz);
            A.add(r, static_cast<int>(g.index(im, jp)), -cxz);
            A.add(r, static_cast<int>(g.index(ip, jm)), -cxz);

            // delta (1/2 z d_zz + kappa theta d_z - kappa z d_z)
            if (j > 0 && j < J) {
                const double c = 0.5 * p.delta * z / (g.dz * g.dz);
                A.add(r, static_cast<int>(g.index(i, j - 1)), c);
                A.add(r, r, -2.0 * c);
                A.add(r, static_cast<int>(g.index(i, j + 1)), c);
            }
            const double cz = p.delta * (p.kappa * p.theta - p.kappa * z) / ((jp - jm) * g.dz);
            A.add(r, static_cast<int>(g.index(i, jp)), cz);
            A.add(r, static_cast<int>(g.index(i, jm)), -cz);
        }
    });
    return A;
}

namespace {

struct Selection {
    Field q;
    std::vector<CandidateTag> tags;
    long clamped = 0;
};

Selection select_field(const Grid2D& g, const Field& w, const ModelParams& p, const SolverConfig& cfg)
{
    const Field lxx = apply_stencil(StencilOp::L_xx, g, w).values;
    const Field lxz = apply_stencil(StencilOp::L_xz, g, w).values;
    Selection out{Field(g.nx(), g.nz()), std::vector<CandidateTag>(g.size()), 0};
    auto a = lxx.data();
    auto b = lxz.data();
    auto q = out.q.data();
    for (std::size_t k = 0; k < q.size(); ++k) {
        const auto c = select_q(a[k], b[k], p, cfg.gamma_eps, cfg.mode);
        q[k] = c.q;
        out.tags[k] = c.tag;
        out.clamped += c.clamped ? 1 : 0;
    }
    return out;
}

Field coupled_solve(const Surface& next, const Field& q, const ModelParams& p, const SolverConfig& cfg,
                    const StepControl& s, LinearStats& stats)
{
    const Grid2D& g = next.grid();
    const BandedSystem A = assemble_operator(g, q, p);
    const auto w = next.field().data();
    const auto aw = A.multiply(w);
    std::vector<double> rhs(w.size());
    const double exp = (1.0 - s.theta) * s.dt;
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = w[k] + exp * aw[k];

    const BandedSystem M = A.scaled_plus_identity(-s.theta * s.dt, 1.0);
    BandedSolveOptions opts;
    opts.lin_tol = cfg.lin_tol;
    opts.strategy = cfg.linear;
    opts.direct_limit = cfg.direct_limit;
    BandedSolveResult res;
    try {
        res = solve_banded(M, rhs, opts);
    } catch (const LinearSolveError& e) {
        throw LinearSolveError("P^delta solve at level " + std::to_string(s.target_level) + ": " + e.what(),
                               e.row(), e.residual_history());
    }
    ++stats.solves;
    stats.iterations += res.iterations;
    stats.max_residual = std::max(stats.max_residual, res.residual);
    stats.method = res.method;

    Field out(g.nx(), g.nz());
    std::copy(res.x.begin(), res.x.end(), out.data().begin());
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

PdeltaStep step_pdelta(const Surface& next, const ModelParams& p, const SolverConfig& cfg,
                       std::optional<StepControl> step)
{
    const StepControl s = step.value_or(default_step(next, cfg));
    const Grid2D& g = next.grid();
    LinearStats stats;

    Selection sel = select_field(g, next.field(), p, cfg);
    Field current = coupled_solve(next, sel.q, p, cfg, s, stats);

    for (int pass = 0; pass < cfg.corrector_passes; ++pass) {
        Selection corr = select_field(g, weighted(current, next.field(), s.theta), p, cfg);
        const bool unchanged = corr.q == sel.q;
        sel = std::move(corr);
        if (unchanged) break;
        current = coupled_solve(next, sel.q, p, cfg, s, stats);
    }
    return {Surface(next.grid_ptr(), s.target_level, std::move(current)), std::move(sel.q), std::move(sel.tags),
            sel.clamped, stats};
}

PdeltaSolution solve_pdelta(const PayoffSpec& payoff, const ModelParams& p, const GridSpec& spec,
                            const SolverConfig& cfg)
{
    require_valid(p);
    validate(cfg);
    const GridPtr grid = build_grid(spec, p.T);
    const int N = grid->nt();

    Surface w = terminal_surface(payoff, grid);
    Field q_last(grid->nx(), grid->nz(), p.u);
    std::vector<CandidateTag> tags(grid->size(), CandidateTag::A);
    std::vector<Surface> hw;
    std::vector<Field> hq;
    if (cfg.keep_history) {
        hw.push_back(w);
        hq.emplace_back();
    }

    LinearStats stats;
    long clamped = 0;
    long c_count = 0;
    long node_count = 0;
    for (int n = N - 1; n >= 0; --n) {
        const bool startup = n == N - 1 && cfg.rannacher_steps > 0;
        const int substeps = startup ? cfg.rannacher_steps : 1;
        const StepControl s{grid->dt / substeps, startup ? 1.0 : cfg.cn_weight, n};
        for (int k = 0; k < substeps; ++k) {
            auto st = step_pdelta(w, p, cfg, s);
            w = std::move(st.surface);
            q_last = std::move(st.q);
            tags = std::move(st.tags);
            clamped += st.clamped;
            stats.solves += st.linear.solves;
            stats.iterations += st.linear.iterations;
            stats.max_residual = std::max(stats.max_residual, st.linear.max_residual);
            stats.method = st.linear.method;
            c_count += std::count(tags.begin(), tags.end(), CandidateTag::C);
            node_count += static_cast<long>(tags.size());
        }
        if (cfg.keep_history) {
            hw.push_back(w);
            hq.push_back(q_last);
        }
    }
    std::reverse(hw.begin(), hw.end());
    std::reverse(hq.begin(), hq.end());

    const double c0 = static_cast<double>(std::count(tags.begin(), tags.end(), CandidateTag::C));
    detail::count_pdelta_solve();
    PdeltaSolution out{grid, std::move(w), std::move(q_last), std::move(tags)};
    out.candidate_c_fraction = c0 / static_cast<double>(grid->size());
    out.candidate_c_fraction_all = node_count ? static_cast<double>(c_count) / node_count : 0.0;
    out.clamped_nodes = clamped;
    out.linear = stats;
    out.history = std::move(hw);
    out.q_history = std::move(hq);
    return out;
}

}  // namespace uvsb
