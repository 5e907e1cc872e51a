// Serial reference kernels against their OpenMP counterparts.
#include "uvsb/montecarlo.hpp"
#include "uvsb/payoff.hpp"
#include "uvsb/solver_p0p1.hpp"
#include "uvsb/solver_pdelta.hpp"
#include "uvsb/stencils.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

using namespace uvsb;

namespace {

double seconds(const std::function<void()>& f, int reps)
{
    const auto start = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void row(const char* name, double serial, double parallel)
{
    std::printf("%-28s %12.6f %12.6f %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "openmp [s]", "speedup");

    const ModelParams p;
    GridSpec spec;
    spec.n_x = 401;
    spec.n_z = 400;
    const GridPtr g = build_grid(spec, p.T);
    Field f(g->nx(), g->nz());
    for (int j = 0; j < g->nz(); ++j) {
        for (int i = 0; i < g->nx(); ++i) f(i, j) = std::sin(0.03 * g->x[i]) * std::exp(-g->z[j]);
    }
    double sink = 0.0;
    row("stencil L_xz 401x400", seconds([&] { sink += reference::apply_stencil(StencilOp::L_xz, *g, f).values(7, 7); }, 20),
        seconds([&] { sink += apply_stencil(StencilOp::L_xz, *g, f).values(7, 7); }, 20));

    const int n = omp_get_max_threads();
    const GridSpec preset;
    const SolverConfig cfg = default_solver_config(p);
    auto p0 = [&] { sink += solve_p0p1(Butterfly{}, p, preset, cfg).p0(50, 33); };
    omp_set_num_threads(1);
    const double p0_serial = seconds(p0, 3);
    omp_set_num_threads(n);
    row("P0/P1 solve 101x100x20", p0_serial, seconds(p0, 3));

    auto pd = [&] { sink += solve_pdelta(Butterfly{}, p, preset, cfg).p_delta(50, 33); };
    omp_set_num_threads(1);
    const double pd_serial = seconds(pd, 1);
    omp_set_num_threads(n);
    row("P^delta solve 101x100x20", pd_serial, seconds(pd, 1));

    const ControlRule rule = ConstantControl{p.u};
    row("MC terminal 1e5 x 100",
        seconds([&] { sink += reference::simulate_coupled_terminal(p, rule, 100, 100000, 7).x_delta[0]; }, 1),
        seconds([&] { sink += simulate_coupled_terminal(p, rule, 100, 100000, 7).x_delta[0]; }, 1));

    std::printf("checksum %.6e\n", sink);
    return 0;
}
