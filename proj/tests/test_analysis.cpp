#include "uvsb/analysis.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace uvsb;

namespace {

GridSpec small()
{
    GridSpec s;
    s.n_x = 51;
    s.n_z = 16;
    s.n_t = 10;
    return s;
}

}  // namespace

TEST_CASE("fit_line recovers an exact line")
{
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("error sweep solves P0 and P1 once and is order invariant")
{
    const ModelParams p;
    const auto cfg = default_solver_config(p);
    reset_solve_counts();
    const auto a = error_sweep(Butterfly{}, p, {0.04, 0.01, 0.02, 0.005}, small(), cfg);
    CHECK(solve_counts().p0p1 == 1);
    CHECK(solve_counts().pdelta == 4);
    const auto b = error_sweep(Butterfly{}, p, {0.005, 0.02, 0.04, 0.01}, small(), cfg);
    REQUIRE(a.records.size() == 4);
    const auto g = build_grid(small(), p.T);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(a.records[k].delta == b.records[k].delta);
        CHECK(a.records[k].error == b.records[k].error);
        CHECK(a.records[k].error >= 0.0);
        CHECK(a.records[k].error <= a.records[k].error_full);
        CHECK(std::count(g->x.begin(), g->x.end(), a.records[k].x_sup) == 1);
        CHECK(std::count(g->z.begin(), g->z.end(), a.records[k].z_sup) == 1);
        CHECK(a.records[k].x_sup >= 60.0);
        CHECK(a.records[k].x_sup <= 140.0);
    }
    CHECK(std::is_sorted(a.records.begin(), a.records.end(),
                         [](const auto& l, const auto& r) { return l.delta < r.delta; }));
    CHECK(a.n_fit == 2);
    CHECK(a.records[0].in_fit);
    CHECK_FALSE(a.records[2].in_fit);
    CHECK(a.fit.slope == b.fit.slope);
}

TEST_CASE("error sweep rejects bad delta lists")
{
    const ModelParams p;
    const auto cfg = default_solver_config(p);
    CHECK_THROWS_AS(error_sweep(Butterfly{}, p, {0.0}, small(), cfg), ConfigError);
    CHECK_THROWS_AS(error_sweep(Butterfly{}, p, {0.01, -0.02}, small(), cfg), ConfigError);
    CHECK_THROWS_AS(error_sweep(Butterfly{}, p, {0.01, 0.01}, small(), cfg), ConfigError);
    CHECK_THROWS_AS(error_sweep(Butterfly{}, p, {}, small(), cfg), ConfigError);
}

TEST_CASE("rho = 0 sweep error is the plain distance to P0")
{
    ModelParams p;
    p.rho = 0.0;
    const auto cfg = default_solver_config(p);
    SweepOptions o;
    o.keep_surfaces = true;
    const auto r = error_sweep(Butterfly{}, p, {0.01, 0.04}, small(), cfg, o);
    const auto& base = *r.base;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& g = *base.grid;
        double m = 0.0;
        for (int j = 0; j < g.nz(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                if (g.x[i] < 60.0 || g.x[i] > 140.0) continue;
                m = std::max(m, std::abs(r.p_delta[k](i, j) - base.p0(i, j)));
            }
        }
        CHECK(r.records[k].error == m);
    }
    CHECK(r.records[0].error < r.records[1].error);
}

TEST_CASE("z window restricts the sup")
{
    const ModelParams p;
    const auto cfg = default_solver_config(p);
    SweepOptions o;
    o.window_z_min = 0.02;
    const auto r = error_sweep(Butterfly{}, p, {0.01, 0.02}, small(), cfg, o);
    for (const auto& rec : r.records) CHECK(rec.z_sup >= 0.02);
}

TEST_CASE("gamma sign deadband")
{
    CHECK(gamma_sign(1.0, 1e-5) == 1);
    CHECK(gamma_sign(-1.0, 1e-5) == -1);
    CHECK(gamma_sign(5e-6, 1e-5) == 0);
}

TEST_CASE("butterfly gamma changes sign twice at z0")
{
    const ModelParams p;
    const auto cfg = default_solver_config(p);
    const GridSpec s;
    const auto b = solve_p0p1(Butterfly{}, p, s, cfg);
    const auto bd = solve_pdelta(Butterfly{}, p, s, cfg);
    const auto diag = gamma_diagnostics(b.p0, bd.p_delta, cfg.gamma_eps);
    const int j0 = 33;
    REQUIRE(diag.slices[j0].z == doctest::Approx(p.z0));
    REQUIRE(diag.slices[j0].crossings.size() == 2);
    CHECK(diag.slices[j0].crossings[0] > 80.0);
    CHECK(diag.slices[j0].crossings[0] < 100.0);
    CHECK(diag.slices[j0].crossings[1] > 100.0);
    CHECK(diag.slices[j0].crossings[1] < 120.0);
    for (const auto& sl : diag.slices) CHECK(sl.mismatch_width >= 0.0);

    const auto other = build_grid(small(), p.T);
    CHECK_THROWS_AS(gamma_diagnostics(b.p0, Surface::filled(other, 0, 0.0), cfg.gamma_eps), ConfigError);
}

TEST_CASE("call gamma mismatch is a small cross-stencil oscillation that vanishes with delta")
{
    ModelParams p;
    const auto cfg = default_solver_config(p);
    const GridSpec s;
    const auto c = solve_p0p1(Call{}, p, s, cfg);

    p.delta = 0.0;
    const auto d0 = gamma_diagnostics(c.p0, solve_pdelta(Call{}, p, s, cfg).p_delta, cfg.gamma_eps);
    CHECK(d0.total_mismatch == 0);

    double prev_ratio = 0.0;
    long prev_total = 0;
    for (double delta : {0.0125, 0.05}) {
        p.delta = delta;
        const auto d = gamma_diagnostics(c.p0, solve_pdelta(Call{}, p, s, cfg).p_delta, cfg.gamma_eps);
        double ratio = 0.0;
        for (const auto& sl : d.slices) {
            if (sl.z > 0.0) CHECK(sl.peak_lxx_p0 > 0.0);
            CHECK(sl.crossings.empty());
            ratio = std::max(ratio, sl.oscillation_ratio);
            if (sl.mismatch_nodes == 0) CHECK(sl.oscillation_ratio == 0.0);
        }
        CHECK(ratio < 1e-2);
        CHECK(ratio >= prev_ratio);
        CHECK(d.total_mismatch >= prev_total);
        prev_ratio = ratio;
        prev_total = d.total_mismatch;
    }
    CHECK(prev_total > 0);
}

TEST_CASE("compare_bs table")
{
    const ModelParams p;
    const auto sol = solve_p0p1(Butterfly{}, p, GridSpec{}, default_solver_config(p));
    const auto rows = compare_bs(sol.p0, Butterfly{}, p, 0.0, 200.0, 1e-3 * p.x0);
    CHECK(rows.size() == 101);
    for (const auto& r : rows) {
        if (r.x >= 60.0 && r.x <= 140.0) CHECK(r.dominates);
        if (r.x <= 10.0 || r.x >= 190.0) {
            CHECK(std::abs(r.p0) < 1e-6 * p.x0);
            CHECK(std::abs(r.bs_high) < 1e-6 * p.x0);
            CHECK(std::abs(r.p0 - r.bs_high) < 2e-5);
            CHECK(r.dominates);
        }
    }
    const auto call = solve_p0p1(Call{}, p, GridSpec{}, default_solver_config(p));
    for (const auto& r : compare_bs(call.p0, Call{}, p, 60.0, 140.0, 0.0)) {
        CHECK(std::abs(r.p0 - r.bs_high) < 1e-3 * p.x0);
    }
}
