#include "uvsb/montecarlo.hpp"
#include "uvsb/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <omp.h>

using namespace uvsb;

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu})
          == A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u})
          == A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms lie in the open unit interval and normals have unit moments")
{
    double s1 = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const auto u = uniform_pair(1, static_cast<std::uint64_t>(k), 0);
        CHECK(u[0] > 0.0);
        CHECK(u[0] < 1.0);
        const auto g = normal_pair(1, static_cast<std::uint64_t>(k), 3);
        s1 += g[0] + g[1];
        s2 += g[0] * g[0] + g[1] * g[1];
    }
    const double mean = s1 / (2.0 * n);
    const double var = s2 / (2.0 * n) - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / (2.0 * n)));
}

TEST_CASE("increment correlation is within three standard errors of rho")
{
    const double rho = -0.9;
    const int n = 100000;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int k = 0; k < n; ++k) {
        const auto g = correlated_normals(42, static_cast<std::uint64_t>(k), 7, rho);
        sa += g[0];
        sb += g[1];
        saa += g[0] * g[0];
        sbb += g[1] * g[1];
        sab += g[0] * g[1];
    }
    const double ma = sa / n, mb = sb / n;
    const double r = (sab / n - ma * mb) / std::sqrt((saa / n - ma * ma) * (sbb / n - mb * mb));
    const double se = (1.0 - rho * rho) / std::sqrt(n - 1.0);
    CHECK(std::abs(r - rho) < 3.0 * se);
}

TEST_CASE("CIR at delta = 0 is frozen")
{
    ModelParams p;
    p.delta = 0.0;
    const auto z = simulate_cir(p, 50, 20, 1);
    for (double v : z.z.values) CHECK(v == p.z0);
}

TEST_CASE("CIR mean matches the closed form and paths stay non-negative")
{
    ModelParams p;
    p.delta = 0.5;
    p.z0 = 0.01;
    const int n = 100000;
    const auto z = simulate_cir(p, 100, n, 99);
    double s = 0.0, s2 = 0.0;
    for (int m = 0; m < n; ++m) {
        const double v = z.z(m, 100);
        s += v;
        s2 += v * v;
    }
    for (double v : z.z.values) CHECK(v >= 0.0);
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
    const double expected = p.z0 + (p.theta - p.z0) * (1.0 - std::exp(-p.delta * p.kappa * p.T));
    CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("CIR started near zero reports non-negative values")
{
    ModelParams p;
    p.delta = 1.0;
    p.z0 = 1e-4;
    const auto z = simulate_cir(p, 400, 2000, 5);
    for (double v : z.z.values) CHECK(v >= 0.0);
}

TEST_CASE("coupled paths coincide at delta = 0")
{
    ModelParams p;
    p.delta = 0.0;
    const auto b = simulate_coupled_asset(p, ThresholdControl{100.0, p.u, p.d}, 50, 200, 4);
    CHECK(b.x_delta.values == b.x_frozen.values);
}

TEST_CASE("driftless log-Euler keeps the mean at x0")
{
    ModelParams p;
    p.delta = 0.0;
    const int n = 100000;
    const auto t = simulate_coupled_terminal(p, ConstantControl{p.u}, 20, n, 8);
    double s = 0.0, s2 = 0.0;
    for (double x : t.x_frozen) {
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
    CHECK(std::abs(mean - p.x0) < 3.0 * se);
}

TEST_CASE("coupling error is small relative to x0^2")
{
    const ModelParams p;
    const auto t = simulate_coupled_terminal(p, ConstantControl{p.u}, 100, 20000, 3);
    double s = 0.0;
    for (std::size_t m = 0; m < t.x_delta.size(); ++m) s += std::pow(t.x_delta[m] - t.x_frozen[m], 2);
    const double e = s / t.x_delta.size();
    CHECK(std::isfinite(e));
    CHECK(e > 0.0);
    CHECK(e < 0.01 * p.x0 * p.x0);
}

TEST_CASE("paths are bitwise reproducible and independent of thread count")
{
    const ModelParams p;
    const ControlRule rule = ThresholdControl{100.0, p.u, p.d};
    const auto a = simulate_coupled_asset(p, rule, 30, 300, 77);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    const auto b = simulate_coupled_asset(p, rule, 30, 300, 77);
    omp_set_num_threads(saved);
    CHECK(a.z.values == b.z.values);
    CHECK(a.x_delta.values == b.x_delta.values);
    CHECK(a.x_frozen.values == b.x_frozen.values);

    const auto c = simulate_coupled_asset(p, rule, 30, 300, 78);
    CHECK(a.x_delta.values != c.x_delta.values);

    const auto ref = reference::simulate_coupled_terminal(p, rule, 30, 300, 77);
    const auto par = simulate_coupled_terminal(p, rule, 30, 300, 77);
    CHECK(ref.x_delta == par.x_delta);
    CHECK(ref.x_frozen == par.x_frozen);
    for (int m = 0; m < 300; ++m) CHECK(a.x_delta(m, 30) == par.x_delta[m]);

    const auto z = simulate_cir(p, 30, 300, 77);
    CHECK(z.z.values == a.z.values);
}

TEST_CASE("control validation")
{
    const ModelParams p;
    CHECK_THROWS_AS(validate_control(ConstantControl{2.0}, p), ConfigError);
    CHECK_THROWS_AS(validate_control(ThresholdControl{100.0, 0.5, 1.0}, p), ConfigError);
    CHECK_THROWS_AS(validate_control(FieldControl{{1.0, 1.0}, {1.0, 1.0}}, p), ConfigError);
    CHECK_NOTHROW(validate_control(FieldControl{{90.0, 110.0}, {p.u, p.d}}, p));
    CHECK(control_value(FieldControl{{90.0, 110.0}, {p.u, p.d}}, 100.0) == doctest::Approx(1.0));
    CHECK(control_value(ThresholdControl{100.0, p.u, p.d}, 99.0) == p.u);
    CHECK_THROWS_AS(simulate_coupled_terminal(p, ConstantControl{0.1}, 10, 10, 1), ConfigError);
    CHECK_THROWS_AS(simulate_cir(p, 0, 10, 1), ConfigError);
    CHECK_THROWS_AS(simulate_cir(p, 10, 0, 1), ConfigError);
}

TEST_CASE("rate study preconditions")
{
    const ModelParams p;
    RateOptions o;
    o.n_paths = 1000;
    CHECK_THROWS_AS(coupling_rate_study(p, {0.04, 0.0}, ConstantControl{p.u}, o), ConfigError);
    CHECK_THROWS_AS(coupling_rate_study(p, {0.01, 0.04}, ConstantControl{p.u}, o), ConfigError);
    CHECK_THROWS_AS(coupling_rate_study(p, {0.04}, ConstantControl{p.u}, o), ConfigError);
}

TEST_CASE("rate study slope is near one and its standard error scales with paths")
{
    const ModelParams p;
    const std::vector<double> deltas{0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125};
    RateOptions o;
    o.n_paths = 20000;
    o.n_steps = 50;
    const auto a = coupling_rate_study(p, deltas, ConstantControl{p.d}, o);
    CHECK(a.rows.size() == deltas.size());
    CHECK(a.slope == doctest::Approx(1.0).epsilon(0.15));
    CHECK(a.slope_stderr > 0.0);
    o.n_paths = 40000;
    const auto b = coupling_rate_study(p, deltas, ConstantControl{p.d}, o);
    const double ratio = b.slope_stderr / a.slope_stderr;
    CHECK(ratio > 0.45);
    CHECK(ratio < 1.0);
}
