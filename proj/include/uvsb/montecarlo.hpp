#pragma once

#include "uvsb/core.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace uvsb {

/// Row-major (path, step) array of path values, steps 0..n_steps.
struct PathMatrix {
    int n_paths = 0;
    int n_steps = 0;
    std::vector<double> values;

    double operator()(int path, int step) const
    {
        return values[static_cast<std::size_t>(path) * (n_steps + 1) + step];
    }
    double& operator()(int path, int step)
    {
        return values[static_cast<std::size_t>(path) * (n_steps + 1) + step];
    }
};

struct CirPaths {
    std::vector<double> time;
    PathMatrix z;  // Z_k^+ (full truncation)
};

/// dZ = delta kappa (theta - Z) dt + sqrt(delta) sqrt(Z) dW^Z by full-truncation
/// Euler.  Draws are a pure function of (seed, path, step), so the result
/// does not depend on thread count.
CirPaths simulate_cir(const ModelParams& p, int n_steps, int n_paths, std::uint64_t seed);

struct ConstantControl {
    double q = 1.0;
};

/// q = below while X^0 < level, above otherwise.
struct ThresholdControl {
    double level = 100.0;
    double below = 1.0;
    double above = 1.0;
};

/// Piecewise-linear q(x) through (x_k, q_k); flat outside.
struct FieldControl {
    std::vector<double> x;
    std::vector<double> q;
};

using ControlRule = std::variant<ConstantControl, ThresholdControl, FieldControl>;

/// Throws ConfigError when any value the rule can return lies outside [d, u].
void validate_control(const ControlRule& rule, const ModelParams& p);

std::string control_name(const ControlRule& rule);

/// One control process q_t drives both assets; it is read off the frozen
/// path X^0 at the start of each step.
double control_value(const ControlRule& rule, double x);

struct PathBundle {
    std::vector<double> time;
    PathMatrix z;
    PathMatrix x_delta;   // driving volatility q sqrt(Z_t)
    PathMatrix x_frozen;  // driving volatility q sqrt(z0)
    std::uint64_t seed = 0;
};

/// Log-Euler for X^delta and X^0 on the same increments, with
/// corr(dW, dW^Z) = rho.
PathBundle simulate_coupled_asset(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                  std::uint64_t seed);

struct TerminalPair {
    std::vector<double> x_delta;
    std::vector<double> x_frozen;
};

/// Terminal values only; identical numbers to simulate_coupled_asset.
TerminalPair simulate_coupled_terminal(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                       std::uint64_t seed);

struct RateRow {
    double delta = 0.0;
    double estimate = 0.0;  // E[(X_T^delta - X_T^0)^2]
    double stderr_ = 0.0;
};

struct RateStudy {
    std::string control;
    std::vector<RateRow> rows;  // decreasing delta
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // from batch-wise slopes
};

struct RateOptions {
    int n_paths = 100000;
    int n_steps = 100;
    int n_batches = 20;
    std::uint64_t seed = 20240601;
};

/// Least-squares slope of log E[(X_T^delta - X_T^0)^2] against log delta.
/// Every delta reuses the same seed.  Throws ConfigError for an empty list,
/// a non-positive entry, or a list that is not strictly decreasing.
RateStudy coupling_rate_study(const ModelParams& p, const std::vector<double>& deltas, const ControlRule& rule,
                              const RateOptions& opts);

namespace reference {
/// Serial loop with the same draws; used to check the OpenMP version.
TerminalPair simulate_coupled_terminal(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                       std::uint64_t seed);
}  // namespace reference

}  // namespace uvsb
