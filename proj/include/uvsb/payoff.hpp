#pragma once

#include "uvsb/core.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace uvsb {

/// (x - k1)+ - w2 (x - k2)+ + w3 (x - k3)+ with weights chosen so the
/// payoff vanishes beyond k3; the symmetric case gives the 1, -2, 1 spread.
struct Butterfly {
    double k1 = 90.0;
    double k2 = 100.0;
    double k3 = 110.0;
};

struct Call {
    double strike = 100.0;
};

struct Put {
    double strike = 100.0;
};

/// min(x, K): linear up to the cap, concave overall.
struct CappedLinear {
    double strike = 100.0;
};

/// Piecewise-linear payoff through (x_k, h_k); flat outside its range.
struct Tabulated {
    std::vector<double> x;
    std::vector<double> h;
};

using PayoffSpec = std::variant<Butterfly, Call, Put, CappedLinear, Tabulated>;

/// Throws ConfigError when strikes are non-positive or unordered, or a
/// table is malformed.
void validate(const PayoffSpec& spec);

std::string payoff_name(const PayoffSpec& spec);

double evaluate(const PayoffSpec& spec, double x);

/// values(i, j) = h(x_i) for every j.
Surface terminal_surface(const PayoffSpec& spec, const GridPtr& grid);

/// Butterfly weights (w1, w2, w3) on calls struck at k1, k2, k3.
std::array<double, 3> butterfly_weights(const Butterfly& b);

/// Smooths a kinked payoff by running the leading-order solver for time
/// `eps` on the z0 slice; the result is tabulated on the grid's x nodes.
PayoffSpec regularize(const PayoffSpec& spec, const ModelParams& p, const GridSpec& grid,
                      const SolverConfig& cfg, double eps);

/// Two-column CSV (x, h); a non-numeric first line is treated as a header.
Tabulated load_tabulated_csv(const std::filesystem::path& path);

}  // namespace uvsb
