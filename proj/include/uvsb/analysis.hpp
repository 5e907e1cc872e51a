#pragma once

#include "uvsb/core.hpp"
#include "uvsb/fit.hpp"
#include "uvsb/payoff.hpp"
#include "uvsb/solver_p0p1.hpp"
#include "uvsb/solver_pdelta.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace uvsb {

struct SweepOptions {
    double window_x_min = 60.0;
    double window_x_max = 140.0;
    double window_z_min = 0.0;
    double window_z_max = std::numeric_limits<double>::infinity();
    bool keep_surfaces = false;
};

struct SweepRecord {
    double delta = 0.0;
    double error = 0.0;       // sup over the window
    double x_sup = 0.0;
    double z_sup = 0.0;
    double error_full = 0.0;  // sup over the whole grid
    double x_sup_full = 0.0;
    double z_sup_full = 0.0;
    double runtime_s = 0.0;
    double candidate_c_fraction = 0.0;
    long clamped_nodes = 0;
    bool in_fit = false;
};

struct SweepReport {
    std::vector<SweepRecord> records;  // ascending delta
    LineFit fit;                       // log error against log delta
    int n_fit = 0;
    std::optional<P0P1Solution> base;  // kept when SweepOptions::keep_surfaces
    std::vector<Surface> p_delta;      // same order as records, when kept
};

/// error(delta) = sup |P^delta - P0 - sqrt(delta) P1| at t = 0.
///
/// P0 and P1 are solved once; P^delta once per delta, concurrently.  The
/// list is sorted; zero, negative or repeated entries are rejected.  The
/// fit uses the smallest half of the list (rounded up, at least two).
SweepReport error_sweep(const PayoffSpec& payoff, const ModelParams& p, std::vector<double> deltas,
                        const GridSpec& grid, const SolverConfig& cfg, const SweepOptions& opts = {});

/// Sign of L_xx with the deadband: +1, -1, or 0 when |L_xx| < gamma_eps.
int gamma_sign(double lxx, double gamma_eps);

struct GammaSlice {
    double z = 0.0;
    std::vector<double> crossings;  // x where d_xx P0 changes sign
    int mismatch_nodes = 0;
    double mismatch_width = 0.0;    // mismatch_nodes * dx
    double peak_lxx_p0 = 0.0;       // max of L_xx P0 over interior nodes
    double min_lxx_pdelta = 0.0;    // min of L_xx P^delta over interior nodes, capped at 0
    // Largest |L_xx P^delta| at a mismatch node relative to peak_lxx_p0.
    // Non-zero values flag oscillations of the central cross stencil.
    double oscillation_ratio = 0.0;
};

struct GammaDiagnostics {
    std::vector<GammaSlice> slices;
    std::vector<char> mismatch;  // per node, Field layout
    long total_mismatch = 0;
};

/// Sign structure of the discrete gammas of P0 and P^delta.  Sign changes
/// skip deadband nodes; a mismatch node has strictly opposite signs.
GammaDiagnostics gamma_diagnostics(const Surface& p0, const Surface& p_delta, double gamma_eps);

struct BsRow {
    double x = 0.0;
    double p0 = 0.0;
    double bs_low = 0.0;   // volatility d sqrt(z0)
    double bs_high = 0.0;  // volatility u sqrt(z0)
    bool dominates = false;
};

/// P0(0, x, z0) against constant-volatility prices on the grid x nodes
/// within [x_min, x_max].  dominates = P0 >= max(bs_low, bs_high) - tol.
std::vector<BsRow> compare_bs(const Surface& p0, const PayoffSpec& payoff, const ModelParams& p, double x_min,
                              double x_max, double tol);

}  // namespace uvsb
