#pragma once

#include "uvsb/core.hpp"
#include "uvsb/linsolve.hpp"
#include "uvsb/payoff.hpp"
#include "uvsb/solver_p0p1.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace uvsb {

/// Which candidate of the pointwise maximization won:
///   A: q = u, value 1/2 u^2 L_xx + u rho sqrt(delta) L_xz
///   B: q = d, value 1/2 d^2 L_xx + d rho sqrt(delta) L_xz
///   C: stationary point q = -rho sqrt(delta) L_xz / L_xx,
///      value -rho^2 delta L_xz^2 / (2 L_xx)
enum class CandidateTag : std::uint8_t { A, B, C };

char to_char(CandidateTag tag);

struct QChoice {
    double q;
    CandidateTag tag;
    bool clamped = false;  // paper-exact mode only: stationary point outside [d, u]
};

/// Maximizes f(q) = 1/2 q^2 L_xx + q rho sqrt(delta) L_xz over [d, u].
///
/// |L_xx| < gamma_eps is treated as L_xx = 0.  Ties go to A, then B.  In
/// guarded mode the stationary point competes only when L_xx < 0 and it
/// lies inside [d, u].  In paper-exact mode it competes whenever L_xx != 0
/// and, if it wins, the applied q is clamped to [d, u].
QChoice select_q(double lxx, double lxz, const ModelParams& p, double gamma_eps, OptimizerMode mode);

/// Matrix of  1/2 q^2 L_xx + q rho sqrt(delta) L_xz
///            + delta (1/2 L_zz + kappa theta L_z1 - kappa L_z2)
/// on the 9-point footprint, with the stencil boundary rules.  Every
/// in-range neighbour of the footprint is stored (explicit zeros included).
BandedSystem assemble_operator(const Grid2D& grid, const Field& q, const ModelParams& p);

struct LinearStats {
    int solves = 0;
    int iterations = 0;
    double max_residual = 0.0;
    std::string method;
};

struct PdeltaStep {
    Surface surface;
    Field q;
    std::vector<CandidateTag> tags;
    long clamped = 0;
    LinearStats linear;
};

/// Predictor (control from the level n+1 surface, one coupled solve) and
/// corrector (control from the theta-weighted combination, re-solve).
PdeltaStep step_pdelta(const Surface& next, const ModelParams& p, const SolverConfig& cfg,
                       std::optional<StepControl> step = std::nullopt);

struct PdeltaSolution {
    GridPtr grid;
    Surface p_delta;                     // t = 0
    Field q_star_delta;                  // control used for the last step into t = 0
    std::vector<CandidateTag> tags;      // per node, same layout as Field
    double candidate_c_fraction = 0.0;   // at t = 0
    double candidate_c_fraction_all = 0.0;  // over every level
    long clamped_nodes = 0;              // over every level
    LinearStats linear;
    std::vector<Surface> history;        // levels 0..N when keep_history
    std::vector<Field> q_history;
};

PdeltaSolution solve_pdelta(const PayoffSpec& payoff, const ModelParams& p, const GridSpec& grid,
                            const SolverConfig& cfg);

}  // namespace uvsb
