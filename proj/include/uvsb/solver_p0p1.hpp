#pragma once

#include "uvsb/core.hpp"
#include "uvsb/payoff.hpp"

#include <optional>
#include <vector>

namespace uvsb {

/// Size and implicitness of one backward step.  The solvers use the grid
/// step with cn_weight, except for Rannacher start-up sub-steps which are
/// fully implicit (theta = 1).
struct StepControl {
    double dt = 0.0;
    double theta = 0.5;
    int target_level = 0;
};

StepControl default_step(const Surface& next, const SolverConfig& cfg);

/// Bang-bang control of the leading-order equation: u where
/// L_xx > -gamma_eps (the flat band counts as non-negative), d elsewhere.
Field select_q0(const Field& lxx, const ModelParams& p, double gamma_eps);

struct P0Step {
    Surface surface;
    Field q;
};

/// Control from L_xx of the level n+1 surface, then one theta-weighted
/// solve per z-slice.
P0Step step_p0_predictor(const Surface& next, const ModelParams& p, const SolverConfig& cfg,
                         std::optional<StepControl> step = std::nullopt);

/// Control re-evaluated on theta * provisional + (1 - theta) * next (the
/// half-sum for Crank-Nicolson) and re-solved.  Up to corrector_passes
/// rounds; stops early once the control field no longer changes.
P0Step step_p0_corrector(const Surface& next, const Surface& provisional, const ModelParams& p,
                         const SolverConfig& cfg, std::optional<StepControl> step = std::nullopt);

/// Linear step of the correction with frozen control `q` and explicit
/// source rho * q * L_xz applied to the theta-weighted P0 combination.
Surface step_p1(const Surface& p1_next, const Field& q, const Surface& p0_now, const Surface& p0_next,
                const ModelParams& p, const SolverConfig& cfg, std::optional<StepControl> step = std::nullopt);

struct P0P1Solution {
    GridPtr grid;
    Surface p0;        // t = 0
    Surface p1;        // t = 0
    Field q_star0;     // control used for the last step into t = 0
    // Indexed by time level 0..N when SolverConfig::keep_history is set.
    std::vector<Surface> p0_history;
    std::vector<Surface> p1_history;
    std::vector<Field> q_history;  // q_history[n] drove the step n+1 -> n; entry N is empty
};

/// Backward sweep n = N-1 .. 0: predictor, corrector(s), then the
/// correction step, all z-slices per level.
P0P1Solution solve_p0p1(const PayoffSpec& payoff, const ModelParams& p, const GridSpec& grid,
                        const SolverConfig& cfg);

}  // namespace uvsb
