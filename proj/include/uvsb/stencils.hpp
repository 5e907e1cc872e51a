#pragma once

#include "uvsb/core.hpp"

#include <string>

namespace uvsb {

/// Raw finite differences and the composite operators built on them:
///
///   L_xx = z x^2 d_xx   L_zz = z d_zz   L_xz = x z d_xz
///   L_x  = x d_x        L_z1 = d_z      L_z2 = z d_z
///
/// Interior nodes use the central formulas.  On boundary lines:
///   d_xx = 0 at x_min/x_max, d_zz = 0 at z_min/z_max,
///   d_x, d_z use one-sided two-point differences,
///   d_xz uses one-sided differencing along whichever axis touches the
///   boundary (the clipped-neighbour form of the 4-point cross stencil).
/// A single-slice grid (n_z = 1) has all z derivatives equal to zero.
enum class StencilOp { d_x, d_xx, d_z, d_zz, d_xz, L_xx, L_zz, L_xz, L_x, L_z1, L_z2 };

struct StencilField {
    StencilOp op;
    Field values;
};

std::string to_string(StencilOp op);

/// OpenMP kernel.  Throws ConfigError when `f` does not match the grid.
StencilField apply_stencil(StencilOp op, const Grid2D& grid, const Field& f);

inline StencilField apply_stencil(StencilOp op, const Surface& s)
{
    return apply_stencil(op, s.grid(), s.field());
}

inline StencilField d_x(const Surface& s) { return apply_stencil(StencilOp::d_x, s); }
inline StencilField d_xx(const Surface& s) { return apply_stencil(StencilOp::d_xx, s); }
inline StencilField d_z(const Surface& s) { return apply_stencil(StencilOp::d_z, s); }
inline StencilField d_zz(const Surface& s) { return apply_stencil(StencilOp::d_zz, s); }
inline StencilField d_xz(const Surface& s) { return apply_stencil(StencilOp::d_xz, s); }
inline StencilField L_xx(const Surface& s) { return apply_stencil(StencilOp::L_xx, s); }
inline StencilField L_zz(const Surface& s) { return apply_stencil(StencilOp::L_zz, s); }
inline StencilField L_xz(const Surface& s) { return apply_stencil(StencilOp::L_xz, s); }
inline StencilField L_x(const Surface& s) { return apply_stencil(StencilOp::L_x, s); }
inline StencilField L_z1(const Surface& s) { return apply_stencil(StencilOp::L_z1, s); }
inline StencilField L_z2(const Surface& s) { return apply_stencil(StencilOp::L_z2, s); }

/// Coefficient multiplying the raw stencil of a composite operator at (x, z);
/// 1 for the raw operators.
double stencil_coefficient(StencilOp op, double x, double z);

namespace reference {

/// Serial node-by-node evaluation kept as the oracle for apply_stencil.
StencilField apply_stencil(StencilOp op, const Grid2D& grid, const Field& f);

}  // namespace reference

}  // namespace uvsb
