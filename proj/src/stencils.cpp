#include "uvsb/stencils.hpp"

#include <algorithm>

namespace uvsb {

std::string to_string(StencilOp op)
{
    switch (op) {
    case StencilOp::d_x: return "d_x";
    case StencilOp::d_xx: return "d_xx";
    case StencilOp::d_z: return "d_z";
    case StencilOp::d_zz: return "d_zz";
    case StencilOp::d_xz: return "d_xz";
    case StencilOp::L_xx: return "L_xx";
    case StencilOp::L_zz: return "L_zz";
    case StencilOp::L_xz: return "L_xz";
    case StencilOp::L_x: return "L_x";
    case StencilOp::L_z1: return "L_z1";
    case StencilOp::L_z2: return "L_z2";
    }
    return "?";
}

double stencil_coefficient(StencilOp op, double x, double z)
{
    switch (op) {
    case StencilOp::L_xx: return z * x * x;
    case StencilOp::L_zz: return z;
    case StencilOp::L_xz: return x * z;
    case StencilOp::L_x: return x;
    case StencilOp::L_z2: return z;
    default: return 1.0;
    }
}

namespace {

StencilOp raw_of(StencilOp op)
{
    switch (op) {
    case StencilOp::L_xx: return StencilOp::d_xx;
    case StencilOp::L_zz: return StencilOp::d_zz;
    case StencilOp::L_xz: return StencilOp::d_xz;
    case StencilOp::L_x: return StencilOp::d_x;
    case StencilOp::L_z1:
    case StencilOp::L_z2: return StencilOp::d_z;
    default: return op;
    }
}

// One x-line (fixed j) of a raw stencil.
void raw_line(StencilOp raw, const Grid2D& g, const Field& f, int j, double* out)
{
    const int I = g.nx() - 1;
    const int J = g.nz() - 1;
    const double* c = f.line(j).data();

    switch (raw) {
    case StencilOp::d_x: {
        const double inv2 = 1.0 / (2.0 * g.dx);
        for (int i = 1; i < I; ++i) out[i] = (c[i + 1] - c[i - 1]) * inv2;
        out[0] = (c[1] - c[0]) / g.dx;
        out[I] = (c[I] - c[I - 1]) / g.dx;
        break;
    }
    case StencilOp::d_xx: {
        const double inv = 1.0 / (g.dx * g.dx);
        for (int i = 1; i < I; ++i) out[i] = (c[i + 1] + c[i - 1] - 2.0 * c[i]) * inv;
        out[0] = out[I] = 0.0;
        break;
    }
    case StencilOp::d_z: {
        if (J == 0) {
            std::fill(out, out + I + 1, 0.0);
            break;
        }
        const int jp = std::min(j + 1, J);
        const int jm = std::max(j - 1, 0);
        const double inv = 1.0 / ((jp - jm) * g.dz);
        const double* p = f.line(jp).data();
        const double* m = f.line(jm).data();
        for (int i = 0; i <= I; ++i) out[i] = (p[i] - m[i]) * inv;
        break;
    }
    case StencilOp::d_zz: {
        if (j == 0 || j == J) {
            std::fill(out, out + I + 1, 0.0);
            break;
        }
        const double inv = 1.0 / (g.dz * g.dz);
        const double* p = f.line(j + 1).data();
        const double* m = f.line(j - 1).data();
        for (int i = 0; i <= I; ++i) out[i] = (p[i] + m[i] - 2.0 * c[i]) * inv;
        break;
    }
    case StencilOp::d_xz: {
        if (J == 0) {
            std::fill(out, out + I + 1, 0.0);
            break;
        }
        const int jp = std::min(j + 1, J);
        const int jm = std::max(j - 1, 0);
        const double hz = (jp - jm) * g.dz;
        const double* p = f.line(jp).data();
        const double* m = f.line(jm).data();
        const double inv = 1.0 / (2.0 * g.dx * hz);
        for (int i = 1; i < I; ++i) out[i] = (p[i + 1] - m[i + 1] - p[i - 1] + m[i - 1]) * inv;
        out[0] = (p[1] - m[1] - p[0] + m[0]) / (g.dx * hz);
        out[I] = (p[I] - m[I] - p[I - 1] + m[I - 1]) / (g.dx * hz);
        break;
    }
    default: break;
    }
}

}  // namespace

StencilField apply_stencil(StencilOp op, const Grid2D& g, const Field& f)
{
    if (f.nx() != g.nx() || f.nz() != g.nz()) throw ConfigError("stencil: field does not match grid");
    if (g.nx() < 3) throw ConfigError("stencil: need at least 3 x nodes");

    StencilField out{op, Field(g.nx(), g.nz())};
    const StencilOp raw = raw_of(op);
    const bool composite = raw != op;
    const int nz = g.nz();

#pragma omp parallel for schedule(static)
    for (int j = 0; j < nz; ++j) {
        double* o = out.values.line(j).data();
        raw_line(raw, g, f, j, o);
        if (composite) {
            for (int i = 0; i < g.nx(); ++i) o[i] *= stencil_coefficient(op, g.x[i], g.z[j]);
        }
    }
    return out;
}

}  // namespace uvsb
