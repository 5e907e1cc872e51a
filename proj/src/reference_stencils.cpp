#include "uvsb/stencils.hpp"

#include <algorithm>

namespace uvsb::reference {

namespace {

double raw_at(StencilOp op, const Grid2D& g, const Field& f, int i, int j)
{
    const int I = g.nx() - 1;
    const int J = g.nz() - 1;
    const int ip = std::min(i + 1, I), im = std::max(i - 1, 0);
    const int jp = std::min(j + 1, J), jm = std::max(j - 1, 0);
    const bool x_edge = i == 0 || i == I;
    const bool z_edge = j == 0 || j == J;

    switch (op) {
    case StencilOp::d_x:
        return (f(ip, j) - f(im, j)) / (g.x[ip] - g.x[im]);
    case StencilOp::d_xx:
        if (x_edge) return 0.0;
        return (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (g.dx * g.dx);
    case StencilOp::d_z:
        if (J == 0) return 0.0;
        return (f(i, jp) - f(i, jm)) / (g.z[jp] - g.z[jm]);
    case StencilOp::d_zz:
        if (J == 0 || z_edge) return 0.0;
        return (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (g.dz * g.dz);
    case StencilOp::d_xz:
        if (J == 0) return 0.0;
        return (f(ip, jp) + f(im, jm) - f(im, jp) - f(ip, jm)) / ((g.x[ip] - g.x[im]) * (g.z[jp] - g.z[jm]));
    default:
        return 0.0;
    }
}

}  // namespace

StencilField apply_stencil(StencilOp op, const Grid2D& g, const Field& f)
{
    if (f.nx() != g.nx() || f.nz() != g.nz()) throw ConfigError("stencil: field does not match grid");
    if (g.nx() < 3) throw ConfigError("stencil: need at least 3 x nodes");

    StencilOp raw = op;
    double (*coef)(double, double) = [](double, double) { return 1.0; };
    switch (op) {
    case StencilOp::L_xx:
        raw = StencilOp::d_xx;
        coef = [](double x, double z) { return z * x * x; };
        break;
    case StencilOp::L_zz:
        raw = StencilOp::d_zz;
        coef = [](double, double z) { return z; };
        break;
    case StencilOp::L_xz:
        raw = StencilOp::d_xz;
        coef = [](double x, double z) { return x * z; };
        break;
    case StencilOp::L_x:
        raw = StencilOp::d_x;
        coef = [](double x, double) { return x; };
        break;
    case StencilOp::L_z1:
        raw = StencilOp::d_z;
        break;
    case StencilOp::L_z2:
        raw = StencilOp::d_z;
        coef = [](double, double z) { return z; };
        break;
    default: break;
    }

    StencilField out{op, Field(g.nx(), g.nz())};
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = 0; j < g.nz(); ++j) {
            out.values(i, j) = coef(g.x[i], g.z[j]) * raw_at(raw, g, f, i, j);
        }
    }
    return out;
}

}  // namespace uvsb::reference
