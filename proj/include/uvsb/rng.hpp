#pragma once

#include <array>
#include <cstdint>

namespace uvsb {

/// Philox4x32-10 counter-based generator: the output is a pure function of
/// (key, counter), so any path/step draw can be produced independently of
/// execution order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Two independent uniforms in (0, 1) for (seed, path, step, stream).
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                                   std::uint32_t stream = 0);

/// Two independent standard normals (Box-Muller on uniform_pair).
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                                  std::uint32_t stream = 0);

/// Standard normals (g_W, g_Z) with correlation rho, built by a 2x2
/// Cholesky factor from normal_pair.
std::array<double, 2> correlated_normals(std::uint64_t seed, std::uint64_t path, std::uint32_t step, double rho);

}  // namespace uvsb
