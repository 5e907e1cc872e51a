#include "uvsb/rng.hpp"

#include <cmath>
#include <numbers>

namespace uvsb {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Maps 53 random bits to the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k)
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t stream)
{
    const auto r = philox4x32({static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), step, stream},
                              {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    return {to_open_unit(a), to_open_unit(b)};
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t stream)
{
    const auto [u1, u2] = uniform_pair(seed, path, step, stream);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::array<double, 2> correlated_normals(std::uint64_t seed, std::uint64_t path, std::uint32_t step, double rho)
{
    const auto [g1, g2] = normal_pair(seed, path, step);
    return {g1, rho * g1 + std::sqrt(1.0 - rho * rho) * g2};
}

}  // namespace uvsb
