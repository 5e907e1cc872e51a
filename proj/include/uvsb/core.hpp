#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvsb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, grid specifications or configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical solver (linear algebra, time stepping).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Market and CIR parameters.
///
/// Defaults are the butterfly experiment preset: X0 = 100, Z0 = 0.04,
/// T = 0.25, r = 0, d = 0.75, u = 1.25, kappa = 15, theta = 0.04,
/// rho = -0.9 and delta = 0.05.
struct ModelParams {
    double x0 = 100.0;
    double z0 = 0.04;
    double T = 0.25;
    double r = 0.0;
    double d = 0.75;
    double u = 1.25;
    double kappa = 15.0;
    double theta = 0.04;
    double delta = 0.05;
    double rho = -0.9;
};

struct ParamViolation {
    std::string field;
    std::string rule;
    bool unsupported = false;  // valid model, but outside what the solvers implement
};

/// Lists every violated invariant of `p`; empty when all hold.
std::vector<ParamViolation> validate_params(const ModelParams& p);

/// Throws ConfigError naming every violation.
void require_valid(const ModelParams& p);

/// Uniform discretization of (x, z) and time.
///
/// Counts are node counts: spacing is (max - min) / (count - 1).  A single
/// z node (n_z = 1, z_min = z_max) is a degenerate one-slice grid.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 200.0;
    int n_x = 101;
    double z_min = 0.0;
    double z_max = 0.12;
    int n_z = 100;
    int n_t = 20;
};

std::vector<std::string> validate_grid(const GridSpec& spec);

/// Coordinates built from a GridSpec and a maturity.
struct Grid2D {
    GridSpec spec;
    double maturity = 0.0;
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> t;
    double dx = 0.0;
    double dz = 0.0;
    double dt = 0.0;

    int nx() const { return static_cast<int>(x.size()); }
    int nz() const { return static_cast<int>(z.size()); }
    int nt() const { return static_cast<int>(t.size()) - 1; }
    std::size_t size() const { return x.size() * z.size(); }
    std::size_t index(int i, int j) const
    {
        return static_cast<std::size_t>(j) * x.size() + static_cast<std::size_t>(i);
    }
    bool same_shape(const Grid2D& other) const
    {
        return x == other.x && z == other.z;
    }
};

using GridPtr = std::shared_ptr<const Grid2D>;

/// Throws ConfigError on invalid spec or non-positive maturity.
GridPtr build_grid(const GridSpec& spec, double maturity);

/// Mutable dense (x, z) array; storage is z-major so that each x-line at
/// fixed z_j is contiguous.
class Field {
public:
    Field() = default;
    Field(int nx, int nz, double fill = 0.0);

    int nx() const { return nx_; }
    int nz() const { return nz_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[idx(i, j)]; }
    double operator()(int i, int j) const { return data_[idx(i, j)]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<double> line(int j) { return {data_.data() + idx(0, j), static_cast<std::size_t>(nx_)}; }
    std::span<const double> line(int j) const
    {
        return {data_.data() + idx(0, j), static_cast<std::size_t>(nx_)};
    }

    bool operator==(const Field&) const = default;

private:
    std::size_t idx(int i, int j) const
    {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }

    int nx_ = 0;
    int nz_ = 0;
    std::vector<double> data_;
};

/// Immutable real-valued field over the grid at one time level.
class Surface {
public:
    /// Throws ConfigError if `values` does not match the grid or holds a
    /// non-finite entry.
    Surface(GridPtr grid, int time_index, Field values);

    static Surface filled(GridPtr grid, int time_index, double value);

    const Grid2D& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int time_index() const { return time_index_; }
    const Field& field() const { return values_; }

    double operator()(int i, int j) const { return values_(i, j); }
    std::span<const double> line(int j) const { return values_.line(j); }

    /// Bilinear interpolation; coordinates are clamped to the grid box.
    double sample(double x, double z) const;

private:
    GridPtr grid_;
    int time_index_ = 0;
    Field values_;
};

enum class OptimizerMode { guarded, paper_exact };
enum class LinearStrategy { automatic, direct, iterative };

struct SolverConfig {
    double cn_weight = 0.5;
    int corrector_passes = 1;
    double gamma_eps = 1e-5;
    double lin_tol = 1e-10;
    int rannacher_steps = 2;
    OptimizerMode mode = OptimizerMode::guarded;
    LinearStrategy linear = LinearStrategy::automatic;
    // Unknown count above which the automatic strategy goes iterative.
    int direct_limit = 250000;
    bool keep_history = false;
};

/// Defaults with gamma_eps scaled to the spot level (1e-9 * x0^2).
SolverConfig default_solver_config(const ModelParams& p);

/// Throws ConfigError on invalid settings.
void validate(const SolverConfig& cfg);

std::string to_string(OptimizerMode mode);
std::string to_string(LinearStrategy strategy);

}  // namespace uvsb

namespace uvsb {

/// Process-wide count of full solves, used to check that experiments reuse
/// the leading-order and correction surfaces.
struct SolveCounts {
    long p0p1 = 0;
    long pdelta = 0;
};

SolveCounts solve_counts();
void reset_solve_counts();

namespace detail {
void count_p0p1_solve();
void count_pdelta_solve();
}  // namespace detail

}  // namespace uvsb
