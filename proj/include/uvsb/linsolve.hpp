#pragma once

#include "uvsb/core.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace uvsb {

/// Raised when a solve cannot produce an acceptable residual.
class LinearSolveError : public SolverError {
public:
    LinearSolveError(const std::string& what, int row, std::vector<double> residual_history)
        : SolverError(what), row_(row), history_(std::move(residual_history))
    {
    }

    /// Offending row for pivot failures, -1 otherwise.
    int row() const { return row_; }
    const std::vector<double>& residual_history() const { return history_; }

private:
    int row_;
    std::vector<double> history_;
};

/// lower[k] couples row k+1 to row k; upper[k] couples row k to row k+1.
struct TriDiag {
    std::vector<double> lower;
    std::vector<double> main;
    std::vector<double> upper;
};

/// Thomas algorithm.  The residual max-norm is checked against
/// lin_tol * (1 + |rhs|_inf) and a LinearSolveError is raised when the
/// check fails or a pivot vanishes.
std::vector<double> solve_tridiag(const TriDiag& sys, std::span<const double> rhs, double lin_tol = 1e-10);

std::vector<double> multiply(const TriDiag& sys, std::span<const double> v);

/// Sparse matrix whose rows hold at most nine entries: the 2D
/// Crank-Nicolson footprint (centre, four axial and four diagonal
/// neighbours).
class BandedSystem {
public:
    static constexpr int max_row_entries = 9;

    struct Row {
        std::array<int, max_row_entries> col{};
        std::array<double, max_row_entries> val{};
        int count = 0;
    };

    explicit BandedSystem(int n = 0) : rows_(static_cast<std::size_t>(n)) {}

    int size() const { return static_cast<int>(rows_.size()); }

    /// Accumulates into an existing (row, col) entry or appends one; throws
    /// when a row would exceed nine entries.
    void add(int row, int col, double value);

    const Row& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }
    double coeff(int row, int col) const;

    std::vector<double> multiply(std::span<const double> v) const;

    /// Structural symmetry of the stored pattern (explicit zeros count).
    bool has_symmetric_pattern() const;

    /// a * this + b * I.
    BandedSystem scaled_plus_identity(double a, double b) const;

private:
    std::vector<Row> rows_;
};

struct BandedSolveOptions {
    double lin_tol = 1e-10;
    LinearStrategy strategy = LinearStrategy::automatic;
    int direct_limit = 250000;
    int max_iterations = 2000;
};

struct BandedSolveResult {
    std::vector<double> x;
    double residual = 0.0;  // max-norm of rhs - A x
    int iterations = 0;     // 0 for the direct path
    std::string method;
    std::vector<double> residual_history;
};

/// Direct sparse LU, or BiCGSTAB with a diagonal preconditioner for large
/// systems.  Acceptance is residual-based: |rhs - A x|_inf must not exceed
/// lin_tol * (1 + |rhs|_inf), else LinearSolveError carries the history.
BandedSolveResult solve_banded(const BandedSystem& sys, std::span<const double> rhs,
                               const BandedSolveOptions& opts = {});

}  // namespace uvsb
