#include "uvsb/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace uvsb {

namespace {

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<double> multiply(const TriDiag& s, std::span<const double> v)
{
    const std::size_t n = s.main.size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = s.main[k] * v[k];
        if (k > 0) acc += s.lower[k - 1] * v[k - 1];
        if (k + 1 < n) acc += s.upper[k] * v[k + 1];
        out[k] = acc;
    }
    return out;
}

std::vector<double> solve_tridiag(const TriDiag& s, std::span<const double> rhs, double lin_tol)
{
    const std::size_t n = s.main.size();
    if (n == 0 || rhs.size() != n || s.lower.size() + 1 != n || s.upper.size() + 1 != n) {
        throw LinearSolveError("tridiagonal system has inconsistent lengths", -1, {});
    }

    std::vector<double> c(n), x(n);
    auto pivot_check = [&](double pivot, std::size_t k) {
        double scale = std::abs(s.main[k]);
        if (k > 0) scale += std::abs(s.lower[k - 1]);
        if (k + 1 < n) scale += std::abs(s.upper[k]);
        if (!(std::abs(pivot) > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
            throw LinearSolveError("singular pivot in tridiagonal solve at row " + std::to_string(k),
                                   static_cast<int>(k), {});
        }
    };

    double pivot = s.main[0];
    pivot_check(pivot, 0);
    c[0] = n > 1 ? s.upper[0] / pivot : 0.0;
    x[0] = rhs[0] / pivot;
    for (std::size_t k = 1; k < n; ++k) {
        pivot = s.main[k] - s.lower[k - 1] * c[k - 1];
        pivot_check(pivot, k);
        c[k] = k + 1 < n ? s.upper[k] / pivot : 0.0;
        x[k] = (rhs[k] - s.lower[k - 1] * x[k - 1]) / pivot;
    }
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];

    const auto ax = multiply(s, x);
    double res = 0.0;
    for (std::size_t k = 0; k < n; ++k) res = std::max(res, std::abs(rhs[k] - ax[k]));
    if (!(res <= lin_tol * (1.0 + max_abs(rhs)))) {
        throw LinearSolveError("tridiagonal residual " + std::to_string(res) + " above tolerance", -1, {res});
    }
    return x;
}

void BandedSystem::add(int r, int col, double value)
{
    if (r < 0 || r >= size() || col < 0 || col >= size()) {
        throw LinearSolveError("banded entry out of range", r, {});
    }
    auto& row = rows_[static_cast<std::size_t>(r)];
    for (int k = 0; k < row.count; ++k) {
        if (row.col[k] == col) {
            row.val[k] += value;
            return;
        }
    }
    if (row.count == max_row_entries) throw LinearSolveError("banded row exceeds nine entries", r, {});
    row.col[row.count] = col;
    row.val[row.count] = value;
    ++row.count;
}

double BandedSystem::coeff(int r, int col) const
{
    const auto& row = rows_[static_cast<std::size_t>(r)];
    for (int k = 0; k < row.count; ++k) {
        if (row.col[k] == col) return row.val[k];
    }
    return 0.0;
}

std::vector<double> BandedSystem::multiply(std::span<const double> v) const
{
    std::vector<double> out(rows_.size());
    const int n = size();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const auto& row = rows_[static_cast<std::size_t>(r)];
        double acc = 0.0;
        for (int k = 0; k < row.count; ++k) acc += row.val[k] * v[static_cast<std::size_t>(row.col[k])];
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

bool BandedSystem::has_symmetric_pattern() const
{
    for (int r = 0; r < size(); ++r) {
        const auto& row = rows_[static_cast<std::size_t>(r)];
        for (int k = 0; k < row.count; ++k) {
            const auto& other = rows_[static_cast<std::size_t>(row.col[k])];
            const bool found = std::find(other.col.begin(), other.col.begin() + other.count, r)
                               != other.col.begin() + other.count;
            if (!found) return false;
        }
    }
    return true;
}

BandedSystem BandedSystem::scaled_plus_identity(double a, double b) const
{
    BandedSystem out = *this;
    for (int r = 0; r < size(); ++r) {
        auto& row = out.rows_[static_cast<std::size_t>(r)];
        for (int k = 0; k < row.count; ++k) row.val[k] *= a;
        out.add(r, r, b);
    }
    return out;
}

BandedSolveResult solve_banded(const BandedSystem& sys, std::span<const double> rhs, const BandedSolveOptions& opts)
{
    const int n = sys.size();
    if (static_cast<int>(rhs.size()) != n) throw LinearSolveError("banded rhs length mismatch", -1, {});

    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * BandedSystem::max_row_entries);
    for (int r = 0; r < n; ++r) {
        const auto& row = sys.row(r);
        for (int k = 0; k < row.count; ++k) {
            if (!std::isfinite(row.val[k])) throw LinearSolveError("non-finite matrix entry", r, {});
            triplets.emplace_back(r, row.col[k], row.val[k]);
        }
    }
    SpMat A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);

    const double tol = opts.lin_tol * (1.0 + max_abs(rhs));
    auto residual = [&](const Eigen::VectorXd& x) {
        return n == 0 ? 0.0 : (b - A * x).cwiseAbs().maxCoeff();
    };

    BandedSolveResult out;
    const bool direct = opts.strategy == LinearStrategy::direct
                        || (opts.strategy == LinearStrategy::automatic && n <= opts.direct_limit);
    Eigen::VectorXd x;
    if (direct) {
        out.method = "sparse-lu";
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw LinearSolveError("sparse LU factorization failed: " + lu.lastErrorMessage(), -1, {});
        }
        x = lu.solve(b);
        out.residual = residual(x);
        out.residual_history.push_back(out.residual);
        // One step of iterative refinement when round-off is marginal.
        if (!(out.residual <= tol)) {
            x += lu.solve(b - A * x);
            out.residual = residual(x);
            out.residual_history.push_back(out.residual);
        }
    } else {
        out.method = "bicgstab-jacobi";
        Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> it;
        it.compute(A);
        it.setTolerance(std::max(opts.lin_tol * 1e-3, std::numeric_limits<double>::epsilon()));
        constexpr int chunk = 25;
        it.setMaxIterations(chunk);
        x = b;
        while (out.iterations < opts.max_iterations) {
            x = it.solveWithGuess(b, x);
            out.iterations += static_cast<int>(it.iterations());
            out.residual = residual(x);
            out.residual_history.push_back(out.residual);
            if (out.residual <= tol || it.iterations() == 0) break;
        }
    }
    if (!(out.residual <= tol)) {
        throw LinearSolveError(out.method + " residual " + std::to_string(out.residual) + " above tolerance "
                                   + std::to_string(tol),
                               -1, out.residual_history);
    }
    out.x.assign(x.data(), x.data() + n);
    return out;
}

}  // namespace uvsb
