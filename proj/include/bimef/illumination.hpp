#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bimef/image.hpp"

namespace bimef {

enum class Direction { horizontal, vertical };

enum class Preconditioner {
    jacobi,
    incomplete_cholesky,           // IC(0) on the five-point pattern
    modified_incomplete_cholesky,  // MIC(0): IC(0) with row sums preserved
};

struct SolverConfig {
    double lambda = 1.0;
    double epsilon = 1e-3;
    int window = 5;
    double pcg_tol = 1e-5;
    int pcg_max_iter = 1000;
    Preconditioner preconditioner = Preconditioner::modified_incomplete_cholesky;

    /// Throws ArgumentError if lambda < 0, epsilon <= 0, or window is not odd and >= 1.
    void validate() const;
};

/// Symmetric positive-definite five-point system A t = rhs with
/// A = I + sum_d D_d^T diag(w_d) D_d.
///
/// Stored as the per-pixel weight of the forward edge to the right
/// neighbour (`east`) and to the lower neighbour (`south`); the last
/// column's east weight and the last row's south weight are zero.
class SparseSystem {
public:
    SparseSystem(int width, int height, std::vector<double> east, std::vector<double> south,
                 std::vector<double> rhs);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t dimension() const noexcept { return rhs_.size(); }

    std::span<const double> east() const noexcept { return east_; }
    std::span<const double> south() const noexcept { return south_; }
    std::span<const double> rhs() const noexcept { return rhs_; }
    std::span<const double> diagonal() const noexcept { return diag_; }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// A(row, col), zero outside the stencil.
    double coefficient(std::size_t row, std::size_t col) const;

    /// Row-major dense copy; for verification on small grids.
    std::vector<double> to_dense() const;

    /// sum (t - rhs)^2 + sum_d w_d (D_d t)^2, the quadratic energy A minimizes.
    double energy(std::span<const double> t) const;

private:
    int width_;
    int height_;
    std::vector<double> east_;
    std::vector<double> south_;
    std::vector<double> rhs_;
    std::vector<double> diag_;
};

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Forward difference along `direction`; zero on the trailing row/column.
ScalarMap gradient(const ScalarMap& map, Direction direction);

/// Structure-aware weights M_d(x) = 1 / (|sum over window of grad_d L| + eps),
/// window of length cfg.window centred at x along d, truncated at borders.
std::pair<ScalarMap, ScalarMap> texture_weights(const ScalarMap& L, const SolverConfig& cfg);

/// Edge weights w_d = lambda * M_d / (|grad_d L| + eps); rhs = L.
SparseSystem assemble_system(const ScalarMap& L, const ScalarMap& M_h, const ScalarMap& M_v,
                             const SolverConfig& cfg);

/// Unclamped preconditioned conjugate-gradient solve of `system`.
/// Throws SolverError when the residual target is missed.
std::vector<double> solve_raw(const SparseSystem& system, const SolverConfig& cfg,
                              SolveReport* report = nullptr);

/// solve_raw reshaped to the grid and clamped to [epsilon, 1].
ScalarMap solve(const SparseSystem& system, const SolverConfig& cfg,
                SolveReport* report = nullptr);

/// lightness -> texture_weights -> assemble_system -> solve.
ScalarMap estimate_illumination(const Image& img, const SolverConfig& cfg,
                                SolveReport* report = nullptr);

}  // namespace bimef
