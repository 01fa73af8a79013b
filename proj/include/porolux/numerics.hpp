#pragma once

// CSR matrices, conjugate gradients, Thomas algorithm, trapezoid quadrature,
// difference stencils and observed-order estimates.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace porolux {

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Compressed sparse row matrix with sorted column indices in every row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                 std::vector<std::size_t> col_indices, std::vector<double> values, bool symmetric = false);

    /// Duplicate (row, col) entries are summed; explicit zeros are kept.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets,
                                      bool symmetric = false);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool symmetric() const noexcept { return symmetric_; }

    std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return cols_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// y = A x. Rows are processed in parallel; each row sums in column order.
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    SparseMatrix transpose() const;
    std::vector<double> diagonal() const;
    double row_sum(std::size_t row) const;
    double coefficient(std::size_t row, std::size_t col) const;
    /// True when |a_ij - a_ji| <= tol * max|a| for every stored entry.
    bool values_symmetric(double tol) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_idx_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    double wall_seconds = 0.0;
    /// Relative residual after every iteration (index 0 is the initial residual).
    std::vector<double> residual_history;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;
/// Removes a null-space component in place.
using Projector = std::function<void(std::span<double>)>;

/// Subtracts the arithmetic mean (the constant null space of pure-Neumann operators).
void project_mean_zero(std::span<double> v);

struct CgOptions {
    double tol = 1e-10;
    int maxit = 1000;
    Projector projector;
    /// Diagonal for Jacobi preconditioning; empty means unpreconditioned.
    std::vector<double> jacobi;
};

/**
 * Conjugate gradients on a symmetric positive (semi)definite operator, starting
 * from the contents of x. With a projector the rhs, residuals and search
 * directions are kept in the complement of the null space, so x stays there too.
 * Convergence means ||P(rhs - A x)|| <= tol ||P rhs||, checked on the true residual.
 * Non-convergence and breakdown are reported, not thrown.
 */
SolveReport cg_solve(const LinearOperator& A, std::span<const double> rhs, std::span<double> x,
                     const CgOptions& options);

std::pair<std::vector<double>, SolveReport> cg_solve(const SparseMatrix& A, std::span<const double> rhs,
                                                     double tol, int maxit, const Projector& projector = {});

/**
 * Thomas algorithm. Row i reads lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1];
 * lower[0] and upper[n-1] are ignored. Throws std::domain_error on a zero pivot.
 */
std::vector<double> tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                                  std::span<const double> upper, std::span<const double> rhs);

enum class OrderMode {
    /// log2((e1 - e2) / (e2 - e3)): three values of one quantity at n, 2n, 4n.
    successive_differences,
    /// log2(e2 / e3): errors against an exact reference at n, 2n, 4n.
    exact_reference,
};

struct OrderEstimate {
    double order = std::numeric_limits<double>::quiet_NaN();
    bool defined = false;
};

/// Observed order from resolutions n, 2n, 4n; undefined for non-monotone input.
OrderEstimate richardson_order(double e1, double e2, double e3,
                               OrderMode mode = OrderMode::successive_differences);

namespace quad {

using Integrand = std::function<double(double)>;

/// Composite trapezoid over uniformly spaced samples.
double trapezoid(std::span<const double> samples, double spacing);
double trapezoid(const Integrand& f, double a, double b, int n);

/// Romberg extrapolation of trapezoid sums on n, n/2, ... n/2^(levels-1) intervals,
/// all drawn from the same n+1 samples. n must be divisible by 2^(levels-1).
double romberg_trapezoid(const Integrand& f, double a, double b, int n, int levels = 3);

/// Running trapezoid integral F(z_i) = ∫_0^{z_i} f on the sample grid.
std::vector<double> cumulative_trapezoid(std::span<const double> samples, double spacing);

/// ∫_0^z ∫_0^τ f(s) ds dτ by an inner running trapezoid and an outer trapezoid.
double nested_trapezoid(const Integrand& f, double z, int n);

/// Romberg extrapolation of nested_trapezoid over n, n/2, ... intervals.
double romberg_nested_trapezoid(const Integrand& f, double z, int n, int levels = 3);

}  // namespace quad

namespace fd {

using Function = std::function<double(double)>;

double central_first(const Function& f, double z, double h);
double central_second(const Function& f, double z, double h);
/// Second-order one-sided difference (-3 f(z) + 4 f(z+h) - f(z+2h)) / 2h.
double forward_first(const Function& f, double z, double h);
/// Second-order one-sided difference (3 f(z) - 4 f(z-h) + f(z-2h)) / 2h.
double backward_first(const Function& f, double z, double h);

}  // namespace fd

}  // namespace porolux
