#include "porolux/numerics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "porolux/parallel.hpp"

namespace porolux {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values, bool symmetric)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(row_offsets)),
      cols_idx_(std::move(col_indices)),
      values_(std::move(values)),
      symmetric_(symmetric) {
    if (offsets_.size() != rows_ + 1 || offsets_.front() != 0 || offsets_.back() != values_.size() ||
        cols_idx_.size() != values_.size()) {
        throw std::invalid_argument("inconsistent CSR structure");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t e = offsets_[r]; e < offsets_[r + 1]; ++e) {
            if (cols_idx_[e] >= cols_ || (e > offsets_[r] && cols_idx_[e] <= cols_idx_[e - 1])) {
                throw std::invalid_argument("CSR column indices must be in range and strictly increasing");
            }
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets,
                                         bool symmetric) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> vals;
    col_idx.reserve(triplets.size());
    vals.reserve(triplets.size());
    for (std::size_t t = 0; t < triplets.size(); ++t) {
        const auto& tr = triplets[t];
        if (tr.row >= rows || tr.col >= cols) {
            throw std::out_of_range("triplet outside matrix bounds");
        }
        if (t > 0 && triplets[t - 1].row == tr.row && triplets[t - 1].col == tr.col) {
            vals.back() += tr.value;
            continue;
        }
        col_idx.push_back(tr.col);
        vals.push_back(tr.value);
        ++offsets[tr.row + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) {
        offsets[r + 1] += offsets[r];
    }
    return SparseMatrix(rows, cols, std::move(offsets), std::move(col_idx), std::move(vals), symmetric);
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows_) {
        throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    }
    const auto n = static_cast<std::ptrdiff_t>(rows_);
    const std::size_t* off = offsets_.data();
    const std::size_t* ci = cols_idx_.data();
    const double* v = values_.data();
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count()) if (n > 16384)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t e = off[r]; e < off[r + 1]; ++e) {
            s += v[e] * x[ci[e]];
        }
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows_, 0.0);
    multiply(x, y);
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<std::size_t> offsets(cols_ + 1, 0);
    for (std::size_t c : cols_idx_) {
        ++offsets[c + 1];
    }
    for (std::size_t c = 0; c < cols_; ++c) {
        offsets[c + 1] += offsets[c];
    }
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    std::vector<std::size_t> col_idx(values_.size());
    std::vector<double> vals(values_.size());
    // Rows are visited in increasing order, so each transposed row comes out sorted.
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t e = offsets_[r]; e < offsets_[r + 1]; ++e) {
            const std::size_t dst = fill[cols_idx_[e]]++;
            col_idx[dst] = r;
            vals[dst] = values_[e];
        }
    }
    return SparseMatrix(cols_, rows_, std::move(offsets), std::move(col_idx), std::move(vals), symmetric_);
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r) {
        d[r] = coefficient(r, r);
    }
    return d;
}

double SparseMatrix::row_sum(std::size_t row) const {
    double s = 0.0;
    for (std::size_t e = offsets_[row]; e < offsets_[row + 1]; ++e) {
        s += values_[e];
    }
    return s;
}

double SparseMatrix::coefficient(std::size_t row, std::size_t col) const {
    const auto first = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
    const auto last = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - cols_idx_.begin())];
}

bool SparseMatrix::values_symmetric(double tol) const {
    if (rows_ != cols_) {
        return false;
    }
    double scale = 0.0;
    for (double v : values_) {
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t e = offsets_[r]; e < offsets_[r + 1]; ++e) {
            if (std::abs(values_[e] - coefficient(cols_idx_[e], r)) > tol * scale) {
                return false;
            }
        }
    }
    return true;
}

void project_mean_zero(std::span<double> v) {
    if (v.empty()) {
        return;
    }
    const double m = parallel::sum(v) / static_cast<double>(v.size());
    for (double& x : v) {
        x -= m;
    }
}

SolveReport cg_solve(const LinearOperator& A, std::span<const double> rhs, std::span<double> x,
                     const CgOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = rhs.size();
    if (x.size() != n) {
        throw std::invalid_argument("cg_solve: solution and rhs sizes differ");
    }
    const bool precondition = !options.jacobi.empty();
    if (precondition && options.jacobi.size() != n) {
        throw std::invalid_argument("cg_solve: Jacobi diagonal has the wrong size");
    }
    auto project = [&](std::span<double> v) {
        if (options.projector) {
            options.projector(v);
        }
    };
    auto apply_preconditioner = [&](std::span<const double> r, std::span<double> z) {
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = precondition && options.jacobi[i] != 0.0 ? r[i] / options.jacobi[i] : r[i];
        }
        project(z);
    };

    SolveReport report;
    std::vector<double> b(rhs.begin(), rhs.end());
    project(b);
    project(x);
    const double bnorm = parallel::norm2(b);
    auto finish = [&]() {
        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    };
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        report.converged = true;
        report.residual_history.push_back(0.0);
        return finish();
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&]() {
        A(x, q);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = b[i] - q[i];
        }
        project(r);
        return parallel::norm2(r) / bnorm;
    };

    double rel = true_residual();
    report.residual_history.push_back(rel);
    report.relative_residual = rel;
    if (rel <= options.tol) {
        report.converged = true;
        return finish();
    }
    apply_preconditioner(r, z);
    p = z;
    double rz = parallel::dot(r, z);

    for (int it = 1; it <= options.maxit; ++it) {
        A(p, q);
        project(q);
        const double pq = parallel::dot(p, q);
        if (!(pq > 0.0) || !std::isfinite(pq)) {
            report.iterations = it;
            break;
        }
        const double alpha = rz / pq;
        parallel::axpy(alpha, p, x);
        parallel::axpy(-alpha, q, r);
        rel = parallel::norm2(r) / bnorm;
        report.iterations = it;
        report.residual_history.push_back(rel);
        report.relative_residual = rel;
        if (rel <= options.tol) {
            rel = true_residual();
            report.relative_residual = rel;
            report.residual_history.back() = rel;
            if (rel <= options.tol) {
                report.converged = true;
                break;
            }
            // Recurrence drifted from the true residual: restart from it.
            apply_preconditioner(r, z);
            p = z;
            rz = parallel::dot(r, z);
            continue;
        }
        apply_preconditioner(r, z);
        const double rz_new = parallel::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    return finish();
}

std::pair<std::vector<double>, SolveReport> cg_solve(const SparseMatrix& A, std::span<const double> rhs,
                                                     double tol, int maxit, const Projector& projector) {
    std::vector<double> x(rhs.size(), 0.0);
    CgOptions options;
    options.tol = tol;
    options.maxit = maxit;
    options.projector = projector;
    auto report = cg_solve([&](std::span<const double> in, std::span<double> out) { A.multiply(in, out); },
                           rhs, x, options);
    return {std::move(x), std::move(report)};
}

std::vector<double> tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                                  std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw std::invalid_argument("tridiag_solve: all bands and rhs must have the same length");
    }
    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
    if (n == 0) {
        return x;
    }
    double pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            pivot = diag[i] - lower[i] * c[i - 1];
        }
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw std::domain_error("tridiag_solve: zero pivot at row " + std::to_string(i));
        }
        c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / pivot;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    return x;
}

OrderEstimate richardson_order(double e1, double e2, double e3, OrderMode mode) {
    OrderEstimate est;
    if (!std::isfinite(e1) || !std::isfinite(e2) || !std::isfinite(e3)) {
        return est;
    }
    double ratio = 0.0;
    if (mode == OrderMode::successive_differences) {
        const double d1 = e1 - e2;
        const double d2 = e2 - e3;
        if (d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0)) {
            return est;
        }
        ratio = d1 / d2;
    } else {
        if (!(e1 > e2 && e2 > e3 && e3 > 0.0)) {
            return est;
        }
        ratio = e2 / e3;
    }
    if (!(ratio > 0.0)) {
        return est;
    }
    est.order = std::log2(ratio);
    est.defined = true;
    return est;
}

namespace quad {

namespace {

std::vector<double> sample(const Integrand& f, double a, double b, int n) {
    std::vector<double> s(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        s[i] = f(i == n ? b : a + (b - a) * (static_cast<double>(i) / n));
    }
    return s;
}

double strided_trapezoid(const std::vector<double>& s, double spacing, std::size_t stride) {
    double acc = 0.5 * (s.front() + s.back());
    for (std::size_t i = stride; i + 1 < s.size(); i += stride) {
        acc += s[i];
    }
    return acc * spacing * static_cast<double>(stride);
}

double strided_nested(const std::vector<double>& s, double spacing, std::size_t stride) {
    const double d = spacing * static_cast<double>(stride);
    // Inner running integral starts at F(0) = 0, which contributes nothing to the outer sum.
    double inner = 0.0;
    double prev = s.front();
    double outer = 0.0;
    double last_inner = 0.0;
    for (std::size_t i = stride; i < s.size(); i += stride) {
        inner += 0.5 * d * (prev + s[i]);
        prev = s[i];
        last_inner = inner;
        outer += inner;
    }
    outer -= 0.5 * last_inner;
    return outer * d;
}

double extrapolate(std::vector<double> t) {
    // t[0] uses the finest spacing; each following entry doubles it.
    double factor = 4.0;
    for (std::size_t level = 1; level < t.size(); ++level) {
        for (std::size_t i = 0; i + level < t.size(); ++i) {
            t[i] = (factor * t[i] - t[i + 1]) / (factor - 1.0);
        }
        factor *= 4.0;
    }
    return t[0];
}

void require_divisible(int n, int levels) {
    if (levels < 1 || n <= 0 || n % (1 << (levels - 1)) != 0) {
        throw std::invalid_argument("Romberg: n must be a positive multiple of 2^(levels-1)");
    }
}

}  // namespace

double trapezoid(std::span<const double> samples, double spacing) {
    if (samples.size() < 2) {
        return 0.0;
    }
    double acc = 0.5 * (samples.front() + samples.back());
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        acc += samples[i];
    }
    return acc * spacing;
}

double trapezoid(const Integrand& f, double a, double b, int n) {
    const auto s = sample(f, a, b, n);
    return trapezoid(s, (b - a) / n);
}

double romberg_trapezoid(const Integrand& f, double a, double b, int n, int levels) {
    require_divisible(n, levels);
    const auto s = sample(f, a, b, n);
    std::vector<double> t;
    for (int l = 0; l < levels; ++l) {
        t.push_back(strided_trapezoid(s, (b - a) / n, std::size_t{1} << l));
    }
    return extrapolate(std::move(t));
}

std::vector<double> cumulative_trapezoid(std::span<const double> samples, double spacing) {
    std::vector<double> out(samples.size(), 0.0);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * spacing * (samples[i - 1] + samples[i]);
    }
    return out;
}

double nested_trapezoid(const Integrand& f, double z, int n) {
    const auto s = sample(f, 0.0, z, n);
    return strided_nested(s, z / n, 1);
}

double romberg_nested_trapezoid(const Integrand& f, double z, int n, int levels) {
    require_divisible(n, levels);
    const auto s = sample(f, 0.0, z, n);
    std::vector<double> t;
    for (int l = 0; l < levels; ++l) {
        t.push_back(strided_nested(s, z / n, std::size_t{1} << l));
    }
    return extrapolate(std::move(t));
}

}  // namespace quad

namespace fd {

double central_first(const Function& f, double z, double h) { return (f(z + h) - f(z - h)) / (2.0 * h); }

double central_second(const Function& f, double z, double h) {
    return (f(z - h) - 2.0 * f(z) + f(z + h)) / (h * h);
}

double forward_first(const Function& f, double z, double h) {
    return (-3.0 * f(z) + 4.0 * f(z + h) - f(z + 2.0 * h)) / (2.0 * h);
}

double backward_first(const Function& f, double z, double h) {
    return (3.0 * f(z) - 4.0 * f(z - h) + f(z - 2.0 * h)) / (2.0 * h);
}

}  // namespace fd

}  // namespace porolux
