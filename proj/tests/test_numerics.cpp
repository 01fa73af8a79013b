#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "porolux/numerics.hpp"
#include "porolux/parallel.hpp"

using namespace porolux;

namespace {

// 1D Laplacian, Dirichlet at both ends (scaled by 1/dx^2).
SparseMatrix poisson_1d(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({std::size_t(i), std::size_t(i), 2.0});
        if (i > 0) t.push_back({std::size_t(i), std::size_t(i - 1), -1.0});
        if (i + 1 < n) t.push_back({std::size_t(i), std::size_t(i + 1), -1.0});
    }
    return SparseMatrix::from_triplets(n, n, t, true);
}

// 2D five-point Laplacian with zero-flux boundaries: singular, constants in the kernel.
SparseMatrix neumann_2d(int n) {
    std::vector<Triplet> t;
    auto id = [n](int i, int j) { return std::size_t(j * n + i); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int a = i + di[d], b = j + dj[d];
                if (a < 0 || b < 0 || a >= n || b >= n) continue;
                t.push_back({id(i, j), id(i, j), 1.0});
                t.push_back({id(i, j), id(a, b), -1.0});
            }
        }
    }
    return SparseMatrix::from_triplets(n * n, n * n, t, true);
}

std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace

TEST_CASE("CSR assembly") {
    const SparseMatrix A = SparseMatrix::from_triplets(
        3, 3, {{2, 0, 1.0}, {0, 1, 2.0}, {0, 1, 3.0}, {1, 1, 4.0}, {0, 0, 0.0}, {2, 2, -1.0}});
    CHECK(A.nnz() == 5u);
    CHECK(A.coefficient(0, 1) == 5.0);
    CHECK(A.coefficient(0, 0) == 0.0);
    CHECK(A.coefficient(1, 2) == 0.0);
    const auto cols = A.col_indices();
    CHECK(cols[0] == 0u);
    CHECK(cols[1] == 1u);
    const SparseMatrix At = A.transpose();
    CHECK(At.coefficient(1, 0) == 5.0);
    CHECK(At.coefficient(0, 2) == 1.0);
    CHECK_FALSE(A.values_symmetric(1e-14));
    CHECK(poisson_1d(5).values_symmetric(0.0));
    const std::vector<double> x{1.0, 2.0, 3.0};
    const auto y = A.multiply(x);
    CHECK(y[0] == 10.0);
    CHECK(y[1] == 8.0);
    CHECK(y[2] == -2.0);
    CHECK(A.row_sum(0) == 5.0);
    CHECK_THROWS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}));
}

TEST_CASE("CG on the identity takes one iteration") {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 10; ++i) t.push_back({i, i, 1.0});
    const SparseMatrix I = SparseMatrix::from_triplets(10, 10, t, true);
    std::vector<double> b(10);
    std::iota(b.begin(), b.end(), 1.0);
    const auto [x, rep] = cg_solve(I, b, 1e-14, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    for (int i = 0; i < 10; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("CG matches the tridiagonal solver on 1D Poisson") {
    const int n = 32;
    const SparseMatrix A = poisson_1d(n);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = std::sin(0.3 * i) + 0.1 * i;
    const auto [x, rep] = cg_solve(A, b, 1e-14, 200);
    REQUIRE(rep.converged);
    const std::vector<double> lo(n, -1.0), di(n, 2.0), up(n, -1.0);
    const auto xt = tridiag_solve(lo, di, up, b);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        err = std::max(err, std::abs(x[i] - xt[i]));
        scale = std::max(scale, std::abs(xt[i]));
    }
    CHECK(err <= 1e-10 * scale);
}

TEST_CASE("CG error decreases monotonically in the energy norm") {
    // Plain CG minimises the A-norm of the error over growing Krylov spaces, so
    // that norm is non-increasing. The residual 2-norm carries no such guarantee.
    const int n = 40;
    const SparseMatrix A = poisson_1d(n);
    std::vector<double> b(n, 1.0);
    const auto [xs, rs] = cg_solve(A, b, 1e-15, 500);
    REQUIRE(rs.converged);
    double previous = INFINITY;
    for (int it = 1; it <= rs.iterations; ++it) {
        std::vector<double> x(n, 0.0);
        CgOptions opt;
        opt.tol = 1e-300;
        opt.maxit = it;
        cg_solve([&](std::span<const double> in, std::span<double> out) { A.multiply(in, out); }, b, x, opt);
        std::vector<double> e(n);
        for (int i = 0; i < n; ++i) e[i] = x[i] - xs[i];
        const auto Ae = A.multiply(e);
        const double energy = std::sqrt(std::max(0.0, parallel::dot(e, Ae)));
        CHECK(energy <= previous * (1.0 + 1e-12) + 1e-13);
        previous = energy;
    }
}

TEST_CASE("singular Neumann Laplacian needs the mean projector") {
    const int n = 12;
    const SparseMatrix A = neumann_2d(n);
    std::vector<double> b(n * n);
    for (int i = 0; i < n * n; ++i) b[i] = std::cos(0.7 * i);
    project_mean_zero(b);

    const auto [x, rep] = cg_solve(A, b, 1e-10, 2000, project_mean_zero);
    CHECK(rep.converged);
    CHECK(std::abs(std::accumulate(x.begin(), x.end(), 0.0)) <= 1e-10);
    const auto r = A.multiply(x);
    double err = 0.0;
    for (int i = 0; i < n * n; ++i) err = std::max(err, std::abs(r[i] - b[i]));
    CHECK(err <= 1e-8);

    // A constant shift makes the rhs inconsistent. Without the projector CG
    // cannot reduce the residual and has to report failure; with it the
    // shift is removed and the solve succeeds.
    std::vector<double> shifted = b;
    for (double& v : shifted) v += 0.5;
    const auto [xbad, bad] = cg_solve(A, shifted, 1e-10, 2000);
    CHECK_FALSE(bad.converged);
    const auto [xgood, good] = cg_solve(A, shifted, 1e-10, 2000, project_mean_zero);
    CHECK(good.converged);
}

TEST_CASE("CG with a zero rhs returns zero") {
    const SparseMatrix A = poisson_1d(8);
    const std::vector<double> b(8, 0.0);
    const auto [x, rep] = cg_solve(A, b, 1e-12, 10);
    CHECK(rep.converged);
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("Thomas algorithm") {
    const std::vector<double> one(5, 1.0), zero(5, 0.0), rhs{1, 2, 3, 4, 5};
    const auto x = tridiag_solve(zero, one, zero, rhs);
    for (int i = 0; i < 5; ++i) CHECK(x[i] == rhs[i]);

    const int n = 50;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> lo(n), di(n), up(n), b(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = u(rng);
        up[i] = u(rng);
        di[i] = 3.0 + u(rng);
        b[i] = u(rng);
    }
    const auto xt = tridiag_solve(lo, di, up, b);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        dense[i][i] = di[i];
        if (i > 0) dense[i][i - 1] = lo[i];
        if (i + 1 < n) dense[i][i + 1] = up[i];
    }
    const auto xd = dense_solve(dense, b);
    double bnorm = 0.0, res = 0.0;
    for (int i = 0; i < n; ++i) {
        CHECK(xt[i] == doctest::Approx(xd[i]).epsilon(1e-12));
        double r = di[i] * xt[i] - b[i];
        if (i > 0) r += lo[i] * xt[i - 1];
        if (i + 1 < n) r += up[i] * xt[i + 1];
        res += r * r;
        bnorm += b[i] * b[i];
    }
    CHECK(std::sqrt(res) <= 1e-12 * std::sqrt(bnorm));

    const std::vector<double> z3(3, 0.0), bad{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(tridiag_solve(z3, bad, z3, bad), std::domain_error);
}

TEST_CASE("observed order") {
    const auto a = richardson_order(4.0, 1.0, 0.25);
    CHECK(a.defined);
    CHECK(a.order == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(richardson_order(4.0, 1.0, 0.25, OrderMode::exact_reference).order == doctest::Approx(2.0));
    CHECK(richardson_order(2.0, 1.0, 0.5, OrderMode::exact_reference).order == doctest::Approx(1.0));
    CHECK_FALSE(richardson_order(1.0, 1.0, 1.0).defined);
    CHECK_FALSE(richardson_order(1.0, 2.0, 0.5).defined);
    CHECK_FALSE(richardson_order(1.0, 2.0, 3.0, OrderMode::exact_reference).defined);
}

TEST_CASE("trapezoid family") {
    auto one = [](double) { return 1.0; };
    auto lin = [](double z) { return z; };
    auto sq = [](double z) { return z * z; };
    CHECK(quad::trapezoid(one, 0.0, 1.0, 7) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(quad::trapezoid(lin, 0.0, 1.0, 3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(quad::trapezoid(sq, 0.0, 1.0, 1024) - 1.0 / 3.0) <= 1e-6);
    CHECK(std::abs(quad::romberg_trapezoid([](double z) { return std::pow(z, 5); }, 0.0, 1.0, 64) - 1.0 / 6.0) <=
          1e-15);
    CHECK(quad::nested_trapezoid(one, 0.8, 16) == doctest::Approx(0.32).epsilon(1e-15));
    CHECK(std::abs(quad::romberg_nested_trapezoid(sq, 1.0, 256) - 1.0 / 12.0) <= 1e-14);
    CHECK_THROWS(quad::romberg_trapezoid(sq, 0.0, 1.0, 6, 3));

    const std::vector<double> s{0.0, 1.0, 2.0, 3.0};
    const auto F = quad::cumulative_trapezoid(s, 0.5);
    CHECK(F.size() == 4u);
    CHECK(F[0] == 0.0);
    CHECK(F[3] == doctest::Approx(2.25));
}

TEST_CASE("finite differences are exact on quadratics") {
    auto q = [](double z) { return 3.0 * z * z - 2.0 * z + 1.0; };
    CHECK(fd::central_first(q, 0.4, 0.1) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(fd::forward_first(q, 0.0, 0.1) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fd::backward_first(q, 1.0, 0.1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fd::central_second(q, 0.3, 0.1) == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("reductions do not depend on the thread count") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(100003), b(100003);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        b[i] = u(rng) * 1e6;
    }
    parallel::set_thread_count(1);
    const double d1 = parallel::dot(a, b), s1 = parallel::sum(b);
    parallel::set_thread_count(4);
    const double d4 = parallel::dot(a, b), s4 = parallel::sum(b);
    parallel::set_thread_count(0);
    CHECK(d1 == d4);
    CHECK(s1 == s4);
}
