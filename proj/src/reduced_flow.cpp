#include "porolux/reduced_flow.hpp"

#include "porolux/parallel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace porolux {

namespace {

// x - tanh(x) for x >= 0. The alternating series covers the range where the
// direct difference would lose most of its digits.
double x_minus_tanh(double x) {
    if (x < 0.1) {
        const double x2 = x * x;
        double s = 929569.0 / 638512875.0;
        s = s * x2 - 21844.0 / 6081075.0;
        s = s * x2 + 1382.0 / 155925.0;
        s = s * x2 - 62.0 / 2835.0;
        s = s * x2 + 17.0 / 315.0;
        s = s * x2 - 2.0 / 15.0;
        s = s * x2 + 1.0 / 3.0;
        return s * x2 * x;
    }
    return x - std::tanh(x);
}

void require_gap(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        std::ostringstream msg;
        msg << "gap height must be finite and > 0 (got " << h << ")";
        throw std::invalid_argument(msg.str());
    }
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string("grid mismatch: ") + what);
    }
}

}  // namespace

double mobility_coefficient(const PhysicalParams& params, double h) {
    require_gap(h);
    const double M = params.M();
    return params.kappa() * (2.0 / M) * x_minus_tanh(0.5 * M * h);
}

ProfileCoeffs profile_coeffs(const PhysicalParams& params, double h) {
    require_gap(h);
    ProfileCoeffs c;
    c.M = params.M();
    c.h = h;
    c.Kmu = params.kappa();
    const double e = std::exp(-c.M * h);
    c.A1 = -c.Kmu * e / (1.0 + e);
    c.A2 = -c.Kmu / (1.0 + e);
    return c;
}

double eval_profile(const ProfileCoeffs& c, double z) {
    if (!(z >= 0.0 && z <= c.h)) {
        std::ostringstream msg;
        msg << "z = " << z << " outside [0, " << c.h << "]";
        throw std::out_of_range(msg.str());
    }
    // (1 - e^{-Mz}) (1 - e^{-M(h-z)}) / (1 + e^{-Mh}), scaled by K/mu.
    const double lo = -std::expm1(-c.M * z);
    const double hi = -std::expm1(-c.M * (c.h - z));
    return c.Kmu * lo * hi / (1.0 + std::exp(-c.M * c.h));
}

double eval_profile_slope(const ProfileCoeffs& c, double z) {
    if (!(z >= 0.0 && z <= c.h)) {
        std::ostringstream msg;
        msg << "z = " << z << " outside [0, " << c.h << "]";
        throw std::out_of_range(msg.str());
    }
    // K/mu M (e^{-Mz} - e^{-M(h-z)}) / (1 + e^{-Mh}), written around the closer wall.
    const double denom = 1.0 + std::exp(-c.M * c.h);
    if (2.0 * z <= c.h) {
        return -c.Kmu * c.M * std::exp(-c.M * z) * std::expm1(-c.M * (c.h - 2.0 * z)) / denom;
    }
    const double w = c.h - z;
    return c.Kmu * c.M * std::exp(-c.M * w) * std::expm1(-c.M * (c.h - 2.0 * w)) / denom;
}

double column_flux(const PhysicalParams& params, double h) {
    require_gap(h);
    const double M = params.M();
    const double H = M * h;
    if (H < 2.0) {
        // x cosh x - sinh x = sum_{n>=1} 2n x^{2n+1} / (2n+1)!, all terms positive.
        const double x = 0.5 * H;
        const double x2 = x * x;
        double term = x * x2 / 6.0;  // x^3 / 3!
        double s = 0.0;
        for (int n = 1; n < 40; ++n) {
            const double add = 2.0 * n * term;
            s += add;
            if (add < 1e-18 * s) {
                break;
            }
            term *= x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        }
        return params.kappa() * (2.0 / M) * s / std::cosh(x);
    }
    const double e = std::exp(-H);
    return params.kappa() * (h - (2.0 / M) * (-std::expm1(-H)) / (1.0 + e));
}

ReynoldsSystem assemble_reynolds(const Grid2D& grid, const GapField& gap, const PhysicalParams& params,
                                 const VectorField2D& forcing) {
    require_same_grid(grid, gap.grid, "gap field");
    require_same_grid(grid, forcing.grid, "forcing field");

    ReynoldsSystem sys;
    sys.grid = grid;
    sys.mobility.resize(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const double c = mobility_coefficient(params, gap.values[idx]);
        if (!(c > 0.0) || !std::isfinite(c)) {
            std::ostringstream msg;
            msg << "mobility " << c << " <= 0 at cell " << idx % grid.nx << ", " << idx / grid.nx;
            throw std::domain_error(msg.str());
        }
        sys.mobility[idx] = c;
    }

    const double dx = grid.dx();
    const double dy = grid.dy();
    std::vector<Triplet> triplets;
    triplets.reserve(5 * grid.size());
    sys.rhs.assign(grid.size(), 0.0);

    auto face = [&](std::size_t P, std::size_t N, double area, double dist, double fn) {
        const double cP = sys.mobility[P];
        const double cN = sys.mobility[N];
        const double cf = 2.0 * cP * cN / (cP + cN);
        const double a = cf * area / dist;
        triplets.push_back({P, P, a});
        triplets.push_back({P, N, -a});
        sys.rhs[P] -= cf * fn * area;
    };

    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t P = grid.index(i, j);
            // Outward normal component of f' at each face, averaged from the two cells.
            if (i + 1 < grid.nx) {
                const std::size_t E = grid.index(i + 1, j);
                face(P, E, dy, dx, 0.5 * (forcing.x[P] + forcing.x[E]));
            }
            if (i > 0) {
                const std::size_t W = grid.index(i - 1, j);
                face(P, W, dy, dx, -0.5 * (forcing.x[P] + forcing.x[W]));
            }
            if (j + 1 < grid.ny) {
                const std::size_t N = grid.index(i, j + 1);
                face(P, N, dx, dy, 0.5 * (forcing.y[P] + forcing.y[N]));
            }
            if (j > 0) {
                const std::size_t S = grid.index(i, j - 1);
                face(P, S, dx, dy, -0.5 * (forcing.y[P] + forcing.y[S]));
            }
            if (grid.size() == 1) {
                triplets.push_back({P, P, 0.0});
            }
        }
    }
    sys.matrix = SparseMatrix::from_triplets(grid.size(), grid.size(), std::move(triplets), true);
    return sys;
}

ScalarField2D solve_pressure(const ReynoldsSystem& system, double tol, int maxit) {
    if (!(tol > 0.0) || maxit < 1) {
        throw std::invalid_argument("solve_pressure: tol must be > 0 and maxit >= 1");
    }
    ScalarField2D p(system.grid);
    CgOptions opt;
    opt.tol = tol;
    opt.maxit = maxit;
    opt.projector = system.projector;
    opt.jacobi = system.matrix.diagonal();
    const auto report = cg_solve(
        [&](std::span<const double> in, std::span<double> out) { system.matrix.multiply(in, out); }, system.rhs,
        p.values, opt);
    if (!report.converged) {
        std::ostringstream msg;
        msg << "Reynolds CG did not converge: relative residual " << report.relative_residual << " after "
            << report.iterations << " iterations (tol " << tol << ")";
        throw ConvergenceError(msg.str(), report.relative_residual, report.iterations);
    }
    project_mean_zero(p.values);
    return p;
}

ScalarField2D solve_pressure(const ReynoldsSystem& system) {
    return solve_pressure(system, 1e-10, 10 * static_cast<int>(system.grid.size()));
}

std::vector<double> flux_divergence(const ReynoldsSystem& system, const ScalarField2D& p) {
    require_same_grid(system.grid, p.grid, "pressure field");
    auto r = system.matrix.multiply(p.values);
    const double area = system.grid.dx() * system.grid.dy();
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = (r[i] - system.rhs[i]) / area;
    }
    return r;
}

namespace {

// d/ds of samples v(0..n-1) with spacing d at index m, reading v through `at`.
template <class At>
double derivative(At&& at, int m, int n, double d) {
    if (n == 1) {
        return 0.0;
    }
    if (n == 2) {
        return (at(1) - at(0)) / d;
    }
    if (m == 0) {
        return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * d);
    }
    if (m == n - 1) {
        return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * d);
    }
    return (at(m + 1) - at(m - 1)) / (2.0 * d);
}

}  // namespace

VectorField2D pressure_gradient(const ScalarField2D& p) {
    const Grid2D& g = p.grid;
    VectorField2D grad(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            grad.x[g.index(i, j)] = derivative([&](int m) { return p.at(m, j); }, i, g.nx, g.dx());
            grad.y[g.index(i, j)] = derivative([&](int m) { return p.at(i, m); }, j, g.ny, g.dy());
        }
    }
    return grad;
}

VectorField2D driving_force(const VectorField2D& forcing, const ScalarField2D& p) {
    require_same_grid(forcing.grid, p.grid, "forcing and pressure");
    VectorField2D g = pressure_gradient(p);
    for (std::size_t idx = 0; idx < g.x.size(); ++idx) {
        g.x[idx] = forcing.x[idx] - g.x[idx];
        g.y[idx] = forcing.y[idx] - g.y[idx];
    }
    return g;
}

ColumnField3D velocity_field(const PhysicalParams& params, const GapField& gap, const ScalarField2D& p,
                             const VectorField2D& forcing, int nz) {
    require_same_grid(gap.grid, p.grid, "gap and pressure");
    require_same_grid(gap.grid, forcing.grid, "gap and forcing");
    if (nz < 2) {
        throw std::invalid_argument("velocity_field: nz must be >= 2");
    }
    const VectorField2D g = driving_force(forcing, p);
    const Grid2D& grid = gap.grid;
    ColumnField3D u(grid, nz, 3, gap.values);
    const auto ncol = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
    for (std::ptrdiff_t col = 0; col < ncol; ++col) {
        const int i = static_cast<int>(col % grid.nx);
        const int j = static_cast<int>(col / grid.nx);
        const ProfileCoeffs pc = profile_coeffs(params, gap.values[col]);
        for (int k = 0; k <= nz; ++k) {
            const double P = eval_profile(pc, u.z(i, j, k));
            const std::size_t o = u.offset(i, j, k);
            u.values[o] = P * g.x[col];
            u.values[o + 1] = P * g.y[col];
        }
    }
    return u;
}

}  // namespace porolux
