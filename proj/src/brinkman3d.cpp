#include "porolux/brinkman3d.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "porolux/parallel.hpp"
#include "porolux/reduced_flow.hpp"
#include "porolux/reduced_heat.hpp"

namespace porolux {

namespace {

// Packing of the interior face velocities into one unknown vector: u, then v, then w.
struct Layout {
    MacGrid g;
    std::size_t nu = 0, nv = 0, nw = 0;

    explicit Layout(const MacGrid& grid) : g(grid) {
        nu = static_cast<std::size_t>(g.nx - 1) * g.ny * g.nz;
        nv = static_cast<std::size_t>(g.nx) * (g.ny - 1) * g.nz;
        nw = static_cast<std::size_t>(g.nx) * g.ny * (g.nz - 1);
    }
    std::size_t size() const { return nu + nv + nw; }

    // -1 for faces on the boundary, where the velocity is zero.
    long u(int i, int j, int k) const {
        if (i <= 0 || i >= g.nx) return -1;
        return static_cast<long>((static_cast<std::size_t>(k) * g.ny + j) * (g.nx - 1) + (i - 1));
    }
    long v(int i, int j, int k) const {
        if (j <= 0 || j >= g.ny) return -1;
        return static_cast<long>(nu + (static_cast<std::size_t>(k) * (g.ny - 1) + (j - 1)) * g.nx + i);
    }
    long w(int i, int j, int k) const {
        if (k <= 0 || k >= g.nz) return -1;
        return static_cast<long>(nu + nv + (static_cast<std::size_t>(k - 1) * g.ny + j) * g.nx + i);
    }
};

// Rows of the discrete strain D_eps[U], one per strain component location.
// Cell rows carry weight V, edge rows 2 V times their dual-volume fraction, so
// sum_r W_r (S U)_r^2 approximates the integral of |D_eps U|^2.
class StrainBuilder {
public:
    void add(long col, double value, bool vertical) {
        if (col < 0) return;
        entries_.push_back({row_, static_cast<std::size_t>(col), value});
        if (vertical) vertical_.push_back({row_, static_cast<std::size_t>(col), value});
        ++pending_;
    }
    void close(double weight, const std::vector<std::size_t>& cells) {
        if (pending_ == 0) return;  // corner edges see only boundary faces
        weights.push_back(weight);
        for (std::size_t c : cells) {
            spread.push_back({c, row_, 1.0 / static_cast<double>(cells.size())});
        }
        ++row_;
        pending_ = 0;
    }
    std::size_t rows() const { return row_; }

    std::vector<Triplet> entries_;
    std::vector<Triplet> vertical_;
    std::vector<double> weights;
    std::vector<Triplet> spread;

private:
    std::size_t row_ = 0;
    int pending_ = 0;
};

struct Operators {
    SparseMatrix S;
    SparseMatrix Sv;
    std::vector<double> W;
    SparseMatrix spread;  // cells x strain rows
    SparseMatrix A;
    std::vector<double> diagA;
    SparseMatrix Dv;
    SparseMatrix DvT;
};

Operators build_operators(const MacGrid& g, const Layout& L, double eps, const PhysicalParams& params) {
    const double dx = g.dx(), dy = g.dy(), dz = g.dz(), V = g.cell_volume();
    const double ie = 1.0 / eps;
    StrainBuilder sb;
    auto wall = [](int I, int n) { return I == 0 || I == n; };
    auto adjacent = [&](int ilo, int ihi, int jlo, int jhi, int klo, int khi) {
        std::vector<std::size_t> cells;
        for (int k = std::max(klo, 0); k <= std::min(khi, g.nz - 1); ++k)
            for (int j = std::max(jlo, 0); j <= std::min(jhi, g.ny - 1); ++j)
                for (int i = std::max(ilo, 0); i <= std::min(ihi, g.nx - 1); ++i) cells.push_back(g.cell(i, j, k));
        return cells;
    };

    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::vector<std::size_t> self{g.cell(i, j, k)};
                sb.add(L.u(i + 1, j, k), 1.0 / dx, false);
                sb.add(L.u(i, j, k), -1.0 / dx, false);
                sb.close(V, self);
                sb.add(L.v(i, j + 1, k), 1.0 / dy, false);
                sb.add(L.v(i, j, k), -1.0 / dy, false);
                sb.close(V, self);
                sb.add(L.w(i, j, k + 1), ie / dz, true);
                sb.add(L.w(i, j, k), -ie / dz, true);
                sb.close(V, self);
            }
        }
    }
    // D12 on edges parallel to z.
    for (int k = 0; k < g.nz; ++k) {
        for (int J = 0; J <= g.ny; ++J) {
            for (int I = 0; I <= g.nx; ++I) {
                const double ddy = wall(J, g.ny) ? 0.5 * dy : dy;
                const double ddx = wall(I, g.nx) ? 0.5 * dx : dx;
                if (!wall(I, g.nx)) {
                    if (J < g.ny) sb.add(L.u(I, J, k), 0.5 / ddy, false);
                    if (J > 0) sb.add(L.u(I, J - 1, k), -0.5 / ddy, false);
                }
                if (!wall(J, g.ny)) {
                    if (I < g.nx) sb.add(L.v(I, J, k), 0.5 / ddx, false);
                    if (I > 0) sb.add(L.v(I - 1, J, k), -0.5 / ddx, false);
                }
                const double frac = (wall(I, g.nx) ? 0.5 : 1.0) * (wall(J, g.ny) ? 0.5 : 1.0);
                sb.close(2.0 * V * frac, adjacent(I - 1, I, J - 1, J, k, k));
            }
        }
    }
    // D13 on edges parallel to y.
    for (int K = 0; K <= g.nz; ++K) {
        for (int j = 0; j < g.ny; ++j) {
            for (int I = 0; I <= g.nx; ++I) {
                const double ddz = wall(K, g.nz) ? 0.5 * dz : dz;
                const double ddx = wall(I, g.nx) ? 0.5 * dx : dx;
                if (!wall(I, g.nx)) {
                    if (K < g.nz) sb.add(L.u(I, j, K), 0.5 * ie / ddz, true);
                    if (K > 0) sb.add(L.u(I, j, K - 1), -0.5 * ie / ddz, true);
                }
                if (!wall(K, g.nz)) {
                    if (I < g.nx) sb.add(L.w(I, j, K), 0.5 / ddx, false);
                    if (I > 0) sb.add(L.w(I - 1, j, K), -0.5 / ddx, false);
                }
                const double frac = (wall(I, g.nx) ? 0.5 : 1.0) * (wall(K, g.nz) ? 0.5 : 1.0);
                sb.close(2.0 * V * frac, adjacent(I - 1, I, j, j, K - 1, K));
            }
        }
    }
    // D23 on edges parallel to x.
    for (int K = 0; K <= g.nz; ++K) {
        for (int J = 0; J <= g.ny; ++J) {
            for (int i = 0; i < g.nx; ++i) {
                const double ddz = wall(K, g.nz) ? 0.5 * dz : dz;
                const double ddy = wall(J, g.ny) ? 0.5 * dy : dy;
                if (!wall(J, g.ny)) {
                    if (K < g.nz) sb.add(L.v(i, J, K), 0.5 * ie / ddz, true);
                    if (K > 0) sb.add(L.v(i, J, K - 1), -0.5 * ie / ddz, true);
                }
                if (!wall(K, g.nz)) {
                    if (J < g.ny) sb.add(L.w(i, J, K), 0.5 / ddy, false);
                    if (J > 0) sb.add(L.w(i, J - 1, K), -0.5 / ddy, false);
                }
                const double frac = (wall(J, g.ny) ? 0.5 : 1.0) * (wall(K, g.nz) ? 0.5 : 1.0);
                sb.close(2.0 * V * frac, adjacent(i, i, J - 1, J, K - 1, K));
            }
        }
    }

    Operators op;
    const std::size_t n = L.size();
    op.S = SparseMatrix::from_triplets(sb.rows(), n, std::move(sb.entries_));
    op.Sv = SparseMatrix::from_triplets(sb.rows(), n, std::move(sb.vertical_));
    op.W = std::move(sb.weights);
    op.spread = SparseMatrix::from_triplets(g.cells(), sb.rows(), std::move(sb.spread));

    // A = (mu/K) I + (2 mu_eff eps^2 / V) S^T W S
    const double visc = 2.0 * params.mu_eff() * eps * eps / V;
    std::vector<Triplet> a;
    a.reserve(n + 16 * op.S.rows());
    for (std::size_t c = 0; c < n; ++c) {
        a.push_back({c, c, params.mu() / params.K()});
    }
    const auto off = op.S.row_offsets();
    const auto col = op.S.col_indices();
    const auto val = op.S.values();
    for (std::size_t r = 0; r < op.S.rows(); ++r) {
        for (std::size_t p = off[r]; p < off[r + 1]; ++p) {
            for (std::size_t q = off[r]; q < off[r + 1]; ++q) {
                a.push_back({col[p], col[q], visc * op.W[r] * val[p] * val[q]});
            }
        }
    }
    op.A = SparseMatrix::from_triplets(n, n, std::move(a), true);
    op.diagA = op.A.diagonal();

    std::vector<Triplet> d;
    d.reserve(6 * g.cells());
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.cell(i, j, k);
                auto put = [&](long colidx, double value) {
                    if (colidx >= 0) d.push_back({c, static_cast<std::size_t>(colidx), value});
                };
                put(L.u(i + 1, j, k), 1.0 / dx);
                put(L.u(i, j, k), -1.0 / dx);
                put(L.v(i, j + 1, k), 1.0 / dy);
                put(L.v(i, j, k), -1.0 / dy);
                put(L.w(i, j, k + 1), ie / dz);
                put(L.w(i, j, k), -ie / dz);
            }
        }
    }
    op.Dv = SparseMatrix::from_triplets(g.cells(), n, std::move(d));
    op.DvT = op.Dv.transpose();
    return op;
}

class VelocitySolver {
public:
    VelocitySolver(const Operators& op, double tol, int maxit) : op_(op) {
        options_.tol = tol;
        options_.maxit = maxit;
        options_.jacobi = op.diagA;
    }
    // Solves A x = rhs starting from x.
    void solve(std::span<const double> rhs, std::span<double> x) {
        const auto report = cg_solve(
            [&](std::span<const double> in, std::span<double> out) { op_.A.multiply(in, out); }, rhs, x, options_);
        iterations += report.iterations;
        if (!report.converged) {
            std::ostringstream msg;
            msg << "velocity CG did not converge: relative residual " << report.relative_residual << " after "
                << report.iterations << " iterations";
            throw ConvergenceError(msg.str(), report.relative_residual, report.iterations);
        }
    }
    int iterations = 0;

private:
    const Operators& op_;
    CgOptions options_;
};

std::vector<double> face_forcing(const MacGrid& g, const Layout& L, const ForcingSpec& forcing) {
    const Grid2D base = g.base();
    std::vector<double> F(L.size(), 0.0);
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (const long c = L.u(i, j, k); c >= 0) {
                    F[c] = evaluate_forcing(forcing, base, i * g.dx(), (j + 0.5) * g.dy()).x;
                }
                if (const long c = L.v(i, j, k); c >= 0) {
                    F[c] = evaluate_forcing(forcing, base, (i + 0.5) * g.dx(), j * g.dy()).y;
                }
            }
        }
    }
    return F;
}

double weighted_square(const std::vector<double>& x, const std::vector<double>& w) {
    std::vector<double> t(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) {
        t[r] = w[r] * x[r] * x[r];
    }
    return parallel::sum(t);
}

SparseMatrix heat_matrix(const MacGrid& g, double eps, double k) {
    const double ax = eps * eps * k / (g.dx() * g.dx());
    const double ay = eps * eps * k / (g.dy() * g.dy());
    const double az = k / (g.dz() * g.dz());
    std::vector<Triplet> t;
    t.reserve(7 * g.cells());
    for (int kk = 0; kk < g.nz; ++kk) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.cell(i, j, kk);
                double diag = 0.0;
                auto link = [&](bool inside, std::size_t nb, double a, double wall_a) {
                    if (inside) {
                        diag += a;
                        t.push_back({c, nb, -a});
                    } else {
                        diag += wall_a;
                    }
                };
                link(i > 0, i > 0 ? g.cell(i - 1, j, kk) : 0, ax, 2.0 * ax);
                link(i + 1 < g.nx, i + 1 < g.nx ? g.cell(i + 1, j, kk) : 0, ax, 2.0 * ax);
                link(j > 0, j > 0 ? g.cell(i, j - 1, kk) : 0, ay, 2.0 * ay);
                link(j + 1 < g.ny, j + 1 < g.ny ? g.cell(i, j + 1, kk) : 0, ay, 2.0 * ay);
                link(kk > 0, kk > 0 ? g.cell(i, j, kk - 1) : 0, az, 0.0);  // bottom: flux condition
                link(kk + 1 < g.nz, kk + 1 < g.nz ? g.cell(i, j, kk + 1) : 0, az, 2.0 * az);
                t.push_back({c, c, diag});
            }
        }
    }
    return SparseMatrix::from_triplets(g.cells(), g.cells(), std::move(t), true);
}

void validate(const DilatedConfig& cfg) {
    const auto& g = cfg.grid;
    if (!(cfg.epsilon > 0.0) || cfg.epsilon > 1.0) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    if (g.nx < 2 || g.ny < 2 || g.nz < 2) {
        throw std::invalid_argument("3D grid needs at least 2 cells in every direction");
    }
    if (!(g.lx > 0.0) || !(g.ly > 0.0) || !(g.h > 0.0)) {
        throw std::invalid_argument("box extents and gap must be > 0");
    }
    if (!(cfg.tol > 0.0) || cfg.maxit < 1 || !(cfg.inner_tol > 0.0) || !(cfg.heat_tol > 0.0)) {
        throw std::invalid_argument("solver tolerances must be > 0 and maxit >= 1");
    }
}

}  // namespace

DilatedSolution solve_dilated(const DilatedConfig& cfg) {
    validate(cfg);
    const MacGrid& g = cfg.grid;
    const double eps = cfg.epsilon;
    const PhysicalParams& prm = cfg.params;
    const Layout L(g);
    const Operators op = build_operators(g, L, eps, prm);
    const std::size_t n = L.size();
    const std::size_t nc = g.cells();
    const double V = g.cell_volume();

    DilatedSolution sol;
    sol.grid = g;
    sol.epsilon = eps;
    sol.params = prm;

    // Pressure by conjugate gradients on the Schur complement Dv A^-1 Dv^T
    // (an accelerated Uzawa iteration); its residual is -div U.
    VelocitySolver inner(op, cfg.inner_tol, cfg.inner_maxit);
    const std::vector<double> F = face_forcing(g, L, cfg.forcing);
    std::vector<double> U(n, 0.0), Q(nc, 0.0);
    inner.solve(F, U);
    std::vector<double> r = op.Dv.multiply(U);
    for (double& x : r) x = -x;
    project_mean_zero(r);

    std::vector<double> p = r, y(n), Sp(nc), rhs(n);
    double rr = parallel::dot(r, r);
    double div = parallel::max_abs(r);
    sol.pressure_trace.push_back(div);
    int it = 0;
    bool converged = div <= cfg.tol;
    while (!converged && it < cfg.maxit) {
        ++it;
        op.DvT.multiply(p, rhs);
        std::fill(y.begin(), y.end(), 0.0);
        inner.solve(rhs, y);
        op.Dv.multiply(y, Sp);
        project_mean_zero(Sp);
        const double pSp = parallel::dot(p, Sp);
        if (!(pSp > 0.0)) {
            break;
        }
        const double alpha = rr / pSp;
        parallel::axpy(alpha, p, Q);
        parallel::axpy(alpha, y, U);
        parallel::axpy(-alpha, Sp, r);
        div = parallel::max_abs(r);
        sol.pressure_trace.push_back(div);
        if (div <= cfg.tol) {
            // Confirm on a fresh velocity solve; restart from the true residual otherwise.
            rhs = F;
            op.DvT.multiply(Q, y);
            parallel::axpy(1.0, y, rhs);
            inner.solve(rhs, U);
            r = op.Dv.multiply(U);
            for (double& x : r) x = -x;
            project_mean_zero(r);
            div = parallel::max_abs(r);
            sol.pressure_trace.back() = div;
            if (div <= cfg.tol) {
                converged = true;
                break;
            }
            p = r;
            rr = parallel::dot(r, r);
            continue;
        }
        const double rr_new = parallel::dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t c = 0; c < nc; ++c) {
            p[c] = r[c] + beta * p[c];
        }
    }
    sol.pressure_iterations = it;
    sol.inner_iterations = inner.iterations;
    if (!converged) {
        std::ostringstream msg;
        msg << "pressure iteration stalled: max|div U| = " << div << " after " << it << " iterations (tol "
            << cfg.tol << "); trace tail:";
        const std::size_t from = sol.pressure_trace.size() > 5 ? sol.pressure_trace.size() - 5 : 0;
        for (std::size_t t = from; t < sol.pressure_trace.size(); ++t) msg << ' ' << sol.pressure_trace[t];
        throw ConvergenceError(msg.str(), div, it);
    }
    project_mean_zero(Q);

    // Scatter to full face arrays.
    sol.u.assign(g.u_faces(), 0.0);
    sol.v.assign(g.v_faces(), 0.0);
    sol.w.assign(g.w_faces(), 0.0);
    for (int k = 0; k <= g.nz; ++k) {
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i <= g.nx; ++i) {
                if (j < g.ny && k < g.nz) {
                    if (const long c = L.u(i, j, k); c >= 0) sol.u[g.u_face(i, j, k)] = U[c];
                }
                if (i < g.nx && k < g.nz) {
                    if (const long c = L.v(i, j, k); c >= 0) sol.v[g.v_face(i, j, k)] = U[c];
                }
                if (i < g.nx && j < g.ny) {
                    if (const long c = L.w(i, j, k); c >= 0) sol.w[g.w_face(i, j, k)] = U[c];
                }
            }
        }
    }
    sol.Q = std::move(Q);

    // Energy balance and dissipation density.
    const std::vector<double> SU = op.S.multiply(U);
    const std::vector<double> SvU = op.Sv.multiply(U);
    EnergyReport& e = sol.energy;
    e.strain_sq = weighted_square(SU, op.W);
    e.vertical_strain_sq = weighted_square(SvU, op.W);
    e.velocity_sq = V * parallel::dot(U, U);
    e.dissipation = 2.0 * prm.mu_eff() * eps * eps * e.strain_sq + (prm.mu() / prm.K()) * e.velocity_sq;
    e.work = V * parallel::dot(F, U);
    const double scale = std::max(std::abs(e.work), std::abs(e.dissipation));
    e.relative_error = scale > 0.0 ? std::abs(e.dissipation - e.work) / scale : 0.0;
    e.max_divergence = div;

    std::vector<double> local(SU.size());
    for (std::size_t rI = 0; rI < SU.size(); ++rI) {
        local[rI] = op.W[rI] * SU[rI] * SU[rI] / V;
    }
    sol.Phi = op.spread.multiply(local);
    const double darcy = prm.mu() / prm.K();
    const double visc = 2.0 * prm.mu_eff() * eps * eps;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double uu = sol.u[g.u_face(i, j, k)], uu1 = sol.u[g.u_face(i + 1, j, k)];
                const double vv = sol.v[g.v_face(i, j, k)], vv1 = sol.v[g.v_face(i, j + 1, k)];
                const double ww = sol.w[g.w_face(i, j, k)], ww1 = sol.w[g.w_face(i, j, k + 1)];
                const double sq = 0.5 * (uu * uu + uu1 * uu1 + vv * vv + vv1 * vv1 + ww * ww + ww1 * ww1);
                const std::size_t c = g.cell(i, j, k);
                sol.Phi[c] = darcy * sq + visc * sol.Phi[c];
            }
        }
    }

    // Heat: rows scaled by 1/V, bottom flux enters the first layer.
    const SparseMatrix H = heat_matrix(g, eps, prm.k());
    std::vector<double> hr = sol.Phi;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            hr[g.cell(i, j, 0)] += prm.b() / g.dz();
        }
    }
    sol.T.assign(nc, 0.0);
    CgOptions ho;
    ho.tol = cfg.heat_tol;
    ho.maxit = cfg.heat_maxit;
    ho.jacobi = H.diagonal();
    sol.heat = cg_solve([&](std::span<const double> in, std::span<double> out) { H.multiply(in, out); }, hr, sol.T,
                        ho);
    if (!sol.heat.converged) {
        std::ostringstream msg;
        msg << "heat CG did not converge: relative residual " << sol.heat.relative_residual << " after "
            << sol.heat.iterations << " iterations";
        throw ConvergenceError(msg.str(), sol.heat.relative_residual, sol.heat.iterations);
    }
    return sol;
}

CellVelocity cell_velocity(const DilatedSolution& s) {
    const MacGrid& g = s.grid;
    CellVelocity cv;
    cv.u1.resize(g.cells());
    cv.u2.resize(g.cells());
    cv.u3.resize(g.cells());
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.cell(i, j, k);
                cv.u1[c] = 0.5 * (s.u[g.u_face(i, j, k)] + s.u[g.u_face(i + 1, j, k)]);
                cv.u2[c] = 0.5 * (s.v[g.v_face(i, j, k)] + s.v[g.v_face(i, j + 1, k)]);
                cv.u3[c] = 0.5 * (s.w[g.w_face(i, j, k)] + s.w[g.w_face(i, j, k + 1)]);
            }
        }
    }
    return cv;
}

ScalarField2D vertical_average_pressure(const DilatedSolution& s) {
    const MacGrid& g = s.grid;
    ScalarField2D p(g.base());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            for (int k = 0; k < g.nz; ++k) {
                acc += s.Q[g.cell(i, j, k)];
            }
            p.at(i, j) = acc / g.nz;
        }
    }
    project_mean_zero(p.values);
    return p;
}

double cell_norm(const std::vector<double>& values, double volume, double q) {
    std::vector<double> t(values.size());
    for (std::size_t c = 0; c < values.size(); ++c) {
        t[c] = std::pow(std::abs(values[c]), q);
    }
    return std::pow(volume * parallel::sum(t), 1.0 / q);
}

ConvergenceRow compare_to_limit(const DilatedSolution& s, const ForcingSpec& forcing) {
    const MacGrid& g = s.grid;
    const Grid2D base = g.base();
    const GapField gap = make_gap_field(ConstantGap{g.h}, base);
    const VectorField2D f = sample_forcing(forcing, base);
    const ReynoldsSystem sys = assemble_reynolds(base, gap, s.params, f);
    const ScalarField2D pstar = solve_pressure(sys, 1e-12, 10 * static_cast<int>(base.size()) + 100);
    const VectorField2D drive = driving_force(f, pstar);
    const ProfileCoeffs pc = profile_coeffs(s.params, g.h);

    const CellVelocity cv = cell_velocity(s);
    const std::size_t nc = g.cells();
    std::vector<double> eu(nc), eT(nc);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t col = base.index(i, j);
            const double gx = drive.x[col], gy = drive.y[col];
            const TemperatureProfile tp = make_temperature_profile(s.params, g.h, gx * gx + gy * gy);
            for (int k = 0; k < g.nz; ++k) {
                const double z = (k + 0.5) * g.dz();
                const double P = eval_profile(pc, z);
                const std::size_t c = g.cell(i, j, k);
                const double d1 = cv.u1[c] - P * gx;
                const double d2 = cv.u2[c] - P * gy;
                eu[c] = std::sqrt(d1 * d1 + d2 * d2);
                eT[c] = s.T[c] - temperature_profile(tp, z);
            }
        }
    }
    const ScalarField2D qbar = vertical_average_pressure(s);
    std::vector<double> ep(base.size());
    for (std::size_t c = 0; c < ep.size(); ++c) {
        ep[c] = qbar.values[c] - pstar.values[c];
    }

    ConvergenceRow row;
    row.epsilon = s.epsilon;
    const double V = g.cell_volume();
    row.velocity_error = cell_norm(eu, V, 2.0);
    row.vertical_velocity = cell_norm(cv.u3, V, 2.0);
    row.pressure_error = cell_norm(ep, base.dx() * base.dy(), 2.0);
    row.temperature_error = cell_norm(eT, V, 4.0 / 3.0);
    return row;
}

std::vector<ConvergenceRow> convergence_study(const DilatedConfig& base, const std::vector<double>& eps_list,
                                              std::vector<DilatedSolution>* solutions) {
    if (eps_list.empty()) {
        throw std::invalid_argument("convergence study needs at least one epsilon");
    }
    for (std::size_t t = 1; t < eps_list.size(); ++t) {
        if (!(eps_list[t] < eps_list[t - 1])) {
            throw std::invalid_argument("epsilon list must be strictly decreasing");
        }
    }
    std::vector<ConvergenceRow> rows;
    for (double eps : eps_list) {
        DilatedConfig cfg = base;
        cfg.epsilon = eps;
        // Side-wall layers have width ~ eps/M in the base coordinates.
        const double spacing = std::max(cfg.grid.dx(), cfg.grid.dy());
        if (eps / cfg.params.M() < 2.0 * spacing) {
            spdlog::warn("epsilon {} gives side-wall layers thinner than two cells ({}); expect grid-dominated errors",
                         eps, 2.0 * spacing);
        }
        DilatedSolution s = solve_dilated(cfg);
        spdlog::info("eps {}: {} pressure iterations, {} velocity CG iterations, energy mismatch {:.3e}", eps,
                     s.pressure_iterations, s.inner_iterations, s.energy.relative_error);
        rows.push_back(compare_to_limit(s, cfg.forcing));
        if (solutions) {
            solutions->push_back(std::move(s));
        }
    }
    return rows;
}

std::vector<ScalingRow> scaling_diagnostics(const std::vector<DilatedSolution>& solutions) {
    std::vector<ScalingRow> rows;
    for (const DilatedSolution& s : solutions) {
        const MacGrid& g = s.grid;
        const double eps = s.epsilon;
        const double k = s.params.k();
        const double V = g.cell_volume();
        auto T_at = [&](int i, int j, int kk) { return s.T[g.cell(i, j, kk)]; };
        std::vector<double> grad(g.cells());
        for (int kk = 0; kk < g.nz; ++kk) {
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const double Tc = T_at(i, j, kk);
                    // Face gradients, Dirichlet walls at half a cell.
                    const double gxl = i > 0 ? (Tc - T_at(i - 1, j, kk)) / g.dx() : Tc / (0.5 * g.dx());
                    const double gxr = i + 1 < g.nx ? (T_at(i + 1, j, kk) - Tc) / g.dx() : -Tc / (0.5 * g.dx());
                    const double gyl = j > 0 ? (Tc - T_at(i, j - 1, kk)) / g.dy() : Tc / (0.5 * g.dy());
                    const double gyr = j + 1 < g.ny ? (T_at(i, j + 1, kk) - Tc) / g.dy() : -Tc / (0.5 * g.dy());
                    const double gzl = kk > 0 ? (Tc - T_at(i, j, kk - 1)) / g.dz() : -s.params.b() / k;
                    const double gzr = kk + 1 < g.nz ? (T_at(i, j, kk + 1) - Tc) / g.dz() : -Tc / (0.5 * g.dz());
                    const double gx = 0.5 * (gxl + gxr);
                    const double gy = 0.5 * (gyl + gyr);
                    const double gz = 0.5 * (gzl + gzr) / eps;
                    grad[g.cell(i, j, kk)] = std::sqrt(gx * gx + gy * gy + gz * gz);
                }
            }
        }
        ScalingRow row;
        row.epsilon = eps;
        row.velocity_norm = std::sqrt(s.energy.velocity_sq);
        row.scaled_strain = eps * std::sqrt(s.energy.strain_sq);
        row.temperature_norm = cell_norm(s.T, V, 4.0 / 3.0);
        row.scaled_gradient = eps * cell_norm(grad, V, 4.0 / 3.0);
        row.vertical_fraction =
            s.energy.strain_sq > 0.0 ? std::sqrt(s.energy.vertical_strain_sq / s.energy.strain_sq) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace porolux
