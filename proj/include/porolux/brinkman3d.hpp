#pragma once

// Coarse MAC-grid solver for the dilated thin-film problem on the box
// (0,lx)x(0,ly)x(0,h), z already stretched by 1/eps. Unknowns: face velocities,
// cell pressure Q = eps^2 p and cell temperature.
//
//   -2 mu_eff eps^2 div_eps(D_eps U) + (mu/K) U + grad_eps Q = (f', 0),  div_eps U = 0,
//   U = 0 on the whole boundary,
//   -eps^2 k lap' T - k T_zz = Phi,  T = 0 on top and sides,  -k T_z = b at the bottom.

#include <vector>

#include "porolux/core.hpp"
#include "porolux/numerics.hpp"

namespace porolux {

struct MacGrid {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    double lx = 1.0;
    double ly = 1.0;
    double h = 1.0;

    double dx() const noexcept { return lx / nx; }
    double dy() const noexcept { return ly / ny; }
    double dz() const noexcept { return h / nz; }
    double cell_volume() const noexcept { return dx() * dy() * dz(); }
    std::size_t cells() const noexcept { return static_cast<std::size_t>(nx) * ny * nz; }
    std::size_t cell(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    // Full face arrays, boundary faces included.
    std::size_t u_faces() const noexcept { return static_cast<std::size_t>(nx + 1) * ny * nz; }
    std::size_t v_faces() const noexcept { return static_cast<std::size_t>(nx) * (ny + 1) * nz; }
    std::size_t w_faces() const noexcept { return static_cast<std::size_t>(nx) * ny * (nz + 1); }
    std::size_t u_face(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(k) * ny + j) * (nx + 1) + i;
    }
    std::size_t v_face(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(k) * (ny + 1) + j) * nx + i;
    }
    std::size_t w_face(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    Grid2D base() const { return make_grid(nx, ny, lx, ly); }
};

struct DilatedConfig {
    double epsilon = 0.125;
    MacGrid grid{32, 32, 16, 1.0, 1.0, 1.0};
    PhysicalParams params = make_params(1.0, 1.0, 1.0, 1.0, 0.0);
    ForcingSpec forcing = ZeroForcing{};
    /// Pressure iteration stops once max |div_eps U| <= tol.
    double tol = 1e-8;
    int maxit = 500;
    double inner_tol = 1e-12;
    int inner_maxit = 20000;
    double heat_tol = 1e-12;
    int heat_maxit = 20000;
};

struct EnergyReport {
    /// 2 mu_eff eps^2 ||D_eps U||^2 + (mu/K) ||U||^2
    double dissipation = 0.0;
    /// (f', U')
    double work = 0.0;
    double relative_error = 0.0;
    double strain_sq = 0.0;
    /// Part of ||D_eps U||^2 coming from the eps^-1 d/dz entries alone.
    double vertical_strain_sq = 0.0;
    double velocity_sq = 0.0;
    double max_divergence = 0.0;
};

struct DilatedSolution {
    MacGrid grid;
    double epsilon = 1.0;
    PhysicalParams params = make_params(1.0, 1.0, 1.0, 1.0, 0.0);
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> w;
    /// Cell pressure, mean zero.
    std::vector<double> Q;
    std::vector<double> T;
    /// Dissipation density per cell; its volume sum is the discrete dissipation.
    std::vector<double> Phi;
    EnergyReport energy;
    int pressure_iterations = 0;
    int inner_iterations = 0;
    /// max |div_eps U| after each pressure iteration.
    std::vector<double> pressure_trace;
    SolveReport heat;
};

/// Throws ConvergenceError when the pressure iteration or the heat solve fails.
DilatedSolution solve_dilated(const DilatedConfig& config);

/// Cell-centered (u1, u2, u3) from face averages.
struct CellVelocity {
    std::vector<double> u1, u2, u3;
};
CellVelocity cell_velocity(const DilatedSolution& s);

/// Column average of Q, shifted to mean zero.
ScalarField2D vertical_average_pressure(const DilatedSolution& s);

struct ConvergenceRow {
    double epsilon = 0.0;
    double velocity_error = 0.0;  // ||U' - u*||_2
    double vertical_velocity = 0.0;  // ||U_3||_2
    double pressure_error = 0.0;  // ||avg Q - p*||_2 over the base
    double temperature_error = 0.0;  // ||T - T*||_{4/3}
};

/// Differences to the limit model evaluated on the same base grid at cell centers.
ConvergenceRow compare_to_limit(const DilatedSolution& s, const ForcingSpec& forcing);

/// eps_list must be strictly decreasing. Solutions are returned through `solutions` when given.
std::vector<ConvergenceRow> convergence_study(const DilatedConfig& base, const std::vector<double>& eps_list,
                                              std::vector<DilatedSolution>* solutions = nullptr);

struct ScalingRow {
    double epsilon = 0.0;
    double velocity_norm = 0.0;  // ||U||_2
    double scaled_strain = 0.0;  // eps ||D_eps U||_2
    double temperature_norm = 0.0;  // ||T||_{4/3}
    double scaled_gradient = 0.0;  // eps ||grad_eps T||_{4/3}
    double vertical_fraction = 0.0;  // share of ||D_eps U|| carried by the eps^-1 d/dz entries
};

std::vector<ScalingRow> scaling_diagnostics(const std::vector<DilatedSolution>& solutions);

/// (sum V |e|^q)^(1/q)
double cell_norm(const std::vector<double>& values, double volume, double q);

}  // namespace porolux
