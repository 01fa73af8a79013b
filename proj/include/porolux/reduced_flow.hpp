#pragma once

// Limit velocity profile across the gap, the mobility c(h) and the 2D
// Reynolds problem div(c (grad p - f')) = 0 with zero normal flux on the boundary.

#include <vector>

#include "porolux/core.hpp"
#include "porolux/numerics.hpp"

namespace porolux {

/**
 * Column profile P(z) = A1 e^{Mz} + A2 e^{-Mz} + K/mu on [0, h].
 * A1 and A2 are stored in their overflow-safe form; the exponentials are never
 * formed directly, so Mh up to several hundred is fine.
 */
struct ProfileCoeffs {
    double A1 = 0.0;
    double A2 = 0.0;
    double M = 0.0;
    double h = 0.0;
    double Kmu = 0.0;
};

/// c(h) = (K/mu) (h - (2/M) tanh(Mh/2)).
double mobility_coefficient(const PhysicalParams& params, double h);

ProfileCoeffs profile_coeffs(const PhysicalParams& params, double h);

/// Throws std::out_of_range for z outside [0, h].
double eval_profile(const ProfileCoeffs& c, double z);
/// dP/dz = M (A1 e^{Mz} - A2 e^{-Mz}).
double eval_profile_slope(const ProfileCoeffs& c, double z);

/// Closed-form integral of P over the column. Evaluated along a different
/// route than mobility_coefficient; the two must agree.
double column_flux(const PhysicalParams& params, double h);

struct ReynoldsSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    Grid2D grid;
    /// c at cell centers.
    std::vector<double> mobility;
    /// Removes the constant null space of the pure-Neumann operator.
    Projector projector = project_mean_zero;
};

/// Cell-centered finite volumes, harmonic face averages of c, zero flux on boundary faces.
ReynoldsSystem assemble_reynolds(const Grid2D& grid, const GapField& gap, const PhysicalParams& params,
                                 const VectorField2D& forcing);

/// Mean-zero pressure. Throws ConvergenceError when CG does not reach tol within maxit.
ScalarField2D solve_pressure(const ReynoldsSystem& system, double tol, int maxit);
/// Defaults: tol 1e-10, maxit 10 nx ny.
ScalarField2D solve_pressure(const ReynoldsSystem& system);

/// Per-cell net outflow of the discrete flux c (f' - grad p), divided by cell area.
std::vector<double> flux_divergence(const ReynoldsSystem& system, const ScalarField2D& p);

/// Central differences inside, second-order one-sided at boundary cells.
VectorField2D pressure_gradient(const ScalarField2D& p);

/// g = f' - grad p at cell centers.
VectorField2D driving_force(const VectorField2D& forcing, const ScalarField2D& p);

/// u* sampled at nz+1 points per column, components (u1, u2, u3) with u3 = 0.
ColumnField3D velocity_field(const PhysicalParams& params, const GapField& gap, const ScalarField2D& p,
                             const VectorField2D& forcing, int nz);

}  // namespace porolux
