#pragma once

// Constants, the base grid over (0,lx)x(0,ly) and shared field containers.
// 2D fields live at cell centers; reduced 3D fields are sampled per column on [0, h].

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace porolux {

/// Raised when a solver exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Fluid and porous-medium constants. Immutable once built by make_params().
class PhysicalParams {
public:
    double mu() const noexcept { return mu_; }
    double mu_eff() const noexcept { return mu_eff_; }
    double K() const noexcept { return K_; }
    double k() const noexcept { return k_; }
    double b() const noexcept { return b_; }
    /// Inverse Brinkman length M = sqrt(mu / (K mu_eff)).
    double M() const noexcept { return M_; }
    /// Darcy mobility K / mu.
    double kappa() const noexcept { return K_ / mu_; }

    /// Copy with a different bottom heat flux.
    PhysicalParams with_flux(double b) const;

private:
    friend PhysicalParams make_params(double, double, double, double, double);
    PhysicalParams(double mu, double mu_eff, double K, double k, double b, double M)
        : mu_(mu), mu_eff_(mu_eff), K_(K), k_(k), b_(b), M_(M) {}

    double mu_, mu_eff_, K_, k_, b_, M_;
};

/// Throws std::invalid_argument naming the first non-positive (or non-finite) field.
PhysicalParams make_params(double mu, double mu_eff, double K, double k, double b);

/// Uniform cell-centered grid over ω = (0,lx)×(0,ly). Cell (i,j) has flat index j*nx + i.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    double dx() const noexcept { return lx / nx; }
    double dy() const noexcept { return ly / ny; }
    double x_center(int i) const noexcept { return (i + 0.5) * dx(); }
    double y_center(int j) const noexcept { return (j + 0.5) * dy(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * nx + i;
    }
    bool operator==(const Grid2D&) const = default;
};

Grid2D make_grid(int nx, int ny, double lx = 1.0, double ly = 1.0);

/// h = value.
struct ConstantGap {
    double value = 1.0;
};
/// h = base + curvature * ((x1 - lx/2)^2 + (x2 - ly/2)^2).
struct ParabolicGap {
    double curvature = 0.0;
    double base = 1.0;
};
/// h = mean + amp * sin(2π (kx x1/lx + ky x2/ly)).
struct SinusoidalGap {
    double mean = 1.0;
    double amp = 0.0;
    double kx = 0.0;
    double ky = 0.0;
};
using GapSpec = std::variant<ConstantGap, ParabolicGap, SinusoidalGap>;

double evaluate_gap(const GapSpec& spec, const Grid2D& grid, double x, double y);
std::string describe(const GapSpec& spec);

struct GapField {
    Grid2D grid;
    std::vector<double> values;
    double h_min = 0.0;
    double h_max = 0.0;

    double at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Samples the gap at cell centers. Throws std::invalid_argument with the
/// minimum and its cell when any sample is <= 0.
GapField make_gap_field(const GapSpec& spec, const Grid2D& grid);

struct ScalarField2D {
    Grid2D grid;
    std::vector<double> values;

    ScalarField2D() = default;
    explicit ScalarField2D(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }
};

struct VectorField2D {
    Grid2D grid;
    std::vector<double> x;
    std::vector<double> y;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}
};

/**
 * Reduced 3D field sampled per column: nz+1 uniform points on [0, h(x′)].
 * Value (i, j, k, c) lives at ((j*nx + i)*(nz+1) + k)*components + c.
 */
struct ColumnField3D {
    Grid2D grid;
    int nz = 0;
    int components = 1;
    std::vector<double> heights;
    std::vector<double> values;

    ColumnField3D() = default;
    ColumnField3D(const Grid2D& g, int nz_, int comps, std::vector<double> h)
        : grid(g), nz(nz_), components(comps), heights(std::move(h)),
          values(g.size() * static_cast<std::size_t>(nz_ + 1) * comps, 0.0) {}

    std::size_t offset(int i, int j, int k) const {
        return (grid.index(i, j) * static_cast<std::size_t>(nz + 1) + k) * components;
    }
    double z(int i, int j, int k) const {
        return heights[grid.index(i, j)] * (static_cast<double>(k) / nz);
    }
};

/// Horizontal forcing f′(x′). Closed enumeration so runs are reproducible from config text.
struct ZeroForcing {};
/// f′ = (cx, cy).
struct ConstantForcing {
    double cx = 0.0;
    double cy = 0.0;
};
/// f′ = (a1 sin(m π x2/ly), a2 sin(n π x1/lx)).
struct SinusoidalForcing {
    double a1 = 1.0;
    double a2 = 0.0;
    double m = 1.0;
    double n = 0.0;
};
/// f′ = ∇φ with φ = ax x1 + ay x2.
struct LinearPotential {
    double ax = 0.0;
    double ay = 0.0;
};
/// f′ = ∇φ with φ = a cos(m π x1/lx) cos(n π x2/ly).
struct CosinePotential {
    double a = 1.0;
    double m = 1.0;
    double n = 1.0;
};
struct GradientForcing {
    std::variant<LinearPotential, CosinePotential> potential;
};
using ForcingSpec = std::variant<ZeroForcing, ConstantForcing, SinusoidalForcing, GradientForcing>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

Vec2 evaluate_forcing(const ForcingSpec& spec, const Grid2D& grid, double x, double y);
VectorField2D sample_forcing(const ForcingSpec& spec, const Grid2D& grid);
std::string describe(const ForcingSpec& spec);

/// Potential φ for gradient forcing (empty spec otherwise returns 0).
double evaluate_potential(const GradientForcing& spec, const Grid2D& grid, double x, double y);

double mean(const std::vector<double>& values);

}  // namespace porolux
