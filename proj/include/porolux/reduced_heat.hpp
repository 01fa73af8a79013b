#pragma once

// Limit temperature across the gap. With g = |f' - grad p|^2 the column
// problem is -k T'' = g [(mu/K) P^2 + mu_eff P'^2], T(h) = 0, -k T'(0) = b.

#include <functional>
#include <vector>

#include "porolux/core.hpp"
#include "porolux/reduced_flow.hpp"

namespace porolux {

/**
 * V1(z) = int_0^z int_0^t P(s)^2 ds dt and V2(z) = the same for P'(s)^2.
 * Small Mh uses a power series in Mz (the closed forms cancel badly there);
 * otherwise the closed forms are evaluated with every exponential written as
 * e^{-something >= 0}.
 */
class ColumnIntegrals {
public:
    ColumnIntegrals() = default;
    explicit ColumnIntegrals(const ProfileCoeffs& coeffs);

    double v1(double z) const;
    double v2(double z) const;
    const ProfileCoeffs& coeffs() const noexcept { return c_; }

private:
    ProfileCoeffs c_;
    bool series_ = false;
    // Coefficients of u^{m+2} in V1 / (K/mu)^2 M^-2 and V2 / (K/mu)^2, u = Mz.
    std::vector<double> w1_;
    std::vector<double> w2_;
};

double v1_profile(const ProfileCoeffs& coeffs, double z);
double v2_profile(const ProfileCoeffs& coeffs, double z);

struct TemperatureProfile {
    ColumnIntegrals integrals;
    double gmag2 = 0.0;
    double b = 0.0;
    double k = 1.0;
    double mu = 1.0;
    double mu_eff = 1.0;
    double K = 1.0;
    double M = 1.0;
    double h = 1.0;
    double v1_h = 0.0;
    double v2_h = 0.0;
};

TemperatureProfile make_temperature_profile(const PhysicalParams& params, double h, double gmag2);

/// T*(z). Throws std::out_of_range outside [0, h].
double temperature_profile(const TemperatureProfile& tp, double z);
/// Part of T* driven by dissipation alone (linear in gmag2).
double temperature_dissipative_part(const TemperatureProfile& tp, double z);
double dissipation_density(const TemperatureProfile& tp, double z);

/**
 * -k T'' = source(z) on (0, h), T(h) = 0, -k T'(0) = b, by second-order finite
 * differences on nz uniform intervals with a ghost point at the bottom.
 * Returns T at z_i = i h / nz, i = 0..nz.
 */
std::vector<double> solve_column_bvp(double k, double h, double b, const std::function<double(double)>& source,
                                     int nz);

/// solve_column_bvp with the limit dissipation as source. nz >= 8.
std::vector<double> column_ode_oracle(const PhysicalParams& params, double h, double gmag2, int nz);

/// T* at nz+1 points per column.
ColumnField3D temperature_field(const PhysicalParams& params, const GapField& gap, const ScalarField2D& p,
                                const VectorField2D& forcing, int nz);

}  // namespace porolux
