#include "porolux/reduced_heat.hpp"

#include "porolux/numerics.hpp"
#include "porolux/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace porolux {

namespace {

constexpr int kSeriesTerms = 40;
constexpr double kSeriesLimit = 2.0;  // Mh below this uses the power series

void require_in_column(double z, double h) {
    if (!(z >= 0.0 && z <= h)) {
        std::ostringstream msg;
        msg << "z = " << z << " outside [0, " << h << "]";
        throw std::out_of_range(msg.str());
    }
}

double horner(const std::vector<double>& w, double u) {
    double s = 0.0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        s = s * u + *it;
    }
    return s;
}

std::vector<double> doubly_integrated_square(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> w(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double beta = 0.0;
        for (int i = 0; i <= m; ++i) {
            beta += a[i] * a[m - i];
        }
        w[m] = beta / ((m + 1.0) * (m + 2.0));
    }
    return w;
}

}  // namespace

ColumnIntegrals::ColumnIntegrals(const ProfileCoeffs& coeffs) : c_(coeffs) {
    const double H = c_.M * c_.h;
    series_ = H < kSeriesLimit;
    if (!series_) {
        return;
    }
    // P / (K/mu) = tanh(H/2) sinh(u) - cosh(u) + 1 as a series in u = Mz.
    const double t = std::tanh(0.5 * H);
    std::vector<double> alpha(kSeriesTerms + 1, 0.0);
    double fact = 1.0;
    for (int k = 1; k <= kSeriesTerms; ++k) {
        fact *= k;
        alpha[k] = (k % 2 == 1 ? t : -1.0) / fact;
    }
    std::vector<double> slope(kSeriesTerms, 0.0);
    for (int k = 0; k < kSeriesTerms; ++k) {
        slope[k] = (k + 1) * alpha[k + 1];
    }
    w1_ = doubly_integrated_square(alpha);
    w2_ = doubly_integrated_square(slope);
}

double ColumnIntegrals::v1(double z) const {
    require_in_column(z, c_.h);
    const double M = c_.M;
    const double kap = c_.Kmu;
    const double u = M * z;
    if (series_) {
        return kap * kap / (M * M) * u * u * horner(w1_, u);
    }
    const double H = M * c_.h;
    const double D = 1.0 + std::exp(-H);
    const double r = kap / D;
    const double E = std::exp(-(H - u));
    const double sq1 = r * r * E * E * (-std::expm1(-2.0 * u));  // A1^2 (e^{2u} - 1)
    const double sq2 = r * r * std::expm1(-2.0 * u);              // A2^2 (e^{-2u} - 1)
    const double ln1 = r * E * std::expm1(-u);                    // A1 (e^u - 1)
    const double ln2 = -r * std::expm1(-u);                       // A2 (e^{-u} - 1)
    const double a1a2 = r * r * std::exp(-H);
    const double diff_sq = r * r * std::expm1(-2.0 * H);  // A1^2 - A2^2
    const double diff = -r * std::expm1(-H);              // A1 - A2
    return (sq1 + sq2) / (4.0 * M * M) + 2.0 * kap / (M * M) * (ln1 + ln2) + (0.5 * kap * kap + a1a2) * z * z -
           diff_sq * z / (2.0 * M) - 2.0 * kap / M * diff * z;
}

double ColumnIntegrals::v2(double z) const {
    require_in_column(z, c_.h);
    const double M = c_.M;
    const double kap = c_.Kmu;
    const double u = M * z;
    if (series_) {
        return kap * kap * u * u * horner(w2_, u);
    }
    const double H = M * c_.h;
    const double D = 1.0 + std::exp(-H);
    const double r = kap / D;
    const double E = std::exp(-(H - u));
    const double sq1 = r * r * E * E * (-std::expm1(-2.0 * u));
    const double sq2 = r * r * std::expm1(-2.0 * u);
    const double a1a2 = r * r * std::exp(-H);
    const double diff_sq = r * r * std::expm1(-2.0 * H);
    return 0.25 * (sq1 + sq2) - 0.5 * M * diff_sq * z - M * M * a1a2 * z * z;
}

double v1_profile(const ProfileCoeffs& coeffs, double z) { return ColumnIntegrals(coeffs).v1(z); }

double v2_profile(const ProfileCoeffs& coeffs, double z) { return ColumnIntegrals(coeffs).v2(z); }

TemperatureProfile make_temperature_profile(const PhysicalParams& params, double h, double gmag2) {
    if (!(gmag2 >= 0.0) || !std::isfinite(gmag2)) {
        throw std::invalid_argument("gmag2 must be finite and >= 0");
    }
    TemperatureProfile tp;
    tp.integrals = ColumnIntegrals(profile_coeffs(params, h));
    tp.gmag2 = gmag2;
    tp.b = params.b();
    tp.k = params.k();
    tp.mu = params.mu();
    tp.mu_eff = params.mu_eff();
    tp.K = params.K();
    tp.M = params.M();
    tp.h = h;
    tp.v1_h = tp.integrals.v1(h);
    tp.v2_h = tp.integrals.v2(h);
    return tp;
}

double temperature_dissipative_part(const TemperatureProfile& tp, double z) {
    const double d1 = tp.integrals.v1(z) - tp.v1_h;
    const double d2 = tp.integrals.v2(z) - tp.v2_h;
    return -(tp.mu / (tp.K * tp.k)) * d1 * tp.gmag2 - (tp.mu_eff / tp.k) * d2 * tp.gmag2;
}

double temperature_profile(const TemperatureProfile& tp, double z) {
    return temperature_dissipative_part(tp, z) - (tp.b / tp.k) * (z - tp.h);
}

double dissipation_density(const TemperatureProfile& tp, double z) {
    const double P = eval_profile(tp.integrals.coeffs(), z);
    const double dP = eval_profile_slope(tp.integrals.coeffs(), z);
    return tp.gmag2 * ((tp.mu / tp.K) * P * P + tp.mu_eff * dP * dP);
}

std::vector<double> solve_column_bvp(double k, double h, double b, const std::function<double(double)>& source,
                                     int nz) {
    if (nz < 1 || !(k > 0.0) || !(h > 0.0)) {
        throw std::invalid_argument("solve_column_bvp: need nz >= 1, k > 0, h > 0");
    }
    const double dz = h / nz;
    const double s = k / (dz * dz);
    const auto n = static_cast<std::size_t>(nz);
    std::vector<double> lower(n, -s), diag(n, 2.0 * s), upper(n, -s), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = source(h * (static_cast<double>(i) / nz));
    }
    // Ghost point from -k (T_1 - T_{-1}) / (2 dz) = b.
    upper[0] = -2.0 * s;
    rhs[0] += 2.0 * b / dz;
    auto T = tridiag_solve(lower, diag, upper, rhs);
    T.push_back(0.0);
    return T;
}

std::vector<double> column_ode_oracle(const PhysicalParams& params, double h, double gmag2, int nz) {
    if (nz < 8) {
        throw std::invalid_argument("column_ode_oracle: nz must be >= 8");
    }
    const TemperatureProfile tp = make_temperature_profile(params, h, gmag2);
    return solve_column_bvp(params.k(), h, params.b(), [&](double z) { return dissipation_density(tp, std::min(z, h)); },
                            nz);
}

ColumnField3D temperature_field(const PhysicalParams& params, const GapField& gap, const ScalarField2D& p,
                                const VectorField2D& forcing, int nz) {
    if (!(gap.grid == p.grid) || !(gap.grid == forcing.grid)) {
        throw std::invalid_argument("grid mismatch: gap, pressure and forcing must share one grid");
    }
    if (nz < 2) {
        throw std::invalid_argument("temperature_field: nz must be >= 2");
    }
    const VectorField2D g = driving_force(forcing, p);
    const Grid2D& grid = gap.grid;
    ColumnField3D T(grid, nz, 1, gap.values);
    const auto ncol = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
    for (std::ptrdiff_t col = 0; col < ncol; ++col) {
        const int i = static_cast<int>(col % grid.nx);
        const int j = static_cast<int>(col / grid.nx);
        const double gm = g.x[col] * g.x[col] + g.y[col] * g.y[col];
        const TemperatureProfile tp = make_temperature_profile(params, gap.values[col], gm);
        for (int k = 0; k <= nz; ++k) {
            T.values[T.offset(i, j, k)] = temperature_profile(tp, T.z(i, j, k));
        }
    }
    return T;
}

}  // namespace porolux
