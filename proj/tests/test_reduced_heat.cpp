#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "porolux/numerics.hpp"
#include "porolux/reduced_heat.hpp"

using namespace porolux;

namespace {

const PhysicalParams unit = make_params(1, 1, 1, 1, 0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("column integrals against frozen values and quadrature") {
    const ProfileCoeffs c = profile_coeffs(unit, 1.0);
    CHECK(v1_profile(c, 0.0) == 0.0);
    CHECK(v2_profile(c, 0.0) == 0.0);
    CHECK(rel(v1_profile(c, 1.0), 0.003436197351467213) <= 1e-13);
    CHECK(rel(v2_profile(c, 1.0), 0.03444664538852303) <= 1e-13);

    auto P2 = [&](double s) { return std::pow(eval_profile(c, std::min(s, 1.0)), 2); };
    auto D2 = [&](double s) { return std::pow(eval_profile_slope(c, std::min(s, 1.0)), 2); };
    CHECK(rel(quad::romberg_nested_trapezoid(P2, 1.0, 4096), v1_profile(c, 1.0)) <= 1e-8);
    CHECK(rel(quad::romberg_nested_trapezoid(D2, 1.0, 4096), v2_profile(c, 1.0)) <= 1e-8);
}

TEST_CASE("column integrals across Mh") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logH(-4.0, 1.5);
    for (int n = 0; n < 40; ++n) {
        const double H = std::pow(10.0, logH(rng));
        const PhysicalParams p = make_params(2.0, 0.5, 1.5, 1.0, 0.0);
        const double h = H / p.M();
        const ProfileCoeffs c = profile_coeffs(p, h);
        const ColumnIntegrals ci(c);
        for (double t : {0.3, 0.8, 1.0}) {
            const double z = t * h;
            auto P2 = [&](double s) { return std::pow(eval_profile(c, std::min(s, h)), 2); };
            auto D2 = [&](double s) { return std::pow(eval_profile_slope(c, std::min(s, h)), 2); };
            CHECK(rel(ci.v1(z), quad::romberg_nested_trapezoid(P2, z, 4096)) <= 1e-8);
            CHECK(rel(ci.v2(z), quad::romberg_nested_trapezoid(D2, z, 4096)) <= 1e-8);
        }
    }
}

TEST_CASE("second derivatives of the integrals") {
    const double h = 1.7;
    const ProfileCoeffs c = profile_coeffs(unit, h);
    const ColumnIntegrals ci(c);
    const double z = 0.6;
    auto err = [&](double d) {
        const double a = fd::central_second([&](double s) { return ci.v1(s); }, z, d) - std::pow(eval_profile(c, z), 2);
        const double b =
            fd::central_second([&](double s) { return ci.v2(s); }, z, d) - std::pow(eval_profile_slope(c, z), 2);
        return std::pair{std::abs(a), std::abs(b)};
    };
    const auto [a1, b1] = err(0.04);
    const auto [a2, b2] = err(0.02);
    CHECK(a1 / a2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(b1 / b2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("pure conduction and trivial data") {
    const PhysicalParams b1 = make_params(1, 1, 1, 1, 1.0);
    const TemperatureProfile tp = make_temperature_profile(b1, 1.0, 0.0);
    for (double z : {0.0, 0.25, 0.5, 1.0}) CHECK(temperature_profile(tp, z) == doctest::Approx(1.0 - z).epsilon(1e-15));
    const TemperatureProfile zero = make_temperature_profile(unit, 1.0, 0.0);
    for (double z : {0.0, 0.5, 1.0}) CHECK(temperature_profile(zero, z) == 0.0);
    CHECK_THROWS_AS(temperature_profile(zero, 1.5), std::out_of_range);
    CHECK_THROWS(make_temperature_profile(unit, 1.0, -1.0));
}

TEST_CASE("boundary conditions and the column ODE") {
    for (double H : {1e-3, 0.5, 1.0, 8.0, 60.0}) {
        const PhysicalParams p = make_params(1.0, 2.0, 0.5, 1.7, 0.4);
        const double h = H / p.M();
        const double gmag2 = 2.3;
        const TemperatureProfile tp = make_temperature_profile(p, h, gmag2);
        const double scale = std::abs(p.b()) + gmag2 * mobility_coefficient(p, h);
        CHECK(std::abs(temperature_profile(tp, h)) <= 1e-12 * (1.0 + std::abs(temperature_profile(tp, 0.0))));
        const double d = std::min(h, 1.0 / p.M()) / 4096;
        const double flux = -p.k() * fd::forward_first([&](double z) { return temperature_profile(tp, z); }, 0.0, d);
        CHECK(std::abs(flux - p.b()) <= 1e-6 * scale);

        // -k T'' = Phi in the interior
        const double z = 0.4 * h, dz = 1e-3 * std::min(h, 1.0 / p.M());
        const double lhs = -p.k() * fd::central_second([&](double s) { return temperature_profile(tp, s); }, z, dz);
        CHECK(lhs == doctest::Approx(dissipation_density(tp, z)).epsilon(1e-4));
    }
}

TEST_CASE("agreement with the finite-difference column solver") {
    const PhysicalParams p = make_params(1, 1, 1, 1, 0.5);
    std::vector<double> errs;
    for (int nz : {64, 128, 256}) {
        const auto T = column_ode_oracle(p, 1.0, 1.0, nz);
        const TemperatureProfile tp = make_temperature_profile(p, 1.0, 1.0);
        double e = 0.0;
        for (int i = 0; i <= nz; ++i) e = std::max(e, std::abs(T[i] - temperature_profile(tp, double(i) / nz)));
        errs.push_back(e);
    }
    const auto order = richardson_order(errs[0], errs[1], errs[2], OrderMode::exact_reference);
    REQUIRE(order.defined);
    CHECK(order.order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("column solver on a manufactured solution") {
    const double h = 0.75, k = 1.3;
    auto exact = [&](double z) { return std::sin(M_PI * z) - std::sin(M_PI * h); };
    std::vector<double> errs;
    for (int nz : {32, 64, 128}) {
        const auto T = solve_column_bvp(k, h, -k * M_PI, [&](double z) { return k * M_PI * M_PI * std::sin(M_PI * z); },
                                        nz);
        REQUIRE(T.size() == std::size_t(nz + 1));
        CHECK(T.back() == 0.0);
        double e = 0.0;
        for (int i = 0; i <= nz; ++i) e = std::max(e, std::abs(T[i] - exact(h * i / nz)));
        errs.push_back(e);
    }
    const auto order = richardson_order(errs[0], errs[1], errs[2], OrderMode::exact_reference);
    CHECK(order.order == doctest::Approx(2.0).epsilon(0.05));

    const auto lin = solve_column_bvp(1.0, 1.0, 1.0, [](double) { return 0.0; }, 16);
    for (int i = 0; i <= 16; ++i) CHECK(lin[i] == doctest::Approx(1.0 - i / 16.0).epsilon(1e-13));
}

TEST_CASE("temperature is affine in the squared drive") {
    const PhysicalParams p = make_params(1.0, 0.8, 2.0, 1.1, 0.6);
    const TemperatureProfile t0 = make_temperature_profile(p, 1.2, 0.0);
    const TemperatureProfile t1 = make_temperature_profile(p, 1.2, 1.0);
    const TemperatureProfile t3 = make_temperature_profile(p, 1.2, 3.0);
    for (double z : {0.0, 0.3, 0.9}) {
        const double base = temperature_profile(t0, z);
        CHECK(temperature_profile(t3, z) - base ==
              doctest::Approx(3.0 * (temperature_profile(t1, z) - base)).epsilon(1e-12));
        CHECK(temperature_dissipative_part(t3, z) == doctest::Approx(3.0 * temperature_dissipative_part(t1, z)));
    }
}

TEST_CASE("temperature fields") {
    const Grid2D g = make_grid(5, 4);
    const GapField h = make_gap_field(SinusoidalGap{1.0, 0.3, 1.0, 1.0}, g);
    const PhysicalParams p = make_params(1, 1, 1, 1, 1.0);
    const ColumnField3D cond = temperature_field(p, h, ScalarField2D(g), sample_forcing(ZeroForcing{}, g), 8);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k <= 8; ++k)
                CHECK(cond.values[cond.offset(i, j, k)] == doctest::Approx(h.at(i, j) - cond.z(i, j, k)).epsilon(1e-14));

    // Non-negative data give a non-negative temperature.
    const VectorField2D f = sample_forcing(SinusoidalForcing{1.0, 1.0, 1.0, 1.0}, g);
    const ColumnField3D T = temperature_field(p, h, ScalarField2D(g), f, 16);
    for (double v : T.values) CHECK(v >= 0.0);

    const TemperatureProfile tp = make_temperature_profile(unit, 1.0, 1.0);
    // At the wall only the shear part of the dissipation survives.
    const double slope = eval_profile_slope(profile_coeffs(unit, 1.0), 0.0);
    CHECK(dissipation_density(tp, 0.0) == doctest::Approx(slope * slope).epsilon(1e-14));
}
