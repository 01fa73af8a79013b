#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "porolux/core.hpp"

using namespace porolux;

TEST_CASE("inverse Brinkman length") {
    CHECK(make_params(1, 1, 1, 1, 0).M() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(make_params(4, 1, 1, 1, 0).M() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(make_params(1, 2, 2, 1, 0).M() == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logu(-6.0, 6.0);
    for (int n = 0; n < 200; ++n) {
        const double mu = std::pow(10.0, logu(rng));
        const double mu_eff = std::pow(10.0, logu(rng));
        const double K = std::pow(10.0, logu(rng));
        const PhysicalParams p = make_params(mu, mu_eff, K, 1.0, 0.0);
        CHECK(std::abs(p.M() * p.M() * K * mu_eff - mu) <= 1e-14 * mu);
    }
}

TEST_CASE("bad parameters name the field") {
    auto message = [](auto fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message([] { make_params(1, 1, -1, 1, 0); }).find("K") != std::string::npos);
    CHECK(message([] { make_params(0, 1, 1, 1, 0); }).find("mu") != std::string::npos);
    CHECK(message([] { make_params(1, 1, 1, 0, 0); }).find("k") != std::string::npos);
    CHECK(message([] { make_params(1, NAN, 1, 1, 0); }).find("mu_eff") != std::string::npos);
    CHECK_NOTHROW(make_params(1, 1, 1, 1, -3.0));
    CHECK_THROWS_AS(make_params(1, 1, 1, 1, INFINITY), std::invalid_argument);
}

TEST_CASE("grids") {
    const Grid2D g = make_grid(4, 2, 2.0, 1.0);
    CHECK(g.dx() == 0.5);
    CHECK(g.x_center(0) == 0.25);
    CHECK(g.index(3, 1) == 7u);
    CHECK_NOTHROW(make_grid(1, 1));
    CHECK_THROWS_AS(make_grid(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gap sampling") {
    const Grid2D g4 = make_grid(4, 1);
    const GapField s = make_gap_field(SinusoidalGap{1.0, 0.5, 1.0, 0.0}, g4);
    const double expect[4] = {1.0 + 0.5 * std::sin(2 * M_PI * 0.125), 1.0 + 0.5 * std::sin(2 * M_PI * 0.375),
                              1.0 + 0.5 * std::sin(2 * M_PI * 0.625), 1.0 + 0.5 * std::sin(2 * M_PI * 0.875)};
    for (int i = 0; i < 4; ++i) CHECK(s.at(i, 0) == doctest::Approx(expect[i]).epsilon(1e-15));
    CHECK(s.h_min == *std::min_element(s.values.begin(), s.values.end()));
    CHECK(s.h_max == *std::max_element(s.values.begin(), s.values.end()));

    const GapField c = make_gap_field(ConstantGap{2.5}, make_grid(3, 3));
    for (double v : c.values) CHECK(v == 2.5);

    const GapField par = make_gap_field(ParabolicGap{2.0, 0.5}, make_grid(2, 2));
    CHECK(par.at(0, 0) == doctest::Approx(0.5 + 2.0 * (0.0625 + 0.0625)));

    try {
        make_gap_field(SinusoidalGap{0.1, 0.5, 1.0, 0.0}, g4);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("minimum") != std::string::npos);
        CHECK(what.find("cell") != std::string::npos);
    }
    CHECK_THROWS_AS(make_gap_field(ConstantGap{0.0}, g4), std::invalid_argument);
}

TEST_CASE("forcing") {
    const Grid2D g = make_grid(8, 8);
    CHECK(evaluate_forcing(ZeroForcing{}, g, 0.3, 0.4).x == 0.0);
    const Vec2 c = evaluate_forcing(ConstantForcing{1.5, -2.0}, g, 0.3, 0.4);
    CHECK(c.x == 1.5);
    CHECK(c.y == -2.0);
    const Vec2 s = evaluate_forcing(SinusoidalForcing{1.0, 0.0, 1.0, 0.0}, g, 0.1, 0.25);
    CHECK(s.x == doctest::Approx(std::sin(M_PI * 0.25)));
    CHECK(s.y == 0.0);

    // Gradient forcing is the gradient of its potential.
    const GradientForcing gf{CosinePotential{0.7, 1.0, 2.0}};
    const double x = 0.31, y = 0.77, d = 1e-5;
    const Vec2 f = evaluate_forcing(gf, g, x, y);
    const double fx = (evaluate_potential(gf, g, x + d, y) - evaluate_potential(gf, g, x - d, y)) / (2 * d);
    const double fy = (evaluate_potential(gf, g, x, y + d) - evaluate_potential(gf, g, x, y - d)) / (2 * d);
    CHECK(f.x == doctest::Approx(fx).epsilon(1e-8));
    CHECK(f.y == doctest::Approx(fy).epsilon(1e-8));

    const VectorField2D sampled = sample_forcing(ConstantForcing{1.0, 0.0}, g);
    CHECK(sampled.x.size() == g.size());
    CHECK(mean(sampled.x) == 1.0);
}

TEST_CASE("column field layout") {
    const Grid2D g = make_grid(2, 2);
    ColumnField3D f(g, 4, 3, {1.0, 2.0, 3.0, 4.0});
    CHECK(f.values.size() == 4u * 5u * 3u);
    CHECK(f.offset(1, 0, 0) == 15u);
    CHECK(f.z(1, 1, 4) == 4.0);
    CHECK(f.z(0, 1, 2) == 1.5);
}
