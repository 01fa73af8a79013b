#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "porolux/brinkman3d.hpp"

using namespace porolux;

namespace {

DilatedConfig small(double eps, ForcingSpec f, double b = 0.0) {
    DilatedConfig c;
    c.epsilon = eps;
    c.grid = MacGrid{12, 12, 8, 1.0, 1.0, 1.0};
    c.params = make_params(1, 1, 1, 1, b);
    c.forcing = f;
    return c;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("zero data give the zero solution") {
    const DilatedSolution s = solve_dilated(small(0.25, ZeroForcing{}));
    CHECK(max_abs(s.u) == 0.0);
    CHECK(max_abs(s.v) == 0.0);
    CHECK(max_abs(s.w) == 0.0);
    CHECK(max_abs(s.Q) == 0.0);
    CHECK(max_abs(s.T) == 0.0);
    CHECK(max_abs(s.Phi) == 0.0);
}

TEST_CASE("conduction only") {
    double previous = INFINITY;
    for (double eps : {0.25, 0.125, 0.0625}) {
        const DilatedSolution s = solve_dilated(small(eps, ZeroForcing{}, 1.0));
        CHECK(max_abs(s.u) == 0.0);
        CHECK(max_abs(s.w) == 0.0);
        for (double t : s.T) CHECK(t >= 0.0);
        // Distance to the vertical conduction profile b (h - z) / k.
        const MacGrid& g = s.grid;
        std::vector<double> diff(g.cells());
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    diff[g.cell(i, j, k)] = s.T[g.cell(i, j, k)] - (1.0 - (k + 0.5) * g.dz());
        const double e = cell_norm(diff, g.cell_volume(), 2.0);
        CHECK(e < previous);
        previous = e;
    }
}

TEST_CASE("energy balance, incompressibility and the dissipation density") {
    DilatedConfig c = small(0.125, SinusoidalForcing{1.0, 0.0, 1.0, 0.0}, 0.5);
    const DilatedSolution s = solve_dilated(c);
    CHECK(s.energy.relative_error <= 1e-8);
    CHECK(s.energy.max_divergence <= 10 * c.tol);
    CHECK(s.energy.dissipation > 0.0);

    double total = 0.0, q_sum = 0.0;
    for (std::size_t i = 0; i < s.Phi.size(); ++i) {
        CHECK(s.Phi[i] >= 0.0);
        total += s.Phi[i] * s.grid.cell_volume();
        q_sum += s.Q[i];
    }
    CHECK(total == doctest::Approx(s.energy.dissipation).epsilon(1e-12));
    CHECK(std::abs(q_sum) <= 1e-10 * max_abs(s.Q) * s.Q.size());

    // Wall faces carry no velocity.
    const MacGrid& g = s.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j) {
            CHECK(s.u[g.u_face(0, j, k)] == 0.0);
            CHECK(s.u[g.u_face(g.nx, j, k)] == 0.0);
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            CHECK(s.w[g.w_face(i, j, 0)] == 0.0);
            CHECK(s.w[g.w_face(i, j, g.nz)] == 0.0);
        }
    // With b >= 0 and Phi >= 0 the discrete temperature stays non-negative.
    for (double t : s.T) CHECK(t >= -1e-10 * max_abs(s.T));
    CHECK(s.pressure_trace.size() == std::size_t(s.pressure_iterations + 1));
}

TEST_CASE("runs are bit-for-bit repeatable") {
    const DilatedConfig c = small(0.25, SinusoidalForcing{1.0, 0.5, 1.0, 1.0}, 0.2);
    const DilatedSolution a = solve_dilated(c);
    const DilatedSolution b = solve_dilated(c);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.w == b.w);
    CHECK(a.Q == b.Q);
    CHECK(a.T == b.T);
}

TEST_CASE("vertical average of a column-constant pressure") {
    DilatedSolution s;
    s.grid = MacGrid{3, 2, 4, 1.0, 1.0, 1.0};
    s.Q.assign(s.grid.cells(), 0.0);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 3; ++i) s.Q[s.grid.cell(i, j, k)] = i + 10.0 * j;
    const ScalarField2D q = vertical_average_pressure(s);
    const double shift = (0 + 1 + 2 + 10 + 11 + 12) / 6.0;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) CHECK(q.at(i, j) == doctest::Approx(i + 10.0 * j - shift));
}

TEST_CASE("input validation and failure reporting") {
    DilatedConfig c = small(0.25, SinusoidalForcing{1.0, 0.0, 1.0, 0.0});
    c.epsilon = 0.0;
    CHECK_THROWS_AS(solve_dilated(c), std::invalid_argument);
    c.epsilon = 1.5;
    CHECK_THROWS_AS(solve_dilated(c), std::invalid_argument);
    c.epsilon = 0.25;
    c.grid.nz = 1;
    CHECK_THROWS_AS(solve_dilated(c), std::invalid_argument);
    c.grid.nz = 8;
    c.maxit = 1;
    c.tol = 1e-14;
    CHECK_THROWS_AS(solve_dilated(c), ConvergenceError);
    CHECK_THROWS_AS(convergence_study(small(0.25, ZeroForcing{}), {0.125, 0.25}), std::invalid_argument);
}

TEST_CASE("cell norms") {
    CHECK(cell_norm({1.0, 1.0, 1.0, 1.0}, 0.25, 2.0) == doctest::Approx(1.0));
    CHECK(cell_norm({2.0, 0.0}, 0.5, 4.0 / 3.0) == doctest::Approx(std::pow(0.5 * std::pow(2.0, 4.0 / 3.0), 0.75)));
}
