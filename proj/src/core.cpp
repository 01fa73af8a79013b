#include "porolux/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace porolux {

namespace {

void require_positive(const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "parameter " << name << " must be finite and > 0 (got " << value << ")";
        throw std::invalid_argument(msg.str());
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

PhysicalParams make_params(double mu, double mu_eff, double K, double k, double b) {
    require_positive("mu", mu);
    require_positive("mu_eff", mu_eff);
    require_positive("K", K);
    require_positive("k", k);
    if (!std::isfinite(b)) {
        throw std::invalid_argument("parameter b must be finite");
    }
    const double M = std::sqrt(mu / (K * mu_eff));
    if (!(M > 0.0) || !std::isfinite(M)) {
        throw std::invalid_argument("derived M = sqrt(mu/(K*mu_eff)) is not finite and positive");
    }
    return PhysicalParams(mu, mu_eff, K, k, b, M);
}

PhysicalParams PhysicalParams::with_flux(double b) const {
    return make_params(mu_, mu_eff_, K_, k_, b);
}

Grid2D make_grid(int nx, int ny, double lx, double ly) {
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("grid cell counts must be >= 1");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw std::invalid_argument("domain extents must be finite and > 0");
    }
    return Grid2D{nx, ny, lx, ly};
}

double evaluate_gap(const GapSpec& spec, const Grid2D& grid, double x, double y) {
    return std::visit(
        overloaded{
            [](const ConstantGap& g) { return g.value; },
            [&](const ParabolicGap& g) {
                const double ux = x - 0.5 * grid.lx;
                const double uy = y - 0.5 * grid.ly;
                return g.base + g.curvature * (ux * ux + uy * uy);
            },
            [&](const SinusoidalGap& g) {
                const double phase = 2.0 * std::numbers::pi * (g.kx * x / grid.lx + g.ky * y / grid.ly);
                return g.mean + g.amp * std::sin(phase);
            },
        },
        spec);
}

std::string describe(const GapSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{
                   [&](const ConstantGap& g) { out << "constant(" << g.value << ")"; },
                   [&](const ParabolicGap& g) {
                       out << "parabolic(" << g.curvature << ", " << g.base << ")";
                   },
                   [&](const SinusoidalGap& g) {
                       out << "sinusoidal(" << g.mean << ", " << g.amp << ", " << g.kx << ", " << g.ky
                           << ")";
                   },
               },
               spec);
    return out.str();
}

GapField make_gap_field(const GapSpec& spec, const Grid2D& grid) {
    GapField field;
    field.grid = grid;
    field.values.resize(grid.size());
    std::size_t argmin = 0;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const auto idx = grid.index(i, j);
            field.values[idx] = evaluate_gap(spec, grid, grid.x_center(i), grid.y_center(j));
            if (field.values[idx] < field.values[argmin] || std::isnan(field.values[idx])) {
                argmin = idx;
            }
        }
    }
    const double hmin = field.values[argmin];
    if (!(hmin > 0.0) || !std::isfinite(hmin)) {
        const int i = static_cast<int>(argmin % grid.nx);
        const int j = static_cast<int>(argmin / grid.nx);
        std::ostringstream msg;
        msg << "gap " << describe(spec) << " has minimum " << hmin << " <= 0 at cell (" << i << ", " << j
            << "), x' = (" << grid.x_center(i) << ", " << grid.y_center(j) << ")";
        throw std::invalid_argument(msg.str());
    }
    field.h_min = hmin;
    field.h_max = hmin;
    for (double v : field.values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("gap " + describe(spec) + " produced a non-finite sample");
        }
        field.h_max = std::max(field.h_max, v);
    }
    return field;
}

Vec2 evaluate_forcing(const ForcingSpec& spec, const Grid2D& grid, double x, double y) {
    constexpr double pi = std::numbers::pi;
    return std::visit(
        overloaded{
            [](const ZeroForcing&) { return Vec2{}; },
            [](const ConstantForcing& f) { return Vec2{f.cx, f.cy}; },
            [&](const SinusoidalForcing& f) {
                return Vec2{f.a1 * std::sin(f.m * pi * y / grid.ly), f.a2 * std::sin(f.n * pi * x / grid.lx)};
            },
            [&](const GradientForcing& f) {
                return std::visit(
                    overloaded{
                        [](const LinearPotential& p) { return Vec2{p.ax, p.ay}; },
                        [&](const CosinePotential& p) {
                            const double kx = p.m * pi / grid.lx;
                            const double ky = p.n * pi / grid.ly;
                            return Vec2{-p.a * kx * std::sin(kx * x) * std::cos(ky * y),
                                        -p.a * ky * std::cos(kx * x) * std::sin(ky * y)};
                        },
                    },
                    f.potential);
            },
        },
        spec);
}

double evaluate_potential(const GradientForcing& spec, const Grid2D& grid, double x, double y) {
    constexpr double pi = std::numbers::pi;
    return std::visit(overloaded{
                          [&](const LinearPotential& p) { return p.ax * x + p.ay * y; },
                          [&](const CosinePotential& p) {
                              return p.a * std::cos(p.m * pi * x / grid.lx) * std::cos(p.n * pi * y / grid.ly);
                          },
                      },
                      spec.potential);
}

VectorField2D sample_forcing(const ForcingSpec& spec, const Grid2D& grid) {
    VectorField2D f(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Vec2 v = evaluate_forcing(spec, grid, grid.x_center(i), grid.y_center(j));
            f.x[grid.index(i, j)] = v.x;
            f.y[grid.index(i, j)] = v.y;
        }
    }
    return f;
}

std::string describe(const ForcingSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{
                   [&](const ZeroForcing&) { out << "zero"; },
                   [&](const ConstantForcing& f) { out << "constant(" << f.cx << ", " << f.cy << ")"; },
                   [&](const SinusoidalForcing& f) {
                       out << "sinusoidal(" << f.a1 << ", " << f.a2 << ", " << f.m << ", " << f.n << ")";
                   },
                   [&](const GradientForcing& f) {
                       std::visit(overloaded{
                                      [&](const LinearPotential& p) {
                                          out << "gradient(linear, " << p.ax << ", " << p.ay << ")";
                                      },
                                      [&](const CosinePotential& p) {
                                          out << "gradient(cosine, " << p.a << ", " << p.m << ", " << p.n
                                              << ")";
                                      },
                                  },
                                  f.potential);
                   },
               },
               spec);
    return out.str();
}

double mean(const std::vector<double>& values) {
    if (values.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace porolux
