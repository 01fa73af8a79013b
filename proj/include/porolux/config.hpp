#pragma once

// Run configuration: flat `section.key = value` lines, `#` starts a comment.
//
//   run.mode          reduced | dilated | converge            (reduced)
//   run.output_dir    path                                    (out)
//   params.mu, params.mu_eff, params.K, params.k              required, > 0
//   params.b          bottom heat flux                        (0)
//   geometry.lx, geometry.ly                                  (1, 1)
//   geometry.nx, geometry.ny   base grid cells                (32, 32)
//   geometry.nz       z samples per column, reduced mode      (64)
//   geometry.gap      constant(h) | parabolic(a, h0) | sinusoidal(mean, amp, kx, ky)   (constant(1))
//   forcing.spec      zero | constant(cx, cy) | sinusoidal(a1, a2, m, n)
//                     | gradient(linear, ax, ay) | gradient(cosine, a, m, n)          (zero)
//   dilated.epsilon   (0.125)
//   dilated.nz        cells across the gap in the 3D solver   (16)
//   converge.eps      strictly decreasing list, e.g. 1/4, 1/8, 1/16   (0.25, 0.125, 0.0625)
//   solver.reynolds_tol (1e-10)  solver.reynolds_maxit (10 nx ny)
//   solver.uzawa_tol (1e-8)      solver.uzawa_maxit (500)
//   solver.inner_tol (1e-12)     solver.inner_maxit (20000)
//   solver.heat_tol (1e-12)      solver.heat_maxit (20000)

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "porolux/core.hpp"

namespace porolux {

enum class RunMode { reduced, dilated, converge };

std::string to_string(RunMode mode);
std::optional<RunMode> parse_mode(const std::string& text);

struct ConfigIssue {
    int line = 0;  // 0 when the problem is not tied to a line (missing key)
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct SolverSettings {
    double reynolds_tol = 1e-10;
    int reynolds_maxit = 0;  // 0: 10 nx ny
    double uzawa_tol = 1e-8;
    int uzawa_maxit = 500;
    double inner_tol = 1e-12;
    int inner_maxit = 20000;
    double heat_tol = 1e-12;
    int heat_maxit = 20000;
};

struct RunConfig {
    RunMode mode = RunMode::reduced;
    std::string output_dir = "out";
    PhysicalParams params = make_params(1.0, 1.0, 1.0, 1.0, 0.0);
    Grid2D grid = make_grid(32, 32);
    int nz = 64;
    GapSpec gap = ConstantGap{1.0};
    ForcingSpec forcing = ZeroForcing{};
    double epsilon = 0.125;
    int dilated_nz = 16;
    std::vector<double> eps_list{0.25, 0.125, 0.0625};
    SolverSettings solver;
    /// Resolved key/value pairs in file order, defaults included, for the manifest.
    std::vector<std::pair<std::string, std::string>> resolved;
};

/// Collects every problem before throwing ConfigError. A mode override
/// replaces run.mode before the mode-dependent checks run.
RunConfig parse_config(const std::string& text, std::optional<RunMode> mode_override = std::nullopt);

GapSpec parse_gap_spec(const std::string& text);
ForcingSpec parse_forcing_spec(const std::string& text);
/// Comma-separated numbers, optional braces, entries may be fractions like 1/8.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace porolux
