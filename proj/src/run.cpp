#include "porolux/run.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "porolux/brinkman3d.hpp"
#include "porolux/export.hpp"
#include "porolux/parallel.hpp"
#include "porolux/reduced_flow.hpp"
#include "porolux/reduced_heat.hpp"

namespace porolux {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json formula_variants() {
    return ordered_json{
        {"reynolds_coefficient", "c = (K/mu) (h - (2/M) tanh(M h / 2)), numerator e^{Mh} + e^{-Mh} - 2"},
        {"v1_constant", "K/mu (velocity constant), not thermal k"},
        {"v2_form", "V2 = int_0^z int_0^t (dP/ds)^2, dP/dz = M (A1 e^{Mz} - A2 e^{-Mz})"},
        {"conduction_term", "-(b/k)(z - h), independent of |f' - grad p|^2"},
    };
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

class Session {
public:
    Session(const RunConfig& cfg, std::string text) : cfg_(cfg), text_(std::move(text)), dir_(cfg.output_dir) {
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void csv(const std::string& name, const Table& t) {
        export_csv(t, path(name));
        record(name);
    }
    void record(const std::string& name) {
        if (std::find(outcome.artifacts.begin(), outcome.artifacts.end(), name) == outcome.artifacts.end()) {
            outcome.artifacts.push_back(name);
        }
        spdlog::debug("wrote {}", path(name));
    }

    void manifest(ordered_json extra) {
        ordered_json m;
        m["tool"] = "porolux solve";
        m["version"] = kVersion;
        m["status"] = outcome.exit_code == exit_ok ? "ok" : "FAILED";
        if (!outcome.error.empty()) m["error"] = outcome.error;
        m["mode"] = to_string(cfg_.mode);
        m["created_utc"] = utc_timestamp();
        m["threads"] = parallel::thread_count();
        m["formulas"] = formula_variants();
        ordered_json resolved = ordered_json::object();
        for (const auto& [k, v] : cfg_.resolved) resolved[k] = v;
        resolved["run.output_dir"] = cfg_.output_dir;
        m["config"] = resolved;
        m["config_text"] = text_;
        ordered_json files = ordered_json::array();
        for (const auto& name : outcome.artifacts) {
            files.push_back({{"file", name}, {"sha256", sha256_file(path(name))}});
        }
        m["artifacts"] = files;
        if (!extra.is_null()) m["results"] = std::move(extra);
        std::ofstream out(path("manifest.json"), std::ios::binary | std::ios::trunc);
        out << m.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + path("manifest.json"));
    }

    RunOutcome outcome;

private:
    const RunConfig& cfg_;
    std::string text_;
    fs::path dir_;
};

int reynolds_maxit(const RunConfig& cfg) {
    return cfg.solver.reynolds_maxit > 0 ? cfg.solver.reynolds_maxit : 10 * static_cast<int>(cfg.grid.size());
}

ordered_json run_reduced(const RunConfig& cfg, Session& s) {
    const Grid2D& grid = cfg.grid;
    const GapField gap = make_gap_field(cfg.gap, grid);
    const VectorField2D f = sample_forcing(cfg.forcing, grid);
    const ReynoldsSystem sys = assemble_reynolds(grid, gap, cfg.params, f);
    const ScalarField2D p = solve_pressure(sys, cfg.solver.reynolds_tol, reynolds_maxit(cfg));
    spdlog::info("pressure solved on {}x{} cells", grid.nx, grid.ny);

    const VectorField2D g = driving_force(f, p);
    s.csv("pressure.csv", field_table(grid, {"p", "g1", "g2"}, {&p.values, &g.x, &g.y}));
    s.csv("mobility.csv", field_table(grid, {"h", "c"}, {&gap.values, &sys.mobility}));

    const ColumnField3D u = velocity_field(cfg.params, gap, p, f, cfg.nz);
    s.csv("velocity.csv", column_table(u, {"u1", "u2", "u3"}));
    const ColumnField3D T = temperature_field(cfg.params, gap, p, f, cfg.nz);
    s.csv("temperature.csv", column_table(T, {"T"}));

    const std::string title = "porolux reduced, z normalized by h | " + formula_tag();
    export_structured_grid(u, {"u"}, s.path("velocity.vtk"), title);
    s.record("velocity.vtk");
    export_structured_grid(T, {"T"}, s.path("temperature.vtk"), title);
    s.record("temperature.vtk");

    const auto div = flux_divergence(sys, p);
    double div_max = 0.0;
    for (double d : div) div_max = std::max(div_max, std::abs(d));
    return ordered_json{{"h_min", gap.h_min}, {"h_max", gap.h_max}, {"max_flux_divergence", div_max}};
}

DilatedConfig dilated_config(const RunConfig& cfg, double eps) {
    DilatedConfig d;
    d.epsilon = eps;
    d.grid = MacGrid{cfg.grid.nx, cfg.grid.ny, cfg.dilated_nz, cfg.grid.lx, cfg.grid.ly,
                     std::get<ConstantGap>(cfg.gap).value};
    d.params = cfg.params;
    d.forcing = cfg.forcing;
    d.tol = cfg.solver.uzawa_tol;
    d.maxit = cfg.solver.uzawa_maxit;
    d.inner_tol = cfg.solver.inner_tol;
    d.inner_maxit = cfg.solver.inner_maxit;
    d.heat_tol = cfg.solver.heat_tol;
    d.heat_maxit = cfg.solver.heat_maxit;
    return d;
}

std::vector<double> energy_row(const DilatedSolution& d) {
    const EnergyReport& e = d.energy;
    return {d.epsilon,        e.dissipation, e.work, e.relative_error, e.max_divergence,
            static_cast<double>(d.pressure_iterations), static_cast<double>(d.inner_iterations),
            static_cast<double>(d.heat.iterations)};
}

const std::vector<std::string> kEnergyHeader{"epsilon",        "dissipation",         "work",
                                             "relative_error", "max_divergence",      "pressure_iterations",
                                             "velocity_iterations", "heat_iterations"};

ordered_json run_dilated(const RunConfig& cfg, Session& s) {
    const DilatedSolution d = solve_dilated(dilated_config(cfg, cfg.epsilon));
    spdlog::info("dilated solve: {} pressure iterations, energy mismatch {:.3e}, max|div U| {:.3e}",
                 d.pressure_iterations, d.energy.relative_error, d.energy.max_divergence);
    s.csv("dilated_fields.csv", dilated_table(d));
    const ScalarField2D qbar = vertical_average_pressure(d);
    s.csv("pressure_average.csv", field_table(qbar.grid, {"Q_avg"}, {&qbar.values}));
    s.csv("energy.csv", Table{kEnergyHeader, {energy_row(d)}});
    Table trace{{"iteration", "max_divergence"}, {}};
    for (std::size_t t = 0; t < d.pressure_trace.size(); ++t) {
        trace.rows.push_back({static_cast<double>(t), d.pressure_trace[t]});
    }
    s.csv("pressure_trace.csv", trace);
    export_structured_grid(d, s.path("dilated.vtk"), "porolux dilated eps=" + format_number(d.epsilon) + " | " +
                                                           formula_tag());
    s.record("dilated.vtk");
    return ordered_json{{"epsilon", d.epsilon},
                        {"energy_relative_error", d.energy.relative_error},
                        {"max_divergence", d.energy.max_divergence},
                        {"pressure_iterations", d.pressure_iterations}};
}

ordered_json run_converge(const RunConfig& cfg, Session& s) {
    Table conv{{"epsilon", "velocity_error", "vertical_velocity", "pressure_error", "temperature_error"}, {}};
    Table scal{{"epsilon", "velocity_norm", "scaled_strain", "temperature_norm", "scaled_gradient",
                "vertical_fraction"},
               {}};
    Table energy{kEnergyHeader, {}};
    for (double eps : cfg.eps_list) {
        const DilatedSolution d = solve_dilated(dilated_config(cfg, eps));
        const ConvergenceRow r = compare_to_limit(d, cfg.forcing);
        const ScalingRow sc = scaling_diagnostics({d}).front();
        spdlog::info("eps {}: |U'-u*| {:.4e}  |U3| {:.4e}  |Q-p*| {:.4e}  |T-T*| {:.4e}", eps, r.velocity_error,
                     r.vertical_velocity, r.pressure_error, r.temperature_error);
        conv.rows.push_back({r.epsilon, r.velocity_error, r.vertical_velocity, r.pressure_error, r.temperature_error});
        scal.rows.push_back({sc.epsilon, sc.velocity_norm, sc.scaled_strain, sc.temperature_norm, sc.scaled_gradient,
                             sc.vertical_fraction});
        energy.rows.push_back(energy_row(d));
        // Rewritten after every epsilon so a later failure leaves the finished rows on disk.
        s.csv("convergence.csv", conv);
        s.csv("scaling.csv", scal);
        s.csv("energy.csv", energy);
    }
    return ordered_json{{"rows", conv.rows.size()}};
}

}  // namespace

std::string formula_tag() {
    return "formulas: reynolds=tanh-form v1=K/mu v2=slope-squared conduction=unscaled";
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 unavailable");
    }
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

RunOutcome run(const RunConfig& cfg, const std::string& config_text) {
    Session s(cfg, config_text);
    ordered_json results;
    try {
        switch (cfg.mode) {
            case RunMode::reduced: results = run_reduced(cfg, s); break;
            case RunMode::dilated: results = run_dilated(cfg, s); break;
            case RunMode::converge: results = run_converge(cfg, s); break;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        s.outcome.exit_code = exit_solver_failure;
        s.outcome.error = e.what();
    }
    s.manifest(results);
    return s.outcome;
}

}  // namespace porolux
