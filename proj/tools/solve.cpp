#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "porolux/config.hpp"
#include "porolux/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Thin-film Darcy-Brinkman solver: reduced model, dilated 3D oracle, convergence study"};
    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::string log_level = "info";
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory (overrides run.output_dir)");
    app.add_option("--mode", mode, "reduced | dilated | converge (overrides run.mode)")
        ->check(CLI::IsMember({"reduced", "dilated", "converge"}));
    app.add_option("--log-level", log_level, "info | debug")->check(CLI::IsMember({"info", "debug"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : porolux::exit_config_error;
    }
    spdlog::set_level(log_level == "debug" ? spdlog::level::debug : spdlog::level::info);

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read config file " << config_path << '\n';
        return porolux::exit_config_error;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    porolux::RunConfig cfg;
    try {
        cfg = porolux::parse_config(text, mode.empty() ? std::nullopt : porolux::parse_mode(mode));
    } catch (const porolux::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return porolux::exit_config_error;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    spdlog::info("mode {}, writing to {}", porolux::to_string(cfg.mode), cfg.output_dir);
    const porolux::RunOutcome outcome = porolux::run(cfg, text);
    if (outcome.exit_code != porolux::exit_ok) {
        spdlog::error("run FAILED: {}", outcome.error);
    }
    return outcome.exit_code;
}
