// Command-line front end. Exit codes: 0 success, 2 config/usage error,
// 3 internal numeric error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fcs/cli.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string output_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> r_total;
    std::optional<double> attenuation_db;
    bool optimize = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (key = value with [sections])");
    cmd->add_option("--output", opts.output_path, "write output to this file instead of stdout");
    cmd->add_option("--seed", [&opts](const CLI::results_t& r) {
        opts.seed = std::stoull(r[0]);
        return true;
    }, "RNG seed (overrides config)");
    cmd->add_option("--r-total", [&opts](const CLI::results_t& r) {
        opts.r_total = std::stoi(r[0]);
        return true;
    }, "correlation range r1+r2 (overrides config)");
    cmd->add_option("--attenuation-db", [&opts](const CLI::results_t& r) {
        opts.attenuation_db = std::stod(r[0]);
        return true;
    }, "total channel attenuation in dB (overrides config)");
}

int run(const std::string& name, const CommonOpts& opts) {
    fcs::Config cfg = opts.config_path.empty() ? fcs::Config::parse_string("")
                                               : fcs::Config::parse_file(opts.config_path);
    fcs::CliOverrides ov;
    ov.seed = opts.seed;
    ov.r_total = opts.r_total;
    ov.attenuation_db = opts.attenuation_db;
    ov.optimize = opts.optimize;

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opts.output_path.empty()) {
        file.open(opts.output_path);
        if (!file) {
            std::cerr << "error: cannot open output file " << opts.output_path << "\n";
            return 2;
        }
        out = &file;
    }
    if (name == "sweep") fcs::cmd_sweep(cfg, ov, *out);
    else if (name == "point") fcs::cmd_point(cfg, ov, *out);
    else if (name == "simulate") fcs::cmd_simulate(cfg, ov, *out);
    else if (name == "coverage") fcs::cmd_coverage(cfg, ov, *out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-correlation-secure QKD bound calculator and simulator"};
    app.require_subcommand(1);

    CommonOpts sweep_opts, point_opts, sim_opts, cov_opts;
    add_common(app.add_subcommand("sweep", "key-rate curves over attenuation"), sweep_opts);
    CLI::App* point = app.add_subcommand("point", "evaluate one operating point");
    add_common(point, point_opts);
    point->add_flag("--optimize", point_opts.optimize, "optimize mu and P_est first");
    add_common(app.add_subcommand("simulate", "run the Monte Carlo protocol"), sim_opts);
    add_common(app.add_subcommand("coverage", "bound coverage experiments"), cov_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const CommonOpts& opts = name == "sweep"      ? sweep_opts
                             : name == "point"    ? point_opts
                             : name == "simulate" ? sim_opts
                                                  : cov_opts;
    try {
        return run(name, opts);
    } catch (const fcs::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}
