// Command-line front end: simulate, predict, check, preset, oracle-compare.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "ga2d/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Giant atoms on a 2D coupled-cavity lattice"};
    app.set_version_flag("--version", std::string(GA2D_VERSION));
    app.require_subcommand(1);

    std::vector<std::string> sim_configs;
    std::string sim_out;
    int jobs = 1;
    auto* sim = app.add_subcommand("simulate", "run the split-operator evolution and write outputs");
    sim->add_option("--config", sim_configs, "run config (JSON); repeat for several runs")->required();
    sim->add_option("--out", sim_out, "output directory (overrides outputs.dir)");
    sim->add_option("--jobs", jobs, "independent runs in parallel")->check(CLI::PositiveNumber);

    std::string predict_config;
    auto* predict = app.add_subcommand("predict", "print resolvent predictions for each atom");
    predict->add_option("--config", predict_config, "run config (JSON)")->required();

    std::string check_config;
    auto* check = app.add_subcommand("check", "print subradiance verdicts and DFI pairs");
    check->add_option("--config", check_config, "run config (JSON)")->required();

    std::string preset_name, preset_out;
    ga2d::PresetOverrides over;
    bool list = false;
    auto* pre = app.add_subcommand("preset", "write a catalog configuration as a run config");
    pre->add_option("--name", preset_name, "preset name");
    pre->add_option("--out", preset_out, "file to write (default: stdout)");
    pre->add_option("--n", over.N, "lattice size override");
    pre->add_option("--g", over.g, "coupling strength override (units of J)");
    pre->add_flag("--list", list, "list preset names");

    std::string oracle_config;
    std::vector<double> dts{0.02, 0.01, 0.005};
    auto* oracle = app.add_subcommand("oracle-compare", "compare against exact diagonalisation (N <= 40)");
    oracle->add_option("--config", oracle_config, "run config (JSON)")->required();
    oracle->add_option("--dt-list", dts, "time steps to compare")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ga2d::exit_io;
    }

    if (sim->parsed()) return ga2d::cmd_simulate_many(sim_configs, sim_out, jobs, std::cout, std::cerr);
    if (predict->parsed()) return ga2d::cmd_predict(predict_config, std::cout, std::cerr);
    if (check->parsed()) return ga2d::cmd_check(check_config, std::cout, std::cerr);
    if (pre->parsed()) {
        if (list || preset_name.empty()) {
            for (const auto& n : ga2d::preset_names()) std::cout << n << "\n";
            return preset_name.empty() && !list ? ga2d::exit_validation : ga2d::exit_ok;
        }
        return ga2d::cmd_preset(preset_name, preset_out, over, std::cout, std::cerr);
    }
    if (oracle->parsed()) return ga2d::cmd_oracle_compare(oracle_config, dts, std::cout, std::cerr);
    return ga2d::exit_validation;
}
