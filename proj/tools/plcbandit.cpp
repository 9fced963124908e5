// plcbandit: run relay-selection experiments from a config file.
//
//   plcbandit run <config> [--output DIR]
//   plcbandit sweep <config> --param NAME --values V1,V2,... [--output DIR]
//   plcbandit validate <config>
//
// Exit codes: 0 success, 1 config error, 2 simulation error, 3 I/O error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plcbandit/plcbandit.hpp"

namespace {

enum ExitCode : int
{
    kOk = 0,
    kConfigError = 1,
    kSimulationError = 2,
    kIoError = 3,
};

std::filesystem::path output_dir_for(const plcbandit::ExperimentConfig& config, const std::string& override_dir)
{
    return override_dir.empty() ? std::filesystem::path(config.execution.output_dir) : std::filesystem::path(override_dir);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-hop power-line relay selection with bandit policies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string param_name;
    std::string values_list;

    CLI::App* run_cmd = app.add_subcommand("run", "Run every configured policy and write trace and summary CSVs");
    run_cmd->add_option("config", config_path, "Config file")->required();
    run_cmd->add_option("-o,--output", output_override, "Output directory (overrides execution.output_dir)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Repeat the experiment over values of one parameter");
    sweep_cmd->add_option("config", config_path, "Config file")->required();
    sweep_cmd->add_option("--param", param_name, "discount, window_slots or num_relays")->required();
    sweep_cmd->add_option("--values", values_list, "Comma-separated values")->required();
    sweep_cmd->add_option("-o,--output", output_override, "Output directory (overrides execution.output_dir)");

    CLI::App* validate_cmd = app.add_subcommand("validate", "Parse and validate a config file");
    validate_cmd->add_option("config", config_path, "Config file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try
    {
        const plcbandit::ExperimentConfig config = plcbandit::load_config(config_path);
        const plcbandit::Scenario scenario = plcbandit::to_scenario(config);
        (void)plcbandit::to_policy_specs(config);

        if (*validate_cmd)
        {
            std::cout << config_path << ": ok (" << scenario.num_arms() << " relays, " << config.policies.size() << " policies, "
                      << scenario.horizon_slots << " slots, " << config.execution.num_seeds << " seeds)\n";
            return kOk;
        }
        if (*run_cmd)
        {
            for (const auto& path : plcbandit::run_experiment(config, output_dir_for(config, output_override)))
            {
                std::cout << path.string() << '\n';
            }
            return kOk;
        }
        const auto param = plcbandit::parse_sweep_parameter(param_name);
        if (!param)
        {
            std::cerr << "error: unknown sweep parameter '" << param_name << "' (expected discount, window_slots or num_relays)\n";
            return kConfigError;
        }
        const std::vector<double> values = plcbandit::parse_sweep_values(*param, values_list);
        for (const auto& path : plcbandit::sweep(config, *param, values, output_dir_for(config, output_override)))
        {
            std::cout << path.string() << '\n';
        }
        return kOk;
    }
    catch (const plcbandit::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    catch (const plcbandit::IoError& e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoError;
    }
    catch (const std::exception& e)
    {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kSimulationError;
    }
}
