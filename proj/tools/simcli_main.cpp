// Command-line front end: scenario optimization, split training runs, and
// parameter sweeps, all emitting CSV. Exit codes: 0 ok, 2 config error,
// 3 infeasible scenario.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitsim/runs.hpp"

namespace {

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split-learning latency simulator and resource optimizer"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "scenario config file")->required();
        cmd->add_option("--seed", seed_override, "override the scenario seed");
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* optimize = app.add_subcommand("optimize", "optimize one scenario and run baselines");
    add_common(optimize);

    CLI::App* train = app.add_subcommand("train", "train the toy split network");
    add_common(train);
    std::string frameworks_arg = "epsl,psl";
    long long epochs_override = -1;
    train->add_option("--frameworks", frameworks_arg,
                      "comma list of vanilla_sl,sfl,psl,epsl,epsl_pt");
    train->add_option("--epochs", epochs_override, "override the configured epoch count");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one scenario parameter");
    add_common(sweep);
    std::string axis_arg, values_arg;
    int reps = 1;
    sweep->add_option("--axis", axis_arg,
                      "one of n_devices,bandwidth_total,f_s,dataset_size,phi")
        ->required();
    sweep->add_option("--values", values_arg, "comma list of axis values")->required();
    sweep->add_option("--reps", reps, "repetitions per value (seeds base..base+R-1)");

    CLI11_PARSE(app, argc, argv);

    try {
        splitsim::ScenarioConfig cfg = splitsim::parse_config_file(config_path);
        if (seed_override >= 0) cfg.set("seed", std::to_string(seed_override));

        if (optimize->parsed()) {
            const splitsim::Scenario scn = splitsim::build_scenario(cfg);
            write_output(splitsim::optimize_csv(splitsim::run_optimize(scn)), out_path);
        } else if (train->parsed()) {
            if (epochs_override >= 0) cfg.set("epochs", std::to_string(epochs_override));
            const splitsim::Scenario scn = splitsim::build_scenario(cfg);
            std::vector<splitsim::Framework> fws;
            for (const std::string& name : split_list(frameworks_arg))
                fws.push_back(splitsim::parse_framework(name));
            if (fws.empty()) throw splitsim::ConfigError(0, "no frameworks given");
            write_output(splitsim::training_csv(splitsim::run_training(scn, fws)), out_path);
        } else if (sweep->parsed()) {
            const splitsim::SweepAxis axis = splitsim::parse_axis(axis_arg);
            const std::vector<std::string> values = split_list(values_arg);
            write_output(splitsim::run_sweep(cfg, axis, values, reps), out_path);
        }
    } catch (const splitsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const splitsim::ProfileError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const splitsim::InfeasibleError& e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const splitsim::InfeasiblePowerError& e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const splitsim::UnreachableDeviceError& e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
