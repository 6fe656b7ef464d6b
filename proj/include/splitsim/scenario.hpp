#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitsim/channel.hpp"
#include "splitsim/profile.hpp"
#include "splitsim/units.hpp"

namespace splitsim {

/// Config-file syntax or validation problem; `line` is 1-based (0 = whole file).
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

/// The scenario cannot be run at all (e.g. fewer subchannels than devices).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ServerProfile {
    double compute_cycles_per_s = 5e9;
    double intensity_cycles_per_flop = 1.0 / 32.0;
    double p_dl_w_per_hz = 1e-8;  // downlink transmit PSD
};

struct Hyper {
    int batch = 64;
    Ratio phi{1, 2};
    double p_th_w = 0.0;          // total uplink power cap
    double epsilon_s = 1e-6;      // BCD stopping tolerance, seconds
    int max_iters = 50;
    std::uint64_t seed = 1;
    int target_epochs = 10;       // epochs assumed needed to reach target accuracy
};

/// Toy split-network training setup (synthetic two-class Gaussian mixture).
struct TrainConfig {
    int input_dim = 8;
    int hidden_dim = 16;
    int cut_dim = 8;
    int classes = 2;
    double eta_client = 1.5e-4;
    double eta_server = 1e-4;
    int epochs = 10;
    int switch_epoch = 0;         // phased training: rounds at phi=1 before this epoch (0 = epochs/2)
    int train_size = 2000;
    int test_size = 500;
    std::string loss = "softmax_ce";       // or "mse"
    std::string agg_backprop = "merged";   // or "per_client"
};

struct Scenario {
    std::vector<DeviceProfile> devices;
    ServerProfile server;
    std::vector<SubchannelSpec> subchannels;
    ChannelModel channel;
    ModelProfile profile;
    Hyper hyper;
    TrainConfig train;

    int n_devices() const { return static_cast<int>(devices.size()); }
    int n_subchannels() const { return static_cast<int>(subchannels.size()); }
    double noise_psd_w_per_hz = 3.9810717055349695e-21;  // -174 dBm/Hz
};

/// Raw key/value view of a config file, kept so sweeps can override keys and
/// rebuild the scenario deterministically.
struct ScenarioConfig {
    std::vector<std::pair<std::string, std::string>> entries;  // in file order
    void set(const std::string& key, const std::string& value);
    const std::string* find(const std::string& key) const;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

/// Materializes a scenario from a parsed config: unit conversions, seeded
/// device placement in a disc around the server, subchannel grid, profile
/// selection. Throws ConfigError for bad values and InfeasibleError when the
/// scenario cannot be run (n_subchannels < n_devices).
Scenario build_scenario(const ScenarioConfig& cfg);

Scenario load_scenario(const std::string& path);

}  // namespace splitsim
