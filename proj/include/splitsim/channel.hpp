#pragma once

#include <cstdint>
#include <vector>

namespace splitsim {

struct SubchannelSpec {
    int index = 0;               // 1-based
    double center_freq_hz = 0.0;
    double bandwidth_hz = 0.0;
};

struct DeviceProfile {
    int id = 0;                   // 0-based
    double compute_cycles_per_s = 0.0;
    double intensity_cycles_per_flop = 0.0;
    double distance_m = 0.0;
    double p_max_w = 0.0;         // per-device transmit power cap
    long long data_count = 0;     // local dataset size, samples
};

/// Log-distance path loss with a frequency-dependent reference term.
/// Each device draws one line-of-sight state (exponent + shadowing spread)
/// shared across its subchannels; shadowing itself is drawn per link.
struct ChannelModel {
    double ref_loss_db = 32.44;   // loss at 1 m / ref_freq
    double ref_freq_hz = 1e9;
    double exp_los = 2.1;
    double exp_nlos = 3.4;
    double shadow_std_los_db = 3.6;
    double shadow_std_nlos_db = 9.7;
    double p_los = 0.5;
    double antenna_gain = 10.0;   // combined client*server gain, linear
    std::uint64_t seed = 1;
};

struct LinkGainTable {
    int n_devices = 0;
    int n_subchannels = 0;
    std::vector<double> gain;  // row-major [device][subchannel], linear scale

    double at(int device, int subchannel) const { return gain[device * n_subchannels + subchannel]; }
    double& at(int device, int subchannel) { return gain[device * n_subchannels + subchannel]; }

    /// Weakest link across all device/subchannel pairs.
    double min_gain() const;
};

/// Draws the average link gains for a scenario. Deterministic in
/// (model.seed, inputs); device draws come from per-device substreams so a
/// device's channel state does not move when unrelated devices are added.
LinkGainTable sample_gains(const ChannelModel& model, const std::vector<DeviceProfile>& devices,
                           const std::vector<SubchannelSpec>& subchannels);

/// Shannon rate of one subchannel, bits/s.
double link_rate(double bandwidth_hz, double psd_w_per_hz, double gain, double antenna_gain,
                 double noise_psd_w_per_hz);

/// Uplink rate of `device` over the subchannels it owns (owner[k] == device),
/// each driven at psd[k] W/Hz. Devices owning nothing get rate 0.
double uplink_rate(const std::vector<SubchannelSpec>& subchannels, const std::vector<int>& owner,
                   const std::vector<double>& psd, const LinkGainTable& gains, int device,
                   double antenna_gain, double noise_psd_w_per_hz);

/// Shared downlink broadcast rate: all subchannels, pinned to the weakest
/// link gain so every device can decode.
double broadcast_rate(const std::vector<SubchannelSpec>& subchannels, const LinkGainTable& gains,
                      double p_dl_w_per_hz, double antenna_gain, double noise_psd_w_per_hz);

/// Per-device downlink rate over the device's own subchannels at the server
/// transmit PSD.
double downlink_rate(const std::vector<SubchannelSpec>& subchannels, const std::vector<int>& owner,
                     const LinkGainTable& gains, int device, double p_dl_w_per_hz,
                     double antenna_gain, double noise_psd_w_per_hz);

}  // namespace splitsim
