#include "splitsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "splitsim/rng.hpp"

namespace splitsim {

double LinkGainTable::min_gain() const {
    return *std::min_element(gain.begin(), gain.end());
}

LinkGainTable sample_gains(const ChannelModel& model, const std::vector<DeviceProfile>& devices,
                           const std::vector<SubchannelSpec>& subchannels) {
    if (devices.empty()) throw std::invalid_argument("sample_gains: no devices");
    if (subchannels.empty()) throw std::invalid_argument("sample_gains: no subchannels");
    if (model.p_los < 0.0 || model.p_los > 1.0)
        throw std::invalid_argument("sample_gains: p_los outside [0,1]");

    LinkGainTable t;
    t.n_devices = static_cast<int>(devices.size());
    t.n_subchannels = static_cast<int>(subchannels.size());
    t.gain.resize(static_cast<std::size_t>(t.n_devices) * t.n_subchannels);

    for (int i = 0; i < t.n_devices; ++i) {
        Rng rng(derive_seed(model.seed, 0x1000 + static_cast<std::uint64_t>(i)));
        const bool los = rng.bernoulli(model.p_los);
        const double exponent = los ? model.exp_los : model.exp_nlos;
        const double shadow_std = los ? model.shadow_std_los_db : model.shadow_std_nlos_db;
        const double d = devices[i].distance_m;
        if (d <= 0.0) throw std::invalid_argument("sample_gains: non-positive distance");

        // One shadowing draw per device: the subchannels share a band, so the
        // obstruction loss is common across them; only the frequency term
        // varies with k.
        const double shadow_db = shadow_std * rng.normal();
        for (int k = 0; k < t.n_subchannels; ++k) {
            const double pl_db = model.ref_loss_db +
                                 20.0 * std::log10(subchannels[k].center_freq_hz / model.ref_freq_hz) +
                                 10.0 * exponent * std::log10(d) + shadow_db;
            t.at(i, k) = std::pow(10.0, -pl_db / 10.0);
        }
    }
    return t;
}

double link_rate(double bandwidth_hz, double psd_w_per_hz, double gain, double antenna_gain,
                 double noise_psd_w_per_hz) {
    if (psd_w_per_hz < 0.0) throw std::invalid_argument("link_rate: negative PSD");
    return bandwidth_hz * std::log2(1.0 + psd_w_per_hz * antenna_gain * gain / noise_psd_w_per_hz);
}

double uplink_rate(const std::vector<SubchannelSpec>& subchannels, const std::vector<int>& owner,
                   const std::vector<double>& psd, const LinkGainTable& gains, int device,
                   double antenna_gain, double noise_psd_w_per_hz) {
    double rate = 0.0;
    for (std::size_t k = 0; k < subchannels.size(); ++k) {
        if (owner[k] != device) continue;
        rate += link_rate(subchannels[k].bandwidth_hz, psd[k], gains.at(device, static_cast<int>(k)),
                          antenna_gain, noise_psd_w_per_hz);
    }
    return rate;
}

double broadcast_rate(const std::vector<SubchannelSpec>& subchannels, const LinkGainTable& gains,
                      double p_dl_w_per_hz, double antenna_gain, double noise_psd_w_per_hz) {
    const double weakest = gains.min_gain();
    double rate = 0.0;
    for (const SubchannelSpec& s : subchannels)
        rate += link_rate(s.bandwidth_hz, p_dl_w_per_hz, weakest, antenna_gain, noise_psd_w_per_hz);
    return rate;
}

double downlink_rate(const std::vector<SubchannelSpec>& subchannels, const std::vector<int>& owner,
                     const LinkGainTable& gains, int device, double p_dl_w_per_hz,
                     double antenna_gain, double noise_psd_w_per_hz) {
    double rate = 0.0;
    for (std::size_t k = 0; k < subchannels.size(); ++k) {
        if (owner[k] != device) continue;
        rate += link_rate(subchannels[k].bandwidth_hz, p_dl_w_per_hz,
                          gains.at(device, static_cast<int>(k)), antenna_gain, noise_psd_w_per_hz);
    }
    return rate;
}

}  // namespace splitsim
