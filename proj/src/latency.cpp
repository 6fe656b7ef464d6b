#include "splitsim/latency.hpp"

#include <algorithm>
#include <cmath>

namespace splitsim {

namespace {
double vec_max(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, a[i] + b[i]);
    return m;
}
}  // namespace

double LatencyBreakdown::max_up_stage() const { return vec_max(t_client_fp, t_uplink); }
double LatencyBreakdown::max_down_stage() const { return vec_max(t_downlink, t_client_bp); }

double LatencyBreakdown::recompose() const {
    return max_up_stage() + t_server_fp + t_server_bp + t_broadcast + max_down_stage();
}

double client_fp_latency(const DeviceProfile& dev, const ModelProfile& profile, int cut,
                         int batch) {
    if (batch < 1) throw std::invalid_argument("client_fp_latency: batch must be >= 1");
    const CutWorkloads w = workloads_at_cut(profile, cut);
    return batch * dev.intensity_cycles_per_flop * w.client_fp_flops / dev.compute_cycles_per_s;
}

double smashed_tx_latency(double uplink_rate_bps, const ModelProfile& profile, int cut, int batch,
                          int device) {
    if (batch < 1) throw std::invalid_argument("smashed_tx_latency: batch must be >= 1");
    if (uplink_rate_bps <= 0.0)
        throw UnreachableDeviceError(device, "device has no uplink rate (owns no subchannel?)");
    const CutWorkloads w = workloads_at_cut(profile, cut);
    return batch * w.smashed_bits / uplink_rate_bps;
}

double server_fp_latency(int n_clients, int batch, double kappa_s, double f_s,
                         double server_fp_flops) {
    return n_clients * batch * kappa_s * server_fp_flops / f_s;
}

double server_bp_latency(int n_clients, int batch, const Ratio& phi, double kappa_s, double f_s,
                         double server_bp_flops, double last_layer_bp_flops) {
    const double agg = static_cast<double>(phi.ceil_mul(batch));
    const double paths = agg + n_clients * (batch - agg);
    return (paths * kappa_s * server_bp_flops + n_clients * batch * kappa_s * last_layer_bp_flops) /
           f_s;
}

double broadcast_latency(const Ratio& phi, int batch, double grad_bits,
                         double broadcast_rate_bps) {
    const double agg = static_cast<double>(phi.ceil_mul(batch));
    if (agg == 0.0) return 0.0;
    return agg * grad_bits / broadcast_rate_bps;
}

double unagg_tx_latency(const Ratio& phi, int batch, double grad_bits, double downlink_rate_bps,
                        int device) {
    const double rest = static_cast<double>(batch - phi.ceil_mul(batch));
    if (rest == 0.0) return 0.0;
    if (downlink_rate_bps <= 0.0)
        throw UnreachableDeviceError(device, "device has no downlink rate (owns no subchannel?)");
    return rest * grad_bits / downlink_rate_bps;
}

double client_bp_latency(const DeviceProfile& dev, const ModelProfile& profile, int cut,
                         int batch) {
    if (batch < 1) throw std::invalid_argument("client_bp_latency: batch must be >= 1");
    const CutWorkloads w = workloads_at_cut(profile, cut);
    return batch * dev.intensity_cycles_per_flop * w.client_bp_flops / dev.compute_cycles_per_s;
}

LatencyBreakdown round_latency(const Scenario& scn, const LinkGainTable& gains,
                               const Allocation& alloc, const Ratio& phi) {
    const int n = scn.n_devices();
    const int b = scn.hyper.batch;
    const CutWorkloads w = workloads_at_cut(scn.profile, alloc.cut);

    LatencyBreakdown out;
    out.t_client_fp.resize(n);
    out.t_uplink.resize(n);
    out.t_downlink.resize(n);
    out.t_client_bp.resize(n);

    for (int i = 0; i < n; ++i) {
        const DeviceProfile& dev = scn.devices[i];
        out.t_client_fp[i] = client_fp_latency(dev, scn.profile, alloc.cut, b);
        const double up = uplink_rate(scn.subchannels, alloc.owner, alloc.psd, gains, i,
                                      scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
        out.t_uplink[i] = smashed_tx_latency(up, scn.profile, alloc.cut, b, i);
        const double down = downlink_rate(scn.subchannels, alloc.owner, gains, i,
                                          scn.server.p_dl_w_per_hz, scn.channel.antenna_gain,
                                          scn.noise_psd_w_per_hz);
        out.t_downlink[i] = unagg_tx_latency(phi, b, w.grad_bits, down, i);
        out.t_client_bp[i] = client_bp_latency(dev, scn.profile, alloc.cut, b);
    }

    out.t_server_fp = server_fp_latency(n, b, scn.server.intensity_cycles_per_flop,
                                        scn.server.compute_cycles_per_s, w.server_fp_flops);
    out.t_server_bp =
        server_bp_latency(n, b, phi, scn.server.intensity_cycles_per_flop,
                          scn.server.compute_cycles_per_s, w.server_bp_flops, w.last_layer_bp_flops);
    const double rb = broadcast_rate(scn.subchannels, gains, scn.server.p_dl_w_per_hz,
                                     scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
    out.t_broadcast = broadcast_latency(phi, b, w.grad_bits, rb);

    out.total = out.recompose();
    return out;
}

std::vector<std::string> allocation_violations(const Scenario& scn, const Allocation& alloc,
                                               bool allow_unassigned) {
    std::vector<std::string> v;
    const int n = scn.n_devices();
    const int m = scn.n_subchannels();
    const int L = scn.profile.total_layers();
    const double tol = 1.0 + 1e-9;

    if (static_cast<int>(alloc.owner.size()) != m || static_cast<int>(alloc.psd.size()) != m) {
        v.push_back("allocation vectors do not match the subchannel count");
        return v;
    }
    if (alloc.cut < 1 || alloc.cut >= L)
        v.push_back("cut layer " + std::to_string(alloc.cut) + " outside [1, " +
                     std::to_string(L - 1) + "]");

    std::vector<double> dev_power(n, 0.0);
    double total_power = 0.0;
    for (int k = 0; k < m; ++k) {
        if (alloc.psd[k] < 0.0) v.push_back("negative PSD on subchannel " + std::to_string(k + 1));
        if (alloc.owner[k] < 0) {
            if (!allow_unassigned)
                v.push_back("subchannel " + std::to_string(k + 1) + " unassigned");
            continue;
        }
        if (alloc.owner[k] >= n) {
            v.push_back("subchannel " + std::to_string(k + 1) + " owned by unknown device");
            continue;
        }
        const double p = alloc.psd[k] * scn.subchannels[k].bandwidth_hz;
        dev_power[alloc.owner[k]] += p;
        total_power += p;
    }
    for (int i = 0; i < n; ++i)
        if (dev_power[i] > scn.devices[i].p_max_w * tol)
            v.push_back("device " + std::to_string(i) + " exceeds its power cap");
    if (total_power > scn.hyper.p_th_w * tol) v.push_back("total uplink power exceeds the cap");
    return v;
}

}  // namespace splitsim
