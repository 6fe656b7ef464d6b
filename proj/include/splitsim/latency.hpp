#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "splitsim/scenario.hpp"

namespace splitsim {

/// A device that must transmit or receive has no usable rate (it owns no
/// subchannel). Signals an infeasible allocation, not a programming error.
struct UnreachableDeviceError : std::runtime_error {
    int device;
    UnreachableDeviceError(int device_, const std::string& what)
        : std::runtime_error(what), device(device_) {}
};

/// One joint decision: subchannel ownership, per-subchannel transmit PSD,
/// and the cut layer. owner[k] is a device id or -1 for unassigned.
struct Allocation {
    std::vector<int> owner;
    std::vector<double> psd;  // W/Hz per subchannel
    int cut = 1;
};

/// The seven stage latencies of one training round plus their composition.
struct LatencyBreakdown {
    std::vector<double> t_client_fp;  // per device
    std::vector<double> t_uplink;
    double t_server_fp = 0.0;
    double t_server_bp = 0.0;
    double t_broadcast = 0.0;
    std::vector<double> t_downlink;
    std::vector<double> t_client_bp;
    double total = 0.0;

    /// max_i(fp+up) + server fp + server bp + broadcast + max_i(down+bp).
    double recompose() const;
    double max_up_stage() const;
    double max_down_stage() const;
};

// Stage formulas. Arguments are raw quantities so each one can be exercised
// directly against hand-computed values.

double client_fp_latency(const DeviceProfile& dev, const ModelProfile& profile, int cut, int batch);

double smashed_tx_latency(double uplink_rate_bps, const ModelProfile& profile, int cut, int batch,
                          int device = -1);

double server_fp_latency(int n_clients, int batch, double kappa_s, double f_s,
                         double server_fp_flops);

double server_bp_latency(int n_clients, int batch, const Ratio& phi, double kappa_s, double f_s,
                         double server_bp_flops, double last_layer_bp_flops);

double broadcast_latency(const Ratio& phi, int batch, double grad_bits, double broadcast_rate_bps);

double unagg_tx_latency(const Ratio& phi, int batch, double grad_bits, double downlink_rate_bps,
                        int device = -1);

double client_bp_latency(const DeviceProfile& dev, const ModelProfile& profile, int cut, int batch);

/// Evaluates the full per-round latency of an allocation. Throws
/// UnreachableDeviceError if a device that must communicate has rate 0.
LatencyBreakdown round_latency(const Scenario& scn, const LinkGainTable& gains,
                               const Allocation& alloc, const Ratio& phi);

/// Standalone feasibility check of an allocation against the scenario's
/// constraints (exclusive subchannel ownership, power caps, PSD sign, cut
/// range). Returns human-readable violations; empty means feasible.
/// `allow_unassigned` tolerates ownerless subchannels: the greedy allocator
/// legitimately leaves a channel idle when every device's power cap is
/// saturated (nobody transmits there, so no constraint is broken).
std::vector<std::string> allocation_violations(const Scenario& scn, const Allocation& alloc,
                                               bool allow_unassigned = false);

}  // namespace splitsim
