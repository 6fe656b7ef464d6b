#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsim/latency.hpp"

namespace splitsim {

/// Power control cannot satisfy the caps: typically a device that must
/// transmit owns no subchannel.
struct InfeasiblePowerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-device rate variables: theta[i][x] is the rate carried on the x-th
/// subchannel owned by device i (subchannels in ascending index order).
/// theta and per-subchannel PSD are two views of the same decision:
///   theta = B * log2(1 + psd * G * gain / noise).
struct RateVars {
    std::vector<std::vector<double>> theta;

    double device_total(int i) const {
        double s = 0.0;
        for (double t : theta[i]) s += t;
        return s;
    }
};

/// Subchannel indices owned by each device, ascending.
std::vector<std::vector<int>> owned_subchannels(const std::vector<int>& owner, int n_devices);

RateVars psd_to_theta(const Scenario& scn, const LinkGainTable& gains,
                      const std::vector<int>& owner, const std::vector<double>& psd);

std::vector<double> theta_to_psd(const Scenario& scn, const LinkGainTable& gains,
                                 const std::vector<int>& owner, const RateVars& theta);

/// Greedy subchannel allocation at fixed PSD and cut. Phase 1 pairs the
/// slowest unassigned device with the best remaining subchannel (lowest
/// center-frequency/bandwidth) until every device owns one. Phase 2 keeps
/// handing the best remaining subchannel to the current straggler (the device
/// maximizing its uplink- or downlink-side stage latency) unless that would
/// break its power cap, in which case the device drops out of candidacy.
/// Ties everywhere resolve to the lowest index. Throws InfeasibleError when
/// there are fewer subchannels than devices.
std::vector<int> greedy_subchannel_alloc(const Scenario& scn, const LinkGainTable& gains,
                                         const std::vector<double>& psd, int cut,
                                         const Ratio& phi);

/// Cheapest way to carry `target_rate_bps` over one device's subchannels:
/// inverse water-filling, theta_x = max(0, B_x*log2(nu*gain_x)) with the water
/// level found by bisection. Returns the per-subchannel rates and the total
/// transmit power they cost.
struct PowerSplit {
    std::vector<double> theta;
    double power_w = 0.0;
};
PowerSplit min_power_for_rate(double target_rate_bps, const std::vector<double>& bandwidth_hz,
                              const std::vector<double>& gain, double antenna_gain,
                              double noise_psd_w_per_hz);

/// Optimal rate variables at fixed subchannel assignment and cut: minimizes
/// the uplink-stage bound t = max_i(client fp + upload time) under the
/// per-device and total power caps, by bisection on t with inverse
/// water-filling per device. Tolerance 1e-9 s on t.
struct PowerControlResult {
    RateVars theta;
    double t1 = 0.0;  // achieved uplink-stage bound
};
PowerControlResult solve_power_control(const Scenario& scn, const LinkGainTable& gains,
                                       const std::vector<int>& owner, int cut);

/// Exhaustive cut-layer selection at fixed rates and stage bounds: keeps cuts
/// whose per-device uplink/downlink stage latencies fit under t1/t2 and picks
/// the feasible cut minimizing the surrogate round latency (ties toward the
/// smaller index). If nothing fits, returns the cut with the smallest worst
/// violation and feasible=false so the surrounding descent can continue.
struct CutChoice {
    int cut = 1;
    bool feasible = false;
    double surrogate = 0.0;
};
CutChoice solve_cut_layer(const Scenario& scn, const LinkGainTable& gains,
                          const std::vector<int>& owner, const RateVars& theta, double t1,
                          double t2, const Ratio& phi);

/// Tight stage bounds for the current (rates, cut): t1 = max_i(fp + upload),
/// t2 = max_i(download + client bp).
struct AuxBounds {
    double t1 = 0.0;
    double t2 = 0.0;
};
AuxBounds update_aux(const Scenario& scn, const LinkGainTable& gains,
                     const std::vector<int>& owner, const RateVars& theta, int cut,
                     const Ratio& phi);

struct BcdResult {
    Allocation alloc;
    RateVars theta;
    LatencyBreakdown latency;
    std::vector<double> trace;  // accepted objective after each iteration
    int iterations = 0;
    bool feasible = false;
    std::vector<std::string> notes;
};

/// Block-coordinate descent over (subchannels, rates, cut, stage bounds).
/// Every block update is accepted only if it does not increase the round
/// latency, so the trace is non-increasing by construction. The descent is
/// sequential; independent scenarios can be optimized concurrently (no shared
/// mutable state), and the cut enumeration is a deterministic argmin.
BcdResult bcd_optimize(const Scenario& scn, const LinkGainTable& gains, const Ratio& phi,
                       double epsilon_s, int max_iters);

enum class BaselineKind { a, b, c, d };

/// The four reference strategies:
///   a: strongest-link subchannels, uniform PSD, random cut
///   b: greedy subchannels + optimized power, random cut
///   c: strongest-link subchannels, optimized power + cut
///   d: greedy subchannels + optimized cut, uniform PSD
/// Uniform PSD spreads the total power cap over the whole band, scaled down
/// per device where the per-device cap binds. Random cuts come from the
/// scenario seed.
struct BaselineResult {
    Allocation alloc;
    LatencyBreakdown latency;
    bool feasible = false;
};
BaselineResult baseline_alloc(BaselineKind kind, const Scenario& scn, const LinkGainTable& gains,
                              const Ratio& phi);

const char* baseline_name(BaselineKind kind);

}  // namespace splitsim
