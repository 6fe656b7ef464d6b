// Independent reference implementations used by the unit and acceptance
// suites. Everything here recomputes results from first principles with plain
// loops; none of it calls the library's backward pass, water-filling, or
// power-control code paths it is used to check.
#pragma once

#include <cstdint>
#include <vector>

#include "splitsim/splitnet.hpp"

namespace oracle {

// ---- plain-loop reference backprop over a stacked split network ----

/// Per-sample chain results for one client's batch pushed through
/// client-stack + server-stack as one monolithic network.
struct RefChains {
    std::vector<double> losses;                          // per sample
    // dz[layer][sample][unit]: gradient of that sample's loss w.r.t. the
    // layer's pre-activation; layers indexed client-first, 0-based.
    std::vector<std::vector<std::vector<double>>> dz;
    // dcut[sample][unit]: gradient w.r.t. the cut activations (smashed rows).
    std::vector<std::vector<double>> dcut;
};

RefChains ref_chains(const splitsim::LayerStack& client, const splitsim::LayerStack& server,
                     const splitsim::Matrix& x, const std::vector<int>& labels,
                     splitsim::Loss loss);

/// Reference parallel-split round with all paths unaggregated: server weight
/// gradients take coefficient lambda_i/b, client i's own gradients 1/b.
/// Applies the updates in place.
void ref_psl_round(splitsim::SplitModel& model, const std::vector<splitsim::Matrix>& batches,
                   const std::vector<std::vector<int>>& labels,
                   const std::vector<double>& lambda, splitsim::Loss loss, double eta_client,
                   double eta_server);

/// Reference gradients of one PSL round without applying them.
struct RefRoundGrads {
    splitsim::StackGrads server;
    std::vector<splitsim::StackGrads> clients;
};
RefRoundGrads ref_psl_grads(const splitsim::SplitModel& model,
                            const std::vector<splitsim::Matrix>& batches,
                            const std::vector<std::vector<int>>& labels,
                            const std::vector<double>& lambda, splitsim::Loss loss);

// ---- optimizer oracles ----

/// Exhaustive grid search for the cheapest power split carrying `target_rate`
/// over <= 3 subchannels (grid_n points per free dimension). Returns the
/// minimal power found.
double grid_min_power(double target_rate, const std::vector<double>& bandwidth_hz,
                      const std::vector<double>& gain, double antenna_gain, double noise_psd,
                      int grid_n);

/// Randomized search over rate variables for the min-max uplink-stage problem
/// on a small instance. Half the samples are raw uniform draws, half are
/// direction draws scaled onto the power-cap surface. Returns the best
/// objective max_i(t_fp[i] + bits_needed / sum theta_i) found.
struct PcInstance {
    // per device: fp latency offset and owned subchannels
    std::vector<double> t_fp;
    std::vector<std::vector<double>> bandwidth_hz;
    std::vector<std::vector<double>> gain;
    std::vector<double> p_max_w;
    double p_th_w = 0.0;
    double bits_needed = 0.0;  // batch * smashed bits
    double antenna_gain = 0.0;
    double noise_psd = 0.0;
};
double random_search_power_control(const PcInstance& inst, long long samples, std::uint64_t seed);

double split_power(const std::vector<double>& theta, const std::vector<double>& bandwidth_hz,
                   const std::vector<double>& gain, double antenna_gain, double noise_psd);

}  // namespace oracle
