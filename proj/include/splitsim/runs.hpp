#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsim/optimizer.hpp"
#include "splitsim/training.hpp"

namespace splitsim {

/// Modeled per-round wall time of a framework on a fixed allocation:
///   epsl        the seven-stage round at `phi`
///   psl         the same at phi = 0
///   sfl         psl plus the client-model exchange (upload from the slowest
///               device, averaged model re-broadcast)
///   vanilla_sl  sequential per-device rounds plus client-model handoffs
/// Model exchange sizes come from the profile's cumulative parameter column;
/// a profile without parameter sizes prices the exchange at zero.
double framework_round_latency(const Scenario& scn, const LinkGainTable& gains,
                               const Allocation& alloc, Framework fw, const Ratio& phi);

/// Modeled time to reach target accuracy: target_epochs full passes over the
/// pooled dataset at ceil(D / (C*b)) rounds per epoch.
double latency_to_target(const Scenario& scn, const LinkGainTable& gains, const Allocation& alloc,
                         Framework fw, const Ratio& phi);

struct OptimizeRecord {
    std::uint64_t seed = 0;
    BcdResult bcd;
    std::vector<BaselineResult> baselines;  // a, b, c, d
};

/// Optimizes one scenario with the block-coordinate descent and runs the four
/// reference strategies on the same sampled gain table.
OptimizeRecord run_optimize(const Scenario& scn);

std::string optimize_csv(const OptimizeRecord& rec);

struct TrainRow {
    std::uint64_t seed = 0;
    Framework fw;
    int epoch = 0;
    int rounds = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    double test_loss = 0.0;
    double epoch_latency_s = 0.0;
    double cum_latency_s = 0.0;
};

/// Trains each framework on the same seeded data split; per-round wall time
/// comes from the latency model on the optimized allocation.
std::vector<TrainRow> run_training(const Scenario& scn, const std::vector<Framework>& frameworks);

std::string training_csv(const std::vector<TrainRow>& rows);

enum class SweepAxis { n_devices, bandwidth_total, f_s, dataset_size, phi };

SweepAxis parse_axis(const std::string& name);

/// One row per axis value: per-round objective statistics (mean/min/max over
/// repetition seeds) for the descent and the four baselines, plus modeled
/// per-round and to-target framework latencies. Repetition r of value v runs
/// with seed base+r; rows are emitted in ascending axis-value order.
std::string run_sweep(const ScenarioConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values, int repetitions);

}  // namespace splitsim
