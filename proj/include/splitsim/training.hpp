#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsim/scenario.hpp"
#include "splitsim/splitnet.hpp"

namespace splitsim {

enum class Framework { vanilla_sl, sfl, psl, epsl, epsl_pt };

Framework parse_framework(const std::string& name);
const char* framework_name(Framework fw);

struct Dataset {
    Matrix x;                 // n x d
    std::vector<int> labels;  // n

    int size() const { return x.rows; }
};

/// Seeded two-class Gaussian mixture: unit-variance clouds around antipodal
/// centers with separation ~3 sigma, so the toy nets have something
/// learnable but not trivial.
Dataset make_mixture_dataset(int n, int dim, int classes, std::uint64_t seed);

/// Round-robin IID split into per-client shards (sample index order).
std::vector<Dataset> split_dataset(const Dataset& data, int n_clients);

/// Builds the toy split model: client input->hidden->cut stacks (ReLU unless
/// overridden) plus the shared server cut->hidden->classes stack, all clients
/// initialized to one seeded client-side model.
SplitModel init_split_model(const TrainConfig& cfg, int n_clients, std::uint64_t seed,
                            Act hidden_act = Act::relu);

struct TrainState {
    SplitModel model;
    AggregationConfig agg;
    Loss loss = Loss::softmax_ce;
    double eta_client = 0.0;
    double eta_server = 0.0;
    int batch = 0;
};

TrainState make_train_state(const Scenario& scn, Framework fw);

struct RoundMetrics {
    double mean_loss = 0.0;  // over all forwarded samples this round
};

/// Draws the mini-batches for (round, client) from a framework-independent
/// substream: every framework sees identical data given the same seed.
std::vector<std::vector<int>> draw_round_batches(const std::vector<Dataset>& shards, int batch,
                                                 std::uint64_t seed, int round_index);

/// Runs one training round of the given framework. Client passes are
/// independent and the server phase is the synchronization barrier; the
/// aggregation is a fixed-order weighted sum, so the result does not depend
/// on client completion order.
///
///   epsl        the seven-stage procedure at state.agg.phi
///   psl         epsl with phi = 0
///   sfl         psl, then data-share-weighted client model averaging
///   vanilla_sl  sequential per-device training with client model handoff
///   epsl_pt     epsl at phi = 1 before the switch epoch, phi = 0 after
/// `phi_override` (used by epsl_pt phases) replaces state.agg.phi when set.
RoundMetrics train_round(Framework fw, TrainState& state, const std::vector<Dataset>& shards,
                         const std::vector<std::vector<int>>& batches,
                         const Ratio* phi_override = nullptr);

struct EvalResult {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

/// Test-set metrics through one client's model copy plus the server.
EvalResult evaluate(const SplitModel& model, int client_index, const Dataset& data, Loss loss);

}  // namespace splitsim
