#pragma once

#include <string>
#include <vector>

#include "splitsim/units.hpp"

namespace splitsim {

/// Minimal row-major dense matrix; just enough for the toy split network.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    Matrix row(int r) const;
    void add_scaled(const Matrix& other, double scale);
};

Matrix matmul(const Matrix& a, const Matrix& b);               // a(r,k) * b(k,c)
Matrix matmul_transposed_b(const Matrix& a, const Matrix& b);  // a(r,k) * b(c,k)^T

enum class Act { identity, relu, sigmoid };

Act parse_act(const std::string& name);

struct DenseLayer {
    Matrix weight;             // in x out
    std::vector<double> bias;  // out
    Act act = Act::identity;

    int in_dim() const { return weight.rows; }
    int out_dim() const { return weight.cols; }
};

using LayerStack = std::vector<DenseLayer>;

/// Forward intermediates of one stack on one batch, kept for backprop:
/// input, then per layer the pre-activations and activations.
struct StackTrace {
    Matrix input;
    std::vector<Matrix> pre;
    std::vector<Matrix> act;

    int n_rows() const { return input.rows; }

    /// Row-sliced copy (half-open [begin, end)) of every traced matrix.
    StackTrace slice_rows(int begin, int end) const;

    /// this += scale * other (same shapes). Used to build the merged trace
    /// that aggregated paths back-propagate through.
    void add_scaled(const StackTrace& other, double scale);
};

struct LayerGrads {
    Matrix d_weight;
    std::vector<double> d_bias;
};
using StackGrads = std::vector<LayerGrads>;

StackGrads zero_grads(const LayerStack& stack);
void apply_update(LayerStack& stack, const StackGrads& grads, double learning_rate);

Matrix forward(const LayerStack& stack, const Matrix& x, StackTrace* trace);

/// Back-propagates per-row output gradients through a stack.
///   g_out           per-row gradient at the stack output; with respect to the
///                   last pre-activation when from_preact, otherwise with
///                   respect to the last activations
///   row_weights     per-row coefficient applied to the weight-gradient
///                   accumulation (the activation-gradient chain itself is
///                   per-path and unweighted)
///   accum           gradient accumulator (+=)
///   capture_dz      optional: per-layer pre-activation gradients (front of
///                   the vector = first layer), one matrix per layer
/// Returns the per-row gradient with respect to the stack input activations.
Matrix backward(const LayerStack& stack, const StackTrace& trace, const Matrix& g_out,
                bool from_preact, const std::vector<double>& row_weights, StackGrads& accum,
                std::vector<Matrix>* capture_dz = nullptr);

enum class Loss { mse, softmax_ce };

Loss parse_loss(const std::string& name);

/// Per-sample loss values. MSE is 0.5*||y_hat - onehot||^2; softmax_ce is the
/// negative log-likelihood of the labeled class.
std::vector<double> per_sample_loss(const Matrix& y_hat, const std::vector<int>& labels,
                                    Loss loss);

/// Per-sample gradient of the sample-wise loss with respect to the network's
/// last pre-activation (for softmax_ce: softmax(y_hat) - onehot).
Matrix last_layer_gradients(const Matrix& y_hat, const std::vector<int>& labels, Loss loss);

/// How aggregated paths traverse the server stack:
///   merged_trace    one backward pass per aggregated slot, through the
///                   lambda-weighted mean of the clients' traced activations
///   per_client_avg  chain through every client's own trace, then
///                   lambda-average the results (costlier; for A/B checks)
enum class AggBackprop { merged_trace, per_client_avg };

struct AggregationConfig {
    Ratio phi{0, 1};
    std::vector<double> lambda;  // data-share weights, sum to 1
    AggBackprop mode = AggBackprop::merged_trace;
};

/// One split model: per-client front stacks plus the shared server stack.
/// Every client stack has identical shapes; the cut interface width must
/// match the server input.
struct SplitModel {
    std::vector<LayerStack> clients;
    LayerStack server;

    int n_clients() const { return static_cast<int>(clients.size()); }
};

/// Slot-aligned last-layer gradient aggregation: slots 1..ceil(phi*b) of every
/// client average into one gradient per slot (lambda-weighted); the remaining
/// slots pass through untouched.
struct AggregatedGradients {
    Matrix aggregated;                 // ceil(phi*b) x out
    std::vector<Matrix> unaggregated;  // per client, (b - ceil(phi*b)) x out
};
AggregatedGradients aggregate_last_layer(const std::vector<Matrix>& per_client_grads,
                                         const AggregationConfig& cfg);

/// Server-side backward pass from the (aggregated + unaggregated) last-layer
/// gradients: weight gradients take coefficient 1/b on aggregated paths and
/// lambda_i/b on client i's unaggregated paths. Returns the cut-layer
/// gradients to broadcast (aggregated) and to deliver per client.
struct ServerBackwardResult {
    StackGrads grads;
    Matrix aggregated_cut;                 // ceil(phi*b) x q
    std::vector<Matrix> unaggregated_cut;  // per client
};
/// `capture_agg_dz`, when given, receives the aggregated paths' per-layer
/// pre-activation gradients (empty at phi=0).
ServerBackwardResult server_backward(const LayerStack& server,
                                     const std::vector<StackTrace>& per_client_traces,
                                     const AggregatedGradients& grads,
                                     const AggregationConfig& cfg, int batch,
                                     std::vector<Matrix>* capture_agg_dz = nullptr);

/// Client-side backward pass: the broadcast (aggregated) cut gradients chain
/// through this client's own traced activations alongside its own
/// unaggregated gradients; every path carries coefficient 1/b.
StackGrads client_backward(const LayerStack& client, const StackTrace& trace,
                           const Matrix& aggregated_cut, const Matrix& own_unaggregated_cut,
                           int batch, std::vector<Matrix>* capture_agg_dz = nullptr);

}  // namespace splitsim
