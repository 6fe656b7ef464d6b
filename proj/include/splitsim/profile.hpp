#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitsim {

/// Error raised while reading a profile document; `row` is the 1-based line
/// number of the offending record (0 when the document as a whole is bad).
struct ProfileError : std::runtime_error {
    int row;
    ProfileError(int row_, const std::string& msg)
        : std::runtime_error(row_ > 0 ? "row " + std::to_string(row_) + ": " + msg : msg),
          row(row_) {}
};

/// Per-layer record of a split network's workload profile. Workloads are
/// cumulative from the input: layer j's forward work is the cost of pushing
/// one sample through layers 1..j. Sizes are what crosses the wire per sample
/// when the network is cut after this layer. The document units (MFLOP, MB)
/// are the stored representation so that serialize/load round trips are
/// bit-exact; consumers read the converted accessors.
struct LayerProfile {
    int index = 0;                // 1-based position
    std::string name;
    double fp_cum_mflop = 0.0;    // cumulative forward-pass MFLOP/sample
    double bp_cum_mflop = 0.0;    // cumulative backward-pass MFLOP/sample
    double smashed_mb = 0.0;      // cut-layer activation size, MB/sample
    double grad_mb = 0.0;         // cut-layer gradient size, MB/sample
    double param_cum_mb = 0.0;    // cumulative parameter size of layers 1..j

    double fp_cum_flops() const { return fp_cum_mflop * 1e6; }
    double bp_cum_flops() const { return bp_cum_mflop * 1e6; }
    double smashed_bits() const { return smashed_mb * 8388608.0; }
    double grad_bits() const { return grad_mb * 8388608.0; }
    double param_cum_bits() const { return param_cum_mb * 8388608.0; }
};

/// Immutable after construction; safe to share across concurrent readers.
struct ModelProfile {
    std::vector<LayerProfile> layers;

    int total_layers() const { return static_cast<int>(layers.size()); }
    double whole_fp_flops() const { return layers.back().fp_cum_flops(); }
    double whole_bp_flops() const { return layers.back().bp_cum_flops(); }
};

/// Workload split induced by cutting after layer `cut` (server keeps the
/// loss-producing last layer, so 1 <= cut <= L-1).
struct CutWorkloads {
    double client_fp_flops = 0.0;     // layers 1..cut, forward
    double server_fp_flops = 0.0;     // layers cut+1..L, forward
    double client_bp_flops = 0.0;     // layers 1..cut, backward
    double server_bp_flops = 0.0;     // layers cut+1..L-1, backward
    double last_layer_bp_flops = 0.0; // layer L alone, backward
    double smashed_bits = 0.0;        // uplink activation size per sample
    double grad_bits = 0.0;           // downlink gradient size per sample
    double client_model_bits = 0.0;   // parameter size of the client-side part
};

/// Parses a line-oriented profile document. One layer per line, fields
/// comma-separated, `#` starts a comment:
///
///   name, fp_cum_mflop[, bp_cum_mflop][, smashed_mb][, grad_mb][, param_cum_mb]
///
/// A 3-field row is (name, fp, smashed); from 4 fields on, the optional
/// columns fill in left to right. An empty slot keeps its default:
/// bp = 2*fp, grad = smashed, param = 0. Sizes are megabytes (2^20 bytes).
ModelProfile load_profile(std::istream& in);
ModelProfile load_profile_file(const std::string& path);
ModelProfile load_profile_string(const std::string& text);

/// Inverse of load_profile: emits all six columns at full precision so a
/// round trip reproduces the profile bit-exactly.
std::string serialize_profile(const ModelProfile& p);

/// Built-in workload profile of ResNet-18 on 64x64 inputs, one row per
/// profiled unit in network order. The CONV4-CONV6 triple appears twice: the
/// two residual blocks of the 128-channel stage are profiled separately and
/// both occurrences are kept. Backward workloads default to twice the forward
/// FLOPs and gradient sizes equal the activation sizes; override via a
/// profile file if measured values are available.
ModelProfile resnet18_preset();

/// Cumulative workload/size selectors at a cut. Throws std::out_of_range for
/// cut < 1 or cut >= total_layers (the last layer is not cuttable).
CutWorkloads workloads_at_cut(const ModelProfile& profile, int cut);

/// Validates profile invariants (>=2 layers, positive non-decreasing
/// cumulative workloads, positive cut sizes). Throws ProfileError.
void validate_profile(const ModelProfile& p);

}  // namespace splitsim
