#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinnlab/tape.hpp"
#include "pinnlab/tensor.hpp"

namespace pinnlab {

enum class ArchKind { Vanilla, ResNet, ModifiedMlp, Dm, Sdm };

/// What the dense multiplier multiplies over: post-product hidden outputs
/// (the literal recurrence) or the raw per-layer activations.
enum class MultiplierMode { HiddenOutputs, Activations };

const char* arch_name(ArchKind k);
ArchKind arch_from_name(const std::string& s);
const char* multiplier_mode_name(MultiplierMode m);
MultiplierMode multiplier_mode_from_name(const std::string& s);

struct NetworkConfig {
    ArchKind kind = ArchKind::Vanilla;
    int input_dim = 2;
    int hidden_layers = 4;
    int width = 128;
    int output_dim = 1;
    MultiplierMode multiplier_mode = MultiplierMode::HiddenOutputs;
    int skip_stride = 2; // Sdm: parity stride of the skip product set
};

/// Axis-aligned box bounds, one [lo,hi] pair per input dimension.
struct Domain {
    std::vector<std::array<double, 2>> bounds;
};

/// A derivative direction requested from the network: d^order u / d x_dim^order.
/// Mixed partials are not supported (none of the benchmark PDEs need them).
struct DirSpec {
    int dim = 0;
    int order = 1; // 1 or 2
};

struct Layer {
    Tensor W; // [fan_in, fan_out], z = h*W + b
    Tensor b; // [fan_out]
};

struct NetworkParams {
    NetworkConfig config;
    std::vector<Layer> layers;   // hidden layers then the output layer
    std::vector<Layer> encoders; // ModifiedMlp only: U, V
};

/// Total number of trainable scalars for a configuration.
long param_count(const NetworkConfig& cfg);

/// Xavier-normal weights (sigma = sqrt(2/(fan_in+fan_out))), zero biases.
/// Identical seeds give identical parameters on every platform.
NetworkParams init_network(const NetworkConfig& cfg, std::uint64_t seed);

/// Name/shape/offset of each parameter tensor in the flat layout.
struct ParamView {
    std::string name;
    std::vector<std::int64_t> shape;
    std::size_t offset = 0;
    std::size_t count = 0;
};
std::vector<ParamView> param_layout(const NetworkConfig& cfg);

void flatten_params(const NetworkParams& p, double* out);
void unflatten_params(NetworkParams& p, const double* in);

/// Maps each input column affinely onto [-1,1]; exact at both endpoints.
Tensor normalize_inputs(const Tensor& X, const Domain& d);

/// Handles returned by a taped forward build.
struct TapedForward {
    ValueId u = -1;              // [N, output_dim]
    std::vector<ValueId> d1;     // per requested direction
    std::vector<ValueId> d2;     // valid only where dirs[i].order == 2
};

/// Records network forward passes (with input-derivative channels) onto a
/// tape. Parameter leaves are registered once in the constructor and shared
/// by all subsequent run() calls, so gradients accumulate across the
/// interior / initial / boundary batches of a composite loss.
class TapedNet {
public:
    TapedNet(Tape& tape, const NetworkParams& params);

    TapedForward run(const Tensor& X, const Domain& domain,
                     std::span<const DirSpec> dirs);

    /// Parameter leaf ids in flat layout order (W,b per layer, then encoders).
    std::span<const ValueId> param_ids() const { return param_ids_; }

private:
    Tape* tape_;
    const NetworkParams* params_;
    std::vector<ValueId> param_ids_;
};

/// Untaped inference; bit-identical to the taped value channel.
Tensor eval_forward(const NetworkParams& params, const Tensor& X,
                    const Domain& domain);

} // namespace pinnlab
