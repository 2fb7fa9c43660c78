#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cte/core_types.hpp"

namespace cte {

struct LIFParams {
    float v_th = 1.0f;
    float decay = 0.5f;
};

// Triangular pseudo-derivative of the spike indicator, width 2 around v_th.
float surrogate_gradient(float v, const LIFParams& params);

// Spike nonlinearity. Hard: Heaviside forward (spike when v >= v_th),
// surrogate backward. Soft: the piecewise-quadratic antiderivative of the
// surrogate, making the whole network differentiable so analytic gradients
// can be checked against finite differences.
enum class SpikeMode { Hard, Soft };

float spike_activation(float v, const LIFParams& params, SpikeMode mode);

// Membrane state of one LIF layer. Spikes are kept as floats so the soft
// mode can flow through the same update.
struct LifState {
    std::vector<float> v;
    std::vector<float> s;

    explicit LifState(std::size_t n) : v(n, 0.0f), s(n, 0.0f) {}
};

// v <- decay * v_prev * (1 - s_prev) + input;  s = spike(v).
// Hard reset: a spiking unit carries no potential into the next step.
void lif_step(LifState& state, std::span<const float> input, const LIFParams& params,
              SpikeMode mode = SpikeMode::Hard);

struct NetworkShape {
    int in_channels = 1;
    int height = 28;
    int width = 28;
    int conv_channels = 32;
    int hidden = 128;
    int classes = 10;

    int conv_units() const { return conv_channels * height * width; }
};

// Conv 3x3 pad 1 -> LIF -> FC hidden -> LIF -> FC classes.
// fc weights are stored input-major ([in][out]) so spike-sparse forward
// passes touch contiguous rows.
struct NetworkParams {
    NetworkShape shape;
    std::vector<float> conv_w;  // [conv_ch][in_ch][3][3]
    std::vector<float> conv_b;  // [conv_ch]
    std::vector<float> fc1_w;   // [conv_units][hidden]
    std::vector<float> fc1_b;   // [hidden]
    std::vector<float> fc2_w;   // [hidden][classes]
    std::vector<float> fc2_b;   // [classes]

    static NetworkParams init(const NetworkShape& shape, std::uint64_t seed);
    std::size_t parameter_count() const;
};

// Class scores: sum of the output affine layer over all T steps (the output
// layer has no LIF, so gradients reach every class every step).
std::vector<float> forward(const SpikeTensor& spikes, const NetworkParams& params,
                           const LIFParams& lif, SpikeMode mode = SpikeMode::Hard);

struct Gradients {
    std::vector<float> conv_w, conv_b, fc1_w, fc1_b, fc2_w, fc2_b;

    explicit Gradients(const NetworkShape& shape);
    void zero();
    void add_scaled(const Gradients& other, float scale);
};

struct BackwardResult {
    float loss = 0.0f;         // cross-entropy
    int predicted = 0;         // argmax of scores
};

// Forward + backward-through-time for one sample; accumulates into grads.
BackwardResult backward(const SpikeTensor& spikes, int label, const NetworkParams& params,
                        const LIFParams& lif, SpikeMode mode, Gradients& grads);

struct TrainConfig {
    float lr = 0.0015f;
    float weight_decay = 5e-5f;
    int batch_size = 128;
    int epochs = 16;
    std::uint64_t seed = 0;
    LIFParams lif;
};

// Decoupled weight decay: w -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * w).
struct AdamW {
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
    std::int64_t steps = 0;
    Gradients m, v;

    explicit AdamW(const NetworkShape& shape) : m(shape), v(shape) {}
    void step(NetworkParams& params, const Gradients& grads, float lr, float weight_decay);
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct TrainResult {
    NetworkParams params;
    std::vector<EpochMetrics> metrics;
};

// Deterministic given cfg.seed. Throws DivergenceError (with lr / batch /
// grad-norm diagnostics) when the loss goes non-finite.
TrainResult train(std::span<const SpikeTensor> train_x, std::span<const std::uint8_t> train_y,
                  std::span<const SpikeTensor> val_x, std::span<const std::uint8_t> val_y,
                  const NetworkShape& shape, const TrainConfig& cfg);

struct EvalResult {
    double accuracy = 0.0;
    double mean_spikes = 0.0;  // of the evaluated inputs
};

EvalResult evaluate(const NetworkParams& params, std::span<const SpikeTensor> x,
                    std::span<const std::uint8_t> y, const LIFParams& lif);

// Double-precision twin of the network used by the gradient checker: the
// same composite with surrogate derivatives substituted, on a flat
// parameter vector (conv_w | conv_b | fc1_w | fc1_b | fc2_w | fc2_b).
std::size_t flat_param_count(const NetworkShape& shape);
double loss_f64(const SpikeTensor& spikes, int label, std::span<const double> flat,
                const NetworkShape& shape, const LIFParams& lif, SpikeMode mode);
std::vector<double> gradient_f64(const SpikeTensor& spikes, int label,
                                 std::span<const double> flat, const NetworkShape& shape,
                                 const LIFParams& lif, SpikeMode mode);
std::vector<double> flatten_params(const NetworkParams& params);

// Checkpoint blob: "CTN1", LE u32 version, LE u32 shape fields, LE f32
// LIF params, then the six parameter blobs as LE f32 in declaration order.
std::vector<std::uint8_t> write_checkpoint(const NetworkParams& params, const LIFParams& lif);
struct Checkpoint {
    NetworkParams params;
    LIFParams lif;
};
Checkpoint read_checkpoint(std::span<const std::uint8_t> bytes);

}  // namespace cte
