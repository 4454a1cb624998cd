#pragma once

#include "sfegacn/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sfegacn {

enum class Activation { Linear, Sigmoid, Relu, Softmax };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct TrainConfig {
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t epochs = 50;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError on non-positive fields
};

/// Fully connected net. Layer l maps width dims[l] to dims[l+1] through
/// weights[l] (dims[l] x dims[l+1]), bias[l] and activations[l].
///
/// Construction is deterministic: weights are drawn uniformly from
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)] off a stream seeded with `seed`
/// (layer by layer, row-major, weights before biases); biases start at zero.
/// Softmax is only accepted as the last activation.
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(std::vector<std::size_t> layer_dims, std::vector<Activation> activations,
             std::uint64_t seed);

    const std::vector<std::size_t>& layer_dims() const { return layer_dims_; }
    const std::vector<Activation>& activations() const { return activations_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t layer_count() const { return activations_.size(); }
    std::size_t input_dim() const { return layer_dims_.front(); }
    std::size_t output_dim() const { return layer_dims_.back(); }

    Matrix& weights(std::size_t layer) { return weights_[layer]; }
    const Matrix& weights(std::size_t layer) const { return weights_[layer]; }
    std::vector<double>& bias(std::size_t layer) { return biases_[layer]; }
    const std::vector<double>& bias(std::size_t layer) const { return biases_[layer]; }

    /// Total number of scalar parameters (weights plus biases).
    std::size_t parameter_count() const;

    /// Batch forward pass; batch is rows x input_dim.
    Matrix forward(const Matrix& batch) const;

    bool operator==(const DenseNet& other) const = default;

private:
    std::vector<std::size_t> layer_dims_;
    std::vector<Activation> activations_;
    std::vector<Matrix> weights_;
    std::vector<std::vector<double>> biases_;
    std::uint64_t seed_ = 0;
};

/// Per-layer post-activation values kept for backprop.
/// layers[0] is the input batch, layers[l+1] the output of layer l.
struct ForwardTrace {
    std::vector<Matrix> layers;
    const Matrix& output() const { return layers.back(); }
};

struct Gradients {
    std::vector<Matrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
    Matrix input_grad;
};

ForwardTrace forward_trace(const DenseNet& net, const Matrix& batch);

/// Analytic backprop. `grad_last_preact` is dLoss/d(final pre-activation),
/// which stays numerically benign for both sigmoid+BCE and softmax+CE
/// ((p - y) scaled by the loss normalization). Hidden activation derivatives
/// are applied internally; input_grad lets callers chain nets (the GACN
/// generator trains through the adversarial discriminator this way).
Gradients backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& grad_last_preact);

/// params -= lr * grads (biases included).
void apply_sgd(DenseNet& net, const Gradients& grads, double lr);

/// Mean binary cross-entropy over all entries; zero iff predictions equal
/// binary targets exactly.
double bce_loss(const Matrix& predictions, const Matrix& targets);

/// Mean categorical cross-entropy over rows (targets one-hot or soft).
double cross_entropy_loss(const Matrix& predictions, const Matrix& targets);

/// One SGD step on a batch. The loss is chosen by the output activation:
/// softmax trains with categorical cross-entropy, anything else with BCE
/// (targets must lie in [0,1]). Returns the mean loss measured before the
/// update. lr = 0 evaluates the loss without touching parameters.
/// Throws NumericError when the loss is not finite.
double sgd_step(DenseNet& net, const Matrix& batch, const Matrix& targets, double lr);

/// Flat copy of every parameter, with the source dims for shape validation.
struct ParamSnapshot {
    std::vector<std::size_t> layer_dims;
    std::vector<double> values;

    bool operator==(const ParamSnapshot& other) const = default;
};

ParamSnapshot snapshot(const DenseNet& net);

/// Writes snap back into net. Throws ShapeError if shapes differ.
void restore(DenseNet& net, const ParamSnapshot& snap);

/// Elementwise snap_back + c_r * (snap_now - snap_back); the generator
/// rollback rule. c_r must lie in [0,1].
ParamSnapshot interpolate_params(const ParamSnapshot& snap_back, const ParamSnapshot& snap_now,
                                 double c_r);

} // namespace sfegacn
