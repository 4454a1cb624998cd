#include "sfegacn/nn.hpp"

#include "sfegacn/error.hpp"
#include "sfegacn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfegacn {

namespace {

constexpr double kLogFloor = 1e-12;

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void apply_activation(Matrix& m, Activation act) {
    switch (act) {
    case Activation::Linear:
        return;
    case Activation::Sigmoid:
        for (double& v : m.data()) v = sigmoid(v);
        return;
    case Activation::Relu:
        for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
        return;
    case Activation::Softmax:
        for (std::size_t r = 0; r < m.rows(); ++r) {
            auto row = m.row(r);
            double hi = *std::max_element(row.begin(), row.end());
            double sum = 0.0;
            for (double& v : row) {
                v = std::exp(v - hi);
                sum += v;
            }
            for (double& v : row) v /= sum;
        }
        return;
    }
}

} // namespace

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
    case Activation::Softmax: return "softmax";
    }
    return "linear";
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "relu") return Activation::Relu;
    if (name == "softmax") return Activation::Softmax;
    throw ConfigError("unknown activation: " + name);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (epochs == 0) throw ConfigError("epochs must be positive");
}

DenseNet::DenseNet(std::vector<std::size_t> layer_dims, std::vector<Activation> activations,
                   std::uint64_t seed)
    : layer_dims_(std::move(layer_dims)), activations_(std::move(activations)), seed_(seed) {
    if (layer_dims_.size() < 2) throw ConfigError("DenseNet needs at least input and output widths");
    for (std::size_t d : layer_dims_)
        if (d == 0) throw ConfigError("DenseNet layer widths must be positive");
    if (activations_.size() != layer_dims_.size() - 1)
        throw ConfigError("DenseNet needs one activation per layer");
    for (std::size_t l = 0; l + 1 < activations_.size(); ++l)
        if (activations_[l] == Activation::Softmax)
            throw ConfigError("softmax is only supported on the output layer");

    RngStream rng(seed);
    weights_.reserve(activations_.size());
    biases_.reserve(activations_.size());
    for (std::size_t l = 0; l < activations_.size(); ++l) {
        const std::size_t fan_in = layer_dims_[l];
        const std::size_t fan_out = layer_dims_[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_in, fan_out);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        weights_.push_back(std::move(w));
        biases_.emplace_back(fan_out, 0.0);
    }
}

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l)
        n += layer_dims_[l] * layer_dims_[l + 1] + layer_dims_[l + 1];
    return n;
}

Matrix DenseNet::forward(const Matrix& batch) const {
    return forward_trace(*this, batch).layers.back();
}

ForwardTrace forward_trace(const DenseNet& net, const Matrix& batch) {
    if (batch.cols() != net.input_dim())
        throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                         " columns, layer 0 expects " + std::to_string(net.input_dim()));
    ForwardTrace trace;
    trace.layers.reserve(net.layer_count() + 1);
    trace.layers.push_back(batch);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        Matrix z = matmul(trace.layers.back(), net.weights(l));
        add_row_vector(z, net.bias(l));
        apply_activation(z, net.activations()[l]);
        trace.layers.push_back(std::move(z));
    }
    return trace;
}

Gradients backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& grad_last_preact) {
    const std::size_t layers = net.layer_count();
    if (trace.layers.size() != layers + 1) throw ShapeError("backward: trace does not match net");
    if (grad_last_preact.rows() != trace.output().rows() ||
        grad_last_preact.cols() != trace.output().cols())
        throw ShapeError("backward: gradient shape does not match net output");

    Gradients grads;
    grads.weight_grads.resize(layers);
    grads.bias_grads.resize(layers);

    Matrix delta = grad_last_preact; // dLoss/d(pre-activation of current layer)
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& input = trace.layers[l];
        grads.weight_grads[l] = matmul_at_b(input, delta);
        grads.bias_grads[l] = column_sums(delta);
        if (l == 0) {
            grads.input_grad = matmul_a_bt(delta, net.weights(0));
            break;
        }
        Matrix upstream = matmul_a_bt(delta, net.weights(l));
        // Fold in the previous layer's activation derivative to get its
        // pre-activation gradient.
        const Matrix& act = trace.layers[l];
        switch (net.activations()[l - 1]) {
        case Activation::Linear:
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < upstream.data().size(); ++i) {
                const double a = act.data()[i];
                upstream.data()[i] *= a * (1.0 - a);
            }
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < upstream.data().size(); ++i)
                if (act.data()[i] <= 0.0) upstream.data()[i] = 0.0;
            break;
        case Activation::Softmax:
            throw ConfigError("softmax is only supported on the output layer");
        }
        delta = std::move(upstream);
    }
    return grads;
}

void apply_sgd(DenseNet& net, const Gradients& grads, double lr) {
    if (lr == 0.0) return;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        auto& w = net.weights(l).data();
        const auto& gw = grads.weight_grads[l].data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
        auto& b = net.bias(l);
        const auto& gb = grads.bias_grads[l];
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
    }
}

double bce_loss(const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw ShapeError("bce_loss: prediction/target shapes differ");
    double sum = 0.0;
    const auto& p = predictions.data();
    const auto& y = targets.data();
    for (std::size_t i = 0; i < p.size(); ++i)
        sum -= y[i] * std::log(std::max(p[i], kLogFloor)) +
               (1.0 - y[i]) * std::log(std::max(1.0 - p[i], kLogFloor));
    return sum / static_cast<double>(p.size());
}

double cross_entropy_loss(const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw ShapeError("cross_entropy_loss: prediction/target shapes differ");
    double sum = 0.0;
    for (std::size_t r = 0; r < predictions.rows(); ++r)
        for (std::size_t c = 0; c < predictions.cols(); ++c)
            sum -= targets(r, c) * std::log(std::max(predictions(r, c), kLogFloor));
    return sum / static_cast<double>(predictions.rows());
}

double sgd_step(DenseNet& net, const Matrix& batch, const Matrix& targets, double lr) {
    if (targets.rows() != batch.rows() || targets.cols() != net.output_dim())
        throw ShapeError("sgd_step: target shape does not match net output");
    const bool softmax = net.activations().back() == Activation::Softmax;
    if (!softmax) {
        for (double y : targets.data())
            if (!(y >= 0.0 && y <= 1.0)) throw ConfigError("sgd_step: BCE targets must lie in [0,1]");
    }

    ForwardTrace trace = forward_trace(net, batch);
    const Matrix& p = trace.output();
    const double loss = softmax ? cross_entropy_loss(p, targets) : bce_loss(p, targets);
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss");

    // dLoss/d(last pre-activation) is (p - y)/R for softmax+CE and
    // (p - y)/(R*C) for sigmoid+BCE.
    const double scale = softmax ? 1.0 / static_cast<double>(p.rows())
                                 : 1.0 / static_cast<double>(p.rows() * p.cols());
    Matrix grad(p.rows(), p.cols());
    for (std::size_t i = 0; i < grad.data().size(); ++i)
        grad.data()[i] = (p.data()[i] - targets.data()[i]) * scale;

    apply_sgd(net, backward(net, trace, grad), lr);
    return loss;
}

ParamSnapshot snapshot(const DenseNet& net) {
    ParamSnapshot snap;
    snap.layer_dims = net.layer_dims();
    snap.values.reserve(net.parameter_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& w = net.weights(l).data();
        snap.values.insert(snap.values.end(), w.begin(), w.end());
        const auto& b = net.bias(l);
        snap.values.insert(snap.values.end(), b.begin(), b.end());
    }
    return snap;
}

void restore(DenseNet& net, const ParamSnapshot& snap) {
    if (snap.layer_dims != net.layer_dims())
        throw ShapeError("restore: snapshot dims do not match net");
    if (snap.values.size() != net.parameter_count())
        throw ShapeError("restore: snapshot length does not match parameter count");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        auto& w = net.weights(l).data();
        std::copy_n(snap.values.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
        pos += w.size();
        auto& b = net.bias(l);
        std::copy_n(snap.values.begin() + static_cast<std::ptrdiff_t>(pos), b.size(), b.begin());
        pos += b.size();
    }
}

ParamSnapshot interpolate_params(const ParamSnapshot& snap_back, const ParamSnapshot& snap_now,
                                 double c_r) {
    if (!(c_r >= 0.0 && c_r <= 1.0)) throw ConfigError("rollback coefficient must lie in [0,1]");
    if (snap_back.layer_dims != snap_now.layer_dims ||
        snap_back.values.size() != snap_now.values.size())
        throw ShapeError("interpolate_params: snapshot shapes differ");
    ParamSnapshot out;
    out.layer_dims = snap_back.layer_dims;
    out.values.resize(snap_back.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = snap_back.values[i] + c_r * (snap_now.values[i] - snap_back.values[i]);
    return out;
}

} // namespace sfegacn
