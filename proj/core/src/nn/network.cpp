#include "invrep/nn/network.hpp"

#include "invrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace invrep {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "linear") return Activation::linear;
  if (name == "softmax") return Activation::softmax;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

bool DenseLayer::operator==(const DenseLayer& other) const {
  if (activation != other.activation) return false;
  if (weights.rows() != other.weights.rows() || weights.cols() != other.weights.cols()) {
    return false;
  }
  if (bias.size() != other.bias.size()) return false;
  return weights == other.weights && bias == other.bias;
}

void validate_layers(std::span<const DenseLayer> layers) {
  if (layers.empty()) throw ConfigError("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& l = layers[i];
    const std::string where = "layer " + std::to_string(i);
    if (l.in_width() < 1 || l.out_width() < 1) {
      throw ConfigError(where + ": widths must be >= 1");
    }
    if (l.bias.size() != l.out_width()) {
      throw ConfigError(where + ": bias size " + std::to_string(l.bias.size()) +
                        " does not match output width " + std::to_string(l.out_width()));
    }
    if (i > 0 && layers[i - 1].out_width() != l.in_width()) {
      throw ConfigError(where + ": input width " + std::to_string(l.in_width()) +
                        " does not chain with previous output width " +
                        std::to_string(layers[i - 1].out_width()));
    }
    if (l.activation == Activation::softmax && i + 1 != layers.size()) {
      throw ConfigError(where + ": softmax is only allowed on the output layer");
    }
  }
}

Network::Network(std::vector<DenseLayer> layers, std::size_t representation_index)
    : layers_(std::move(layers)), representation_index_(representation_index) {
  validate_layers(layers_);
  if (layers_.size() < 2) {
    throw ConfigError("network needs a representation layer below the output layer");
  }
  if (representation_index_ >= layers_.size() - 1) {
    throw ConfigError("representation index " + std::to_string(representation_index_) +
                      " must be below the output layer " +
                      std::to_string(layers_.size() - 1));
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Network init_network(const ArchitectureSpec& spec, std::uint64_t seed) {
  if (spec.input_width < 1) throw ConfigError("input width must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  layers.reserve(spec.layers.size());
  std::size_t in = spec.input_width;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& ls = spec.layers[i];
    if (ls.width < 1) {
      throw ConfigError("layer " + std::to_string(i) + ": width must be >= 1");
    }
    // He: var = 2 / in. Glorot: var = 2 / (in + out).
    const double stddev = ls.activation == Activation::relu
                              ? std::sqrt(2.0 / static_cast<double>(in))
                              : std::sqrt(2.0 / static_cast<double>(in + ls.width));
    std::normal_distribution<double> dist(0.0, stddev);
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(ls.width));
    for (Eigen::Index k = 0; k < layer.weights.size(); ++k) layer.weights.data()[k] = dist(rng);
    layer.bias = RowVector::Zero(static_cast<Eigen::Index>(ls.width));
    layer.activation = ls.activation;
    layers.push_back(std::move(layer));
    in = ls.width;
  }
  return Network(std::move(layers), spec.representation_index);
}

namespace {

void apply_activation(Activation a, const Tensor2& z, Tensor2& out) {
  switch (a) {
    case Activation::relu:
      out = z.cwiseMax(0.0);
      return;
    case Activation::sigmoid:
      out = (1.0 + (-z.array()).exp()).inverse().matrix();
      return;
    case Activation::linear:
      out = z;
      return;
    case Activation::softmax: {
      out.resize(z.rows(), z.cols());
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double m = z.row(r).maxCoeff();
        out.row(r) = (z.row(r).array() - m).exp().matrix();
        out.row(r) /= out.row(r).sum();
      }
      return;
    }
  }
}

// Multiplies `upstream` (gradient w.r.t. the activation output) in place by
// the activation derivative. Softmax is fused with cross-entropy, so the
// gradient already refers to the logits and passes through unchanged.
void activation_backward(Activation a, const Tensor2& z, const Tensor2& out,
                         Tensor2& upstream) {
  switch (a) {
    case Activation::relu:
      upstream = (z.array() > 0.0).select(upstream, 0.0);
      return;
    case Activation::sigmoid:
      upstream.array() *= out.array() * (1.0 - out.array());
      return;
    case Activation::linear:
    case Activation::softmax:
      return;
  }
}

void check_batch(std::span<const DenseLayer> layers, const Tensor2& batch) {
  if (batch.cols() != layers.front().in_width()) {
    throw ConfigError("layer 0: batch width " + std::to_string(batch.cols()) +
                      " does not match input width " +
                      std::to_string(layers.front().in_width()));
  }
}

// Walks from layer `top` down to layer 0. `upstream` is the gradient w.r.t.
// the output of `top`; `inject` (if non-empty) is added to the gradient
// arriving at the output of layer `inject_index`.
GradientSet backprop(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                     std::size_t top, Tensor2 upstream, std::size_t inject_index,
                     const Tensor2* inject) {
  GradientSet g = GradientSet::zeros_like(layers);
  for (std::size_t i = top + 1; i-- > 0;) {
    if (inject != nullptr && i == inject_index) {
      if (inject->rows() != upstream.rows() || inject->cols() != upstream.cols()) {
        throw ConfigError("layer " + std::to_string(i) + ": injected gradient shape " +
                          std::to_string(inject->rows()) + "x" +
                          std::to_string(inject->cols()) + " does not match activation " +
                          std::to_string(upstream.rows()) + "x" +
                          std::to_string(upstream.cols()));
      }
      upstream += *inject;
    }
    activation_backward(layers[i].activation, trace.pre_activations[i], trace.activations[i],
                        upstream);
    const Tensor2& below = i == 0 ? trace.input : trace.activations[i - 1];
    g.weights[i].noalias() = below.transpose() * upstream;
    g.biases[i] = upstream.colwise().sum();
    if (i > 0) {
      Tensor2 next;
      next.noalias() = upstream * layers[i].weights.transpose();
      upstream = std::move(next);
    }
  }
  return g;
}

void check_trace(const ForwardTrace& trace, std::size_t top) {
  if (trace.activations.size() <= top || trace.pre_activations.size() <= top) {
    throw ConfigError("layer " + std::to_string(top) +
                      ": trace does not cover this layer");
  }
}

void check_grad_shape(const Tensor2& grad, const Tensor2& act, std::size_t layer) {
  if (grad.rows() != act.rows() || grad.cols() != act.cols()) {
    throw ConfigError("layer " + std::to_string(layer) + ": gradient shape " +
                      std::to_string(grad.rows()) + "x" + std::to_string(grad.cols()) +
                      " does not match activation " + std::to_string(act.rows()) + "x" +
                      std::to_string(act.cols()));
  }
}

}  // namespace

ForwardTrace forward(std::span<const DenseLayer> layers, const Tensor2& batch,
                     std::size_t last) {
  check_batch(layers, batch);
  const std::size_t n = last == kAllLayers ? layers.size() : last + 1;
  ForwardTrace trace;
  trace.input = batch;
  trace.pre_activations.resize(n);
  trace.activations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor2& in = i == 0 ? trace.input : trace.activations[i - 1];
    Tensor2& z = trace.pre_activations[i];
    z.noalias() = in * layers[i].weights;
    z.rowwise() += layers[i].bias;
    apply_activation(layers[i].activation, z, trace.activations[i]);
  }
  return trace;
}

ForwardTrace forward(const Network& net, const Tensor2& batch) {
  return forward(net.layers(), batch);
}

Tensor2 representation(const Network& net, const Tensor2& batch) {
  return forward_chunked(net.layers(), batch, net.representation_index());
}

Tensor2 predict_output(const Network& net, const Tensor2& batch) {
  return forward_chunked(net.layers(), batch, net.output_index());
}

Tensor2 forward_chunked(std::span<const DenseLayer> layers, const Tensor2& batch,
                        std::size_t last, Eigen::Index chunk_rows) {
  check_batch(layers, batch);
  Tensor2 out(batch.rows(), layers[last].out_width());
  for (Eigen::Index start = 0; start < batch.rows(); start += chunk_rows) {
    const Eigen::Index rows = std::min(chunk_rows, batch.rows() - start);
    Tensor2 a = batch.middleRows(start, rows);
    for (std::size_t i = 0; i <= last; ++i) {
      Tensor2 z;
      z.noalias() = a * layers[i].weights;
      z.rowwise() += layers[i].bias;
      apply_activation(layers[i].activation, z, a);
    }
    out.middleRows(start, rows) = a;
  }
  return out;
}

GradientSet GradientSet::zeros_like(std::span<const DenseLayer> layers) {
  GradientSet g;
  g.weights.reserve(layers.size());
  g.biases.reserve(layers.size());
  for (const auto& l : layers) {
    g.weights.push_back(Tensor2::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(RowVector::Zero(l.bias.size()));
  }
  return g;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (other.weights.size() != weights.size()) {
    throw ConfigError("gradient sets have different layer counts");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += other.weights[i];
    biases[i] += other.biases[i];
  }
  return *this;
}

GradientSet& GradientSet::operator*=(double scale) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= scale;
    biases[i] *= scale;
  }
  return *this;
}

bool GradientSet::all_finite() const {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!invrep::all_finite(weights[i]) || !invrep::all_finite(biases[i])) return false;
  }
  return true;
}

bool GradientSet::is_zero() const {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!weights[i].isZero(0.0) || !biases[i].isZero(0.0)) return false;
  }
  return true;
}

std::vector<double> GradientSet::flatten() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.insert(out.end(), weights[i].data(), weights[i].data() + weights[i].size());
    out.insert(out.end(), biases[i].data(), biases[i].data() + biases[i].size());
  }
  return out;
}

GradientSet backward(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                     const Tensor2& grad_at_output) {
  const std::size_t top = layers.size() - 1;
  check_trace(trace, top);
  check_grad_shape(grad_at_output, trace.activations[top], top);
  return backprop(layers, trace, top, grad_at_output, 0, nullptr);
}

GradientSet backward(const Network& net, const ForwardTrace& trace,
                     const Tensor2& grad_at_output) {
  return backward(net.layers(), trace, grad_at_output);
}

GradientSet backward_from_representation(const Network& net, const ForwardTrace& trace,
                                         const Tensor2& grad_at_representation) {
  const std::size_t rep = net.representation_index();
  check_trace(trace, rep);
  check_grad_shape(grad_at_representation, trace.activations[rep], rep);
  return backprop(net.layers(), trace, rep, grad_at_representation, 0, nullptr);
}

GradientSet backward_combined(const Network& net, const ForwardTrace& trace,
                              const Tensor2& grad_at_output,
                              const Tensor2& grad_at_representation) {
  const std::size_t top = net.output_index();
  const std::size_t rep = net.representation_index();
  check_trace(trace, top);
  check_grad_shape(grad_at_output, trace.activations[top], top);
  check_grad_shape(grad_at_representation, trace.activations[rep], rep);
  return backprop(net.layers(), trace, top, grad_at_output, rep, &grad_at_representation);
}

}  // namespace invrep
