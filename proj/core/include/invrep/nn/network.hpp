#ifndef INVREP_NN_NETWORK_HPP
#define INVREP_NN_NETWORK_HPP

#include "invrep/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace invrep {

enum class Activation { relu, sigmoid, linear, softmax };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected layer computing `activation(x * weights + bias)`.
struct DenseLayer {
  Tensor2 weights;  // in_width x out_width
  RowVector bias;   // out_width
  Activation activation = Activation::linear;

  Eigen::Index in_width() const { return weights.rows(); }
  Eigen::Index out_width() const { return weights.cols(); }

  bool operator==(const DenseLayer& other) const;
};

/// Checks that bias sizes match, widths chain and softmax appears only on
/// the last layer. Throws ConfigError naming the offending layer.
void validate_layers(std::span<const DenseLayer> layers);

/// A feed-forward stack with one designated representation layer g(x).
///
/// The representation layer is any layer strictly below the output layer;
/// the affinity regularizer attaches to its post-activation output.
class Network {
 public:
  Network(std::vector<DenseLayer> layers, std::size_t representation_index);

  std::span<const DenseLayer> layers() const { return layers_; }
  /// Mutable access for optimizers. Callers must preserve every shape.
  std::span<DenseLayer> mutable_layers() { return layers_; }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }

  std::size_t num_layers() const { return layers_.size(); }
  std::size_t representation_index() const { return representation_index_; }
  std::size_t output_index() const { return layers_.size() - 1; }
  Eigen::Index input_width() const { return layers_.front().in_width(); }
  Eigen::Index output_width() const { return layers_.back().out_width(); }
  Eigen::Index representation_width() const {
    return layers_[representation_index_].out_width();
  }
  std::size_t parameter_count() const;

  /// Bitwise equality of every weight, bias, activation and the index.
  bool operator==(const Network& other) const = default;

 private:
  std::vector<DenseLayer> layers_;
  std::size_t representation_index_;
};

struct LayerSpec {
  std::size_t width = 0;
  Activation activation = Activation::relu;
};

struct ArchitectureSpec {
  std::size_t input_width = 0;
  std::vector<LayerSpec> layers;
  std::size_t representation_index = 0;
};

/// Builds a network with seeded random weights and zero biases.
///
/// Relu layers use He scaling (std = sqrt(2 / in)); every other activation
/// uses Glorot scaling (std = sqrt(2 / (in + out))).
Network init_network(const ArchitectureSpec& spec, std::uint64_t seed);

/// Every intermediate of one forward pass.
struct ForwardTrace {
  Tensor2 input;
  std::vector<Tensor2> pre_activations;
  std::vector<Tensor2> activations;

  const Tensor2& output() const { return activations.back(); }
  const Tensor2& logits() const { return pre_activations.back(); }
};

inline constexpr std::size_t kAllLayers = std::numeric_limits<std::size_t>::max();

/// Runs `batch` through `layers[0..last]` (all layers by default).
ForwardTrace forward(std::span<const DenseLayer> layers, const Tensor2& batch,
                     std::size_t last = kAllLayers);
ForwardTrace forward(const Network& net, const Tensor2& batch);

/// Output of layers[0..last] without keeping intermediates, evaluated in
/// row blocks of `chunk_rows` to bound memory on whole datasets.
Tensor2 forward_chunked(std::span<const DenseLayer> layers, const Tensor2& batch,
                        std::size_t last, Eigen::Index chunk_rows = 2048);

/// Output of the representation layer only; skips the layers above it.
Tensor2 representation(const Network& net, const Tensor2& batch);

/// Network output (probabilities for a softmax head) for any number of rows.
Tensor2 predict_output(const Network& net, const Tensor2& batch);

/// Per-layer parameter gradients, shaped like the layers they belong to.
struct GradientSet {
  std::vector<Tensor2> weights;
  std::vector<RowVector> biases;

  static GradientSet zeros_like(std::span<const DenseLayer> layers);

  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double scale);

  bool all_finite() const;
  bool is_zero() const;
  /// Flattened view in layer order (weights then bias per layer). Tests only
  /// need this, so it copies.
  std::vector<double> flatten() const;
};

/// Reverse-mode gradients for a loss whose gradient w.r.t. the network output
/// is `grad_at_output`.
///
/// For a softmax output layer the gradient is taken w.r.t. the logits (the
/// fused softmax-cross-entropy convention of cross_entropy_loss); for any
/// other output activation it is w.r.t. the post-activation output.
GradientSet backward(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                     const Tensor2& grad_at_output);
GradientSet backward(const Network& net, const ForwardTrace& trace,
                     const Tensor2& grad_at_output);

/// Gradients of a scalar whose gradient w.r.t. g(x) is `grad_at_representation`.
/// Layers above the representation layer receive exactly zero.
GradientSet backward_from_representation(const Network& net, const ForwardTrace& trace,
                                         const Tensor2& grad_at_representation);

/// Single pass computing backward(grad_at_output) +
/// backward_from_representation(grad_at_representation).
GradientSet backward_combined(const Network& net, const ForwardTrace& trace,
                              const Tensor2& grad_at_output,
                              const Tensor2& grad_at_representation);

}  // namespace invrep

#endif  // INVREP_NN_NETWORK_HPP
