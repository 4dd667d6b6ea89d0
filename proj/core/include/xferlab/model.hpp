#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xferlab/tensor.hpp"

namespace xferlab::nn {

enum class LayerKind { Dense, Conv2d, Relu, MaxPool2, Flatten, ResidualAdd };

enum class Padding { Same, Valid };

struct Layer {
  LayerKind kind;
  // dense
  size_t in = 0, out = 0;
  // conv2d (stride 1, square kernel)
  size_t in_ch = 0, out_ch = 0, ksize = 3;
  Padding padding = Padding::Same;
  // residual-add: index of the earlier layer whose output is added
  size_t source = 0;
  Tensor weight, bias;
  std::vector<size_t> out_shape;

  bool has_params() const {
    return kind == LayerKind::Dense || kind == LayerKind::Conv2d;
  }
};

/// Layered feed-forward model. Layers form a chain; residual-add layers
/// additionally consume the output of an earlier layer. Named taps mark
/// intermediate outputs whose flattened values define feature spaces.
struct Model {
  std::string arch_id;
  std::vector<size_t> input_shape;
  size_t classes = 0;
  std::vector<Layer> layers;
  std::map<std::string, size_t> taps;  // tap name -> layer index

  size_t add_dense(size_t out);
  size_t add_conv2d(size_t out_ch, size_t ksize = 3, Padding padding = Padding::Same);
  size_t add_relu();
  size_t add_maxpool2();
  size_t add_flatten();
  size_t add_residual_add(size_t source_layer);
  void set_tap(const std::string& name, size_t layer_index);

  /// Output shape of the given layer (input shape for index == -1).
  const std::vector<size_t>& layer_out_shape(size_t i) const {
    return layers[i].out_shape;
  }

  size_t tap_index(const std::string& name) const;
  size_t tap_dim(const std::string& name) const;
  std::vector<std::string> tap_names() const;

  /// Validates the final layer width and records the class count.
  void finalize(size_t n_classes);

 private:
  std::vector<size_t> current_shape() const {
    return layers.empty() ? input_shape : layers.back().out_shape;
  }
};

Model make_model(const std::string& arch_id, std::vector<size_t> input_shape,
                 size_t classes);
std::vector<std::string> known_archs();

/// Uniform init in [-s, s], s = sqrt(6 / (fan_in + fan_out)); biases zero.
void init_weights(Model& m, uint64_t seed);

/// Per-layer activations recorded during a forward pass (acts[0] is the
/// input, acts[i+1] the output of layer i). Pool argmax indices are kept
/// for the backward pass; first maximum wins on ties.
struct ForwardTrace {
  std::vector<Tensor> acts;
  std::vector<std::vector<uint32_t>> pool_argmax;
};

Tensor forward(const Model& m, const Tensor& x, ForwardTrace* trace = nullptr);

/// Logits plus the flattened output of the named tap layer.
std::pair<Tensor, Tensor> forward_with_tap(const Model& m, const Tensor& x,
                                           const std::string& tap);

/// Numerically stabilized -log softmax(logits)[y], in nats.
double cross_entropy(const Tensor& logits, size_t y);

/// d cross_entropy / d logits = softmax(logits) - onehot(y).
Tensor cross_entropy_grad(const Tensor& logits, size_t y);

/// Gradient of the cross-entropy loss with respect to the input.
Tensor grad_input_loss(const Model& m, const Tensor& x, size_t y);

/// Gradient of (g(x) - h0)^T w with respect to x, where g is the flattened
/// tap feature; h0 enters the objective as a constant.
Tensor grad_input_projection(const Model& m, const Tensor& x,
                             const std::string& tap, const Tensor& w,
                             const Tensor& h0);

/// One forward + one backward, returning everything a baseline attack step
/// needs: the loss, its input gradient, and the tap feature.
struct LossGrad {
  double loss = 0.0;
  Tensor grad;
  Tensor feature;
  Tensor logits;
};
LossGrad loss_feature_grad(const Model& m, const Tensor& x, size_t y,
                           const std::string& tap);

/// Backprop a gradient seeded at the output of `seed_layer` down to the
/// model input. Exposed for the objective variants above.
Tensor backward_to_input(const Model& m, const ForwardTrace& trace,
                         size_t seed_layer, const Tensor& seed_grad);

/// Parameter gradients, indexed like Model::layers (empty tensors for
/// parameterless layers).
struct ParamGrads {
  std::vector<Tensor> weight, bias;
};
ParamGrads zero_param_grads(const Model& m);

/// Backward from the logits accumulating parameter gradients into `grads`;
/// returns the input gradient.
Tensor backward_with_params(const Model& m, const ForwardTrace& trace,
                            const Tensor& dlogits, ParamGrads& grads);

size_t argmax_class(const Tensor& logits);

}  // namespace xferlab::nn
