#include "xferlab/errors.hpp"
#include "xferlab/model.hpp"

namespace xferlab::nn {

namespace {

// Plain VGG-style stack: conv blocks separated by pooling, no skips.
Model build_cnn_plain(std::vector<size_t> in, size_t classes) {
  Model m;
  m.arch_id = "cnn_plain";
  m.input_shape = std::move(in);
  m.set_tap("conv1", m.add_conv2d(8));
  m.set_tap("relu1", m.add_relu());
  m.set_tap("conv2", m.add_conv2d(8));
  m.set_tap("relu2", m.add_relu());
  m.set_tap("pool1", m.add_maxpool2());
  m.set_tap("conv3", m.add_conv2d(16));
  m.set_tap("relu3", m.add_relu());
  m.set_tap("pool2", m.add_maxpool2());
  m.add_flatten();
  m.set_tap("fc1", m.add_dense(64));
  m.set_tap("fc1_relu", m.add_relu());
  m.add_dense(classes);
  m.finalize(classes);
  return m;
}

// Deeper stack with a residual connection around the middle conv pair.
Model build_cnn_skip(std::vector<size_t> in, size_t classes) {
  Model m;
  m.arch_id = "cnn_skip";
  m.input_shape = std::move(in);
  m.set_tap("conv1", m.add_conv2d(8));
  const size_t trunk = m.add_relu();
  m.set_tap("relu1", trunk);
  m.set_tap("conv2", m.add_conv2d(8));
  m.set_tap("relu2", m.add_relu());
  m.set_tap("conv3", m.add_conv2d(8));
  m.set_tap("res1", m.add_residual_add(trunk));
  m.set_tap("relu3", m.add_relu());
  m.set_tap("pool1", m.add_maxpool2());
  m.set_tap("conv4", m.add_conv2d(16));
  m.set_tap("relu4", m.add_relu());
  m.set_tap("pool2", m.add_maxpool2());
  m.add_flatten();
  m.set_tap("fc1", m.add_dense(64));
  m.set_tap("fc1_relu", m.add_relu());
  m.add_dense(classes);
  m.finalize(classes);
  return m;
}

// Linear probe: single dense layer on flat pixels.
Model build_linear(std::vector<size_t> in, size_t classes) {
  Model m;
  m.arch_id = "linear";
  m.input_shape = std::move(in);
  m.add_flatten();
  m.set_tap("fc1", m.add_dense(classes));
  m.finalize(classes);
  return m;
}

Model build_mlp(std::vector<size_t> in, size_t classes) {
  Model m;
  m.arch_id = "mlp";
  m.input_shape = std::move(in);
  m.add_flatten();
  m.set_tap("fc1", m.add_dense(32));
  m.set_tap("fc1_relu", m.add_relu());
  m.add_dense(classes);
  m.finalize(classes);
  return m;
}

}  // namespace

Model make_model(const std::string& arch_id, std::vector<size_t> input_shape,
                 size_t classes) {
  if (arch_id == "cnn_plain") return build_cnn_plain(std::move(input_shape), classes);
  if (arch_id == "cnn_skip") return build_cnn_skip(std::move(input_shape), classes);
  if (arch_id == "linear") return build_linear(std::move(input_shape), classes);
  if (arch_id == "mlp") return build_mlp(std::move(input_shape), classes);
  throw Error(ErrorKind::InvalidArgument, "unknown architecture '" + arch_id + "'");
}

std::vector<std::string> known_archs() {
  return {"cnn_plain", "cnn_skip", "linear", "mlp"};
}

}  // namespace xferlab::nn
