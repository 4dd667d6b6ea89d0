#pragma once

#include <string>

#include "xferlab/model.hpp"

namespace xferlab::nn {

/// Weight file ("XFW1"): magic, then each parameter tensor in layer order
/// (weight then bias) as rank/dims (u32 LE) + row-major f64 LE payload.
/// Round trips are bitwise lossless.
void save_weights(const Model& m, const std::string& path);

/// Loads weights into an existing model skeleton; the file must match the
/// declared architecture tensor-for-tensor.
void load_weights(Model& m, const std::string& path);

/// Convenience: build the architecture, then load.
Model load_weights(const std::string& arch_id, std::vector<size_t> input_shape,
                   size_t classes, const std::string& path);

}  // namespace xferlab::nn
