#include "xferlab/weights_io.hpp"

#include "xferlab/binio.hpp"
#include "xferlab/errors.hpp"

namespace xferlab::nn {

void save_weights(const Model& m, const std::string& path) {
  binio::Writer w(path);
  w.magic("XFW1");
  for (const auto& l : m.layers) {
    if (!l.has_params()) continue;
    w.tensor(l.weight);
    w.tensor(l.bias);
  }
  w.close();
}

void load_weights(Model& m, const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("XFW1");
  for (auto& l : m.layers) {
    if (!l.has_params()) continue;
    for (Tensor* param : {&l.weight, &l.bias}) {
      Tensor t = r.tensor("parameter tensor");
      if (t.shape != param->shape) {
        throw Error(ErrorKind::Format,
                    path + " at byte " + std::to_string(r.offset()) +
                        ": tensor shape " + shape_str(t.shape) +
                        " does not match architecture " + shape_str(param->shape));
      }
      *param = std::move(t);
    }
  }
  if (!r.at_eof()) {
    throw Error(ErrorKind::Format,
                path + ": trailing data after byte " + std::to_string(r.offset()));
  }
}

Model load_weights(const std::string& arch_id, std::vector<size_t> input_shape,
                   size_t classes, const std::string& path) {
  Model m = make_model(arch_id, std::move(input_shape), classes);
  load_weights(m, path);
  return m;
}

}  // namespace xferlab::nn
