#include "xferlab/model.hpp"

#include <cmath>

#include "xferlab/errors.hpp"
#include "xferlab/rng.hpp"

namespace xferlab::nn {

namespace {

[[noreturn]] void shape_fail(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, msg);
}

std::vector<size_t> require_chw(const std::vector<size_t>& s, const char* layer) {
  if (s.size() != 3) {
    shape_fail(std::string(layer) + " expects [c,h,w] input, got " + shape_str(s));
  }
  return s;
}

}  // namespace

size_t Model::add_dense(size_t out) {
  auto cur = current_shape();
  if (cur.size() != 1) {
    shape_fail("dense expects a flat input, got " + shape_str(cur) +
               " (insert a flatten layer)");
  }
  Layer l;
  l.kind = LayerKind::Dense;
  l.in = cur[0];
  l.out = out;
  l.weight = Tensor({out, l.in});
  l.bias = Tensor({out});
  l.out_shape = {out};
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

size_t Model::add_conv2d(size_t out_ch, size_t ksize, Padding padding) {
  auto cur = require_chw(current_shape(), "conv2d");
  if (ksize % 2 == 0 || ksize == 0) shape_fail("conv2d kernel size must be odd");
  Layer l;
  l.kind = LayerKind::Conv2d;
  l.in_ch = cur[0];
  l.out_ch = out_ch;
  l.ksize = ksize;
  l.padding = padding;
  l.weight = Tensor({out_ch, l.in_ch, ksize, ksize});
  l.bias = Tensor({out_ch});
  if (padding == Padding::Same) {
    l.out_shape = {out_ch, cur[1], cur[2]};
  } else {
    if (cur[1] < ksize || cur[2] < ksize) {
      shape_fail("conv2d valid padding: input " + shape_str(cur) +
                 " smaller than kernel");
    }
    l.out_shape = {out_ch, cur[1] - ksize + 1, cur[2] - ksize + 1};
  }
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

size_t Model::add_relu() {
  Layer l;
  l.kind = LayerKind::Relu;
  l.out_shape = current_shape();
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

size_t Model::add_maxpool2() {
  auto cur = require_chw(current_shape(), "maxpool2");
  if (cur[1] % 2 != 0 || cur[2] % 2 != 0) {
    shape_fail("maxpool2 expects even spatial dims, got " + shape_str(cur));
  }
  Layer l;
  l.kind = LayerKind::MaxPool2;
  l.out_shape = {cur[0], cur[1] / 2, cur[2] / 2};
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

size_t Model::add_flatten() {
  Layer l;
  l.kind = LayerKind::Flatten;
  l.out_shape = {shape_numel(current_shape())};
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

size_t Model::add_residual_add(size_t source_layer) {
  if (source_layer >= layers.size()) {
    shape_fail("residual-add source must precede its consumer");
  }
  auto cur = current_shape();
  if (layers[source_layer].out_shape != cur) {
    shape_fail("residual-add shape mismatch: source " +
               shape_str(layers[source_layer].out_shape) + " vs branch " +
               shape_str(cur));
  }
  Layer l;
  l.kind = LayerKind::ResidualAdd;
  l.source = source_layer;
  l.out_shape = cur;
  layers.push_back(std::move(l));
  return layers.size() - 1;
}

void Model::set_tap(const std::string& name, size_t layer_index) {
  if (layer_index >= layers.size()) {
    shape_fail("tap '" + name + "' refers to a nonexistent layer");
  }
  taps[name] = layer_index;
}

size_t Model::tap_index(const std::string& name) const {
  auto it = taps.find(name);
  if (it == taps.end()) {
    throw Error(ErrorKind::InvalidArgument, "unknown tap name '" + name + "'");
  }
  return it->second;
}

size_t Model::tap_dim(const std::string& name) const {
  return shape_numel(layers[tap_index(name)].out_shape);
}

std::vector<std::string> Model::tap_names() const {
  std::vector<std::string> names;
  names.reserve(taps.size());
  for (const auto& [name, idx] : taps) names.push_back(name);
  return names;
}

void Model::finalize(size_t n_classes) {
  auto cur = current_shape();
  if (cur.size() != 1 || cur[0] != n_classes) {
    shape_fail("model output " + shape_str(cur) + " does not match " +
               std::to_string(n_classes) + " classes");
  }
  classes = n_classes;
}

void init_weights(Model& m, uint64_t seed) {
  Rng rng(seed);
  for (auto& l : m.layers) {
    if (!l.has_params()) continue;
    size_t fan_in, fan_out;
    if (l.kind == LayerKind::Dense) {
      fan_in = l.in;
      fan_out = l.out;
    } else {
      fan_in = l.in_ch * l.ksize * l.ksize;
      fan_out = l.out_ch * l.ksize * l.ksize;
    }
    const double s = std::sqrt(6.0 / double(fan_in + fan_out));
    for (auto& v : l.weight.data) v = rng.uniform(-s, s);
    for (auto& v : l.bias.data) v = 0.0;
  }
}

namespace {

void conv2d_forward(const Layer& l, const Tensor& x, Tensor& y) {
  const size_t ic_n = l.in_ch, oc_n = l.out_ch, k = l.ksize;
  const size_t ih = x.shape[1], iw = x.shape[2];
  const size_t oh = l.out_shape[1], ow = l.out_shape[2];
  const size_t pad = l.padding == Padding::Same ? k / 2 : 0;
  for (size_t o = 0; o < oc_n; ++o) {
    double* yo = &y.data[o * oh * ow];
    const double b = l.bias.data[o];
    for (size_t i = 0; i < oh * ow; ++i) yo[i] = b;
    for (size_t c = 0; c < ic_n; ++c) {
      const double* xc = &x.data[c * ih * iw];
      for (size_t ky = 0; ky < k; ++ky) {
        for (size_t kx = 0; kx < k; ++kx) {
          const double w = l.weight.data[((o * ic_n + c) * k + ky) * k + kx];
          if (w == 0.0) continue;
          // oy + ky - pad in [0, ih)
          const size_t oy_lo = pad > ky ? pad - ky : 0;
          const size_t oy_hi = std::min(oh, ih + pad - ky);
          const size_t ox_lo = pad > kx ? pad - kx : 0;
          const size_t ox_hi = std::min(ow, iw + pad - kx);
          for (size_t oy = oy_lo; oy < oy_hi; ++oy) {
            const double* xrow = &xc[(oy + ky - pad) * iw + (ox_lo + kx - pad)];
            double* yrow = &yo[oy * ow + ox_lo];
            for (size_t ox = 0; ox < ox_hi - ox_lo; ++ox) {
              yrow[ox] += w * xrow[ox];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward(const Layer& l, const Tensor& x, const Tensor& dy,
                     Tensor& dx, Tensor* dW, Tensor* db) {
  const size_t ic_n = l.in_ch, oc_n = l.out_ch, k = l.ksize;
  const size_t ih = x.shape[1], iw = x.shape[2];
  const size_t oh = l.out_shape[1], ow = l.out_shape[2];
  const size_t pad = l.padding == Padding::Same ? k / 2 : 0;
  for (size_t o = 0; o < oc_n; ++o) {
    const double* dyo = &dy.data[o * oh * ow];
    if (db) {
      double s = 0.0;
      for (size_t i = 0; i < oh * ow; ++i) s += dyo[i];
      db->data[o] += s;
    }
    for (size_t c = 0; c < ic_n; ++c) {
      double* dxc = &dx.data[c * ih * iw];
      const double* xc = &x.data[c * ih * iw];
      for (size_t ky = 0; ky < k; ++ky) {
        for (size_t kx = 0; kx < k; ++kx) {
          const size_t widx = ((o * ic_n + c) * k + ky) * k + kx;
          const double w = l.weight.data[widx];
          const size_t oy_lo = pad > ky ? pad - ky : 0;
          const size_t oy_hi = std::min(oh, ih + pad - ky);
          const size_t ox_lo = pad > kx ? pad - kx : 0;
          const size_t ox_hi = std::min(ow, iw + pad - kx);
          double wg = 0.0;
          for (size_t oy = oy_lo; oy < oy_hi; ++oy) {
            const size_t irow = (oy + ky - pad) * iw + (ox_lo + kx - pad);
            const double* dyrow = &dyo[oy * ow + ox_lo];
            double* dxrow = &dxc[irow];
            const double* xrow = &xc[irow];
            const size_t n = ox_hi - ox_lo;
            for (size_t ox = 0; ox < n; ++ox) {
              dxrow[ox] += w * dyrow[ox];
              wg += xrow[ox] * dyrow[ox];
            }
          }
          if (dW) dW->data[widx] += wg;
        }
      }
    }
  }
}

}  // namespace

Tensor forward(const Model& m, const Tensor& x, ForwardTrace* trace) {
  if (x.shape != m.input_shape) {
    shape_fail("input shape " + shape_str(x.shape) + " does not match model input " +
               shape_str(m.input_shape));
  }
  check_finite(x, "forward input");

  const size_t L = m.layers.size();
  std::vector<Tensor> local_acts;
  std::vector<Tensor>& acts = trace ? trace->acts : local_acts;
  acts.clear();
  acts.reserve(L + 1);
  acts.push_back(x);
  if (trace) {
    trace->pool_argmax.assign(L, {});
  }

  for (size_t i = 0; i < L; ++i) {
    const Layer& l = m.layers[i];
    const Tensor& in = acts[i];
    Tensor out(l.out_shape);
    switch (l.kind) {
      case LayerKind::Dense: {
        for (size_t r = 0; r < l.out; ++r) {
          const double* wrow = &l.weight.data[r * l.in];
          double s = l.bias.data[r];
          for (size_t c = 0; c < l.in; ++c) s += wrow[c] * in.data[c];
          out.data[r] = s;
        }
        break;
      }
      case LayerKind::Conv2d:
        conv2d_forward(l, in, out);
        break;
      case LayerKind::Relu:
        for (size_t j = 0; j < in.numel(); ++j) {
          out.data[j] = in.data[j] > 0.0 ? in.data[j] : 0.0;
        }
        break;
      case LayerKind::MaxPool2: {
        const size_t c_n = in.shape[0], h = in.shape[1], w = in.shape[2];
        const size_t oh = h / 2, ow = w / 2;
        std::vector<uint32_t> argmax(c_n * oh * ow);
        for (size_t c = 0; c < c_n; ++c) {
          for (size_t py = 0; py < oh; ++py) {
            for (size_t px = 0; px < ow; ++px) {
              size_t best = (c * h + 2 * py) * w + 2 * px;
              double bv = in.data[best];
              // scan in flat order so ties keep the lowest index
              for (size_t dy = 0; dy < 2; ++dy) {
                for (size_t dx = 0; dx < 2; ++dx) {
                  const size_t idx = (c * h + 2 * py + dy) * w + 2 * px + dx;
                  if (in.data[idx] > bv) {
                    bv = in.data[idx];
                    best = idx;
                  }
                }
              }
              const size_t oidx = (c * oh + py) * ow + px;
              out.data[oidx] = bv;
              argmax[oidx] = static_cast<uint32_t>(best);
            }
          }
        }
        if (trace) trace->pool_argmax[i] = std::move(argmax);
        break;
      }
      case LayerKind::Flatten:
        out.data = in.data;
        break;
      case LayerKind::ResidualAdd: {
        const Tensor& src = acts[l.source + 1];
        for (size_t j = 0; j < in.numel(); ++j) {
          out.data[j] = in.data[j] + src.data[j];
        }
        break;
      }
    }
    acts.push_back(std::move(out));
  }

  Tensor logits = acts.back();
  check_finite(logits, "forward output");
  return logits;
}

std::pair<Tensor, Tensor> forward_with_tap(const Model& m, const Tensor& x,
                                           const std::string& tap) {
  const size_t ti = m.tap_index(tap);
  ForwardTrace trace;
  Tensor logits = forward(m, x, &trace);
  Tensor feature = trace.acts[ti + 1].flattened();
  check_finite(feature, "tap feature");
  return {std::move(logits), std::move(feature)};
}

double cross_entropy(const Tensor& logits, size_t y) {
  if (logits.rank() != 1) {
    throw Error(ErrorKind::InvalidArgument, "cross_entropy expects rank-1 logits");
  }
  if (y >= logits.numel()) {
    throw Error(ErrorKind::InvalidArgument,
                "class index " + std::to_string(y) + " out of range for " +
                    std::to_string(logits.numel()) + " classes");
  }
  double mx = logits.data[0];
  for (double v : logits.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits.data) sum += std::exp(v - mx);
  const double loss = std::log(sum) - (logits.data[y] - mx);
  return loss > 0.0 ? loss : 0.0;
}

Tensor cross_entropy_grad(const Tensor& logits, size_t y) {
  double mx = logits.data[0];
  for (double v : logits.data) mx = std::max(mx, v);
  Tensor g({logits.numel()});
  double sum = 0.0;
  for (size_t i = 0; i < logits.numel(); ++i) {
    g.data[i] = std::exp(logits.data[i] - mx);
    sum += g.data[i];
  }
  for (auto& v : g.data) v /= sum;
  g.data[y] -= 1.0;
  return g;
}

namespace {

struct ParamGradSink {
  std::vector<Tensor>* dweight = nullptr;
  std::vector<Tensor>* dbias = nullptr;
};

Tensor backward_impl(const Model& m, const ForwardTrace& trace, size_t seed_layer,
                     const Tensor& seed_grad, const ParamGradSink& sink) {
  const size_t L = m.layers.size();
  std::vector<Tensor> dacts(L + 1);
  auto grad_at = [&](size_t idx) -> Tensor& {
    if (dacts[idx].numel() == 0) dacts[idx] = Tensor(trace.acts[idx].shape);
    return dacts[idx];
  };

  {
    Tensor& seed = grad_at(seed_layer + 1);
    if (seed.numel() != seed_grad.numel()) {
      shape_fail("seed gradient size does not match layer output");
    }
    seed.data = seed_grad.data;
  }

  for (size_t ii = seed_layer + 1; ii-- > 0;) {
    const size_t i = ii;
    if (dacts[i + 1].numel() == 0) continue;  // no gradient flowed here
    const Layer& l = m.layers[i];
    const Tensor& dy = dacts[i + 1];
    const Tensor& in = trace.acts[i];
    Tensor& dx = grad_at(i);
    switch (l.kind) {
      case LayerKind::Dense: {
        for (size_t r = 0; r < l.out; ++r) {
          const double g = dy.data[r];
          if (g == 0.0) continue;
          const double* wrow = &l.weight.data[r * l.in];
          for (size_t c = 0; c < l.in; ++c) dx.data[c] += g * wrow[c];
        }
        if (sink.dweight) {
          Tensor& dW = (*sink.dweight)[i];
          Tensor& db = (*sink.dbias)[i];
          for (size_t r = 0; r < l.out; ++r) {
            const double g = dy.data[r];
            db.data[r] += g;
            if (g == 0.0) continue;
            double* dwrow = &dW.data[r * l.in];
            for (size_t c = 0; c < l.in; ++c) dwrow[c] += g * in.data[c];
          }
        }
        break;
      }
      case LayerKind::Conv2d: {
        Tensor* dW = sink.dweight ? &(*sink.dweight)[i] : nullptr;
        Tensor* db = sink.dbias ? &(*sink.dbias)[i] : nullptr;
        conv2d_backward(l, in, dy, dx, dW, db);
        break;
      }
      case LayerKind::Relu:
        for (size_t j = 0; j < in.numel(); ++j) {
          if (in.data[j] > 0.0) dx.data[j] += dy.data[j];
        }
        break;
      case LayerKind::MaxPool2: {
        const auto& argmax = trace.pool_argmax[i];
        for (size_t j = 0; j < dy.numel(); ++j) {
          dx.data[argmax[j]] += dy.data[j];
        }
        break;
      }
      case LayerKind::Flatten:
        for (size_t j = 0; j < dy.numel(); ++j) dx.data[j] += dy.data[j];
        break;
      case LayerKind::ResidualAdd: {
        Tensor& dsrc = grad_at(l.source + 1);
        for (size_t j = 0; j < dy.numel(); ++j) {
          dx.data[j] += dy.data[j];
          dsrc.data[j] += dy.data[j];
        }
        break;
      }
    }
  }

  if (dacts[0].numel() == 0) return Tensor(trace.acts[0].shape);
  return std::move(dacts[0]);
}

}  // namespace

Tensor backward_to_input(const Model& m, const ForwardTrace& trace,
                         size_t seed_layer, const Tensor& seed_grad) {
  return backward_impl(m, trace, seed_layer, seed_grad, {});
}

ParamGrads zero_param_grads(const Model& m) {
  ParamGrads g;
  g.weight.resize(m.layers.size());
  g.bias.resize(m.layers.size());
  for (size_t i = 0; i < m.layers.size(); ++i) {
    if (m.layers[i].has_params()) {
      g.weight[i] = Tensor(m.layers[i].weight.shape);
      g.bias[i] = Tensor(m.layers[i].bias.shape);
    }
  }
  return g;
}

Tensor backward_with_params(const Model& m, const ForwardTrace& trace,
                            const Tensor& dlogits, ParamGrads& grads) {
  ParamGradSink sink{&grads.weight, &grads.bias};
  return backward_impl(m, trace, m.layers.size() - 1, dlogits, sink);
}

Tensor grad_input_loss(const Model& m, const Tensor& x, size_t y) {
  ForwardTrace trace;
  Tensor logits = forward(m, x, &trace);
  Tensor dlogits = cross_entropy_grad(logits, y);
  if (y >= m.classes) {
    throw Error(ErrorKind::InvalidArgument, "class index out of range");
  }
  Tensor g = backward_impl(m, trace, m.layers.size() - 1, dlogits, {});
  check_finite(g, "grad_input_loss");
  return g;
}

Tensor grad_input_projection(const Model& m, const Tensor& x,
                             const std::string& tap, const Tensor& w,
                             const Tensor& h0) {
  const size_t ti = m.tap_index(tap);
  const size_t dim = m.tap_dim(tap);
  if (w.numel() != dim || h0.numel() != dim) {
    throw Error(ErrorKind::InvalidArgument,
                "projection direction dim " + std::to_string(w.numel()) +
                    " does not match tap dim " + std::to_string(dim));
  }
  ForwardTrace trace;
  forward(m, x, &trace);
  Tensor g = backward_impl(m, trace, ti, w, {});
  check_finite(g, "grad_input_projection");
  return g;
}

LossGrad loss_feature_grad(const Model& m, const Tensor& x, size_t y,
                           const std::string& tap) {
  const size_t ti = m.tap_index(tap);
  ForwardTrace trace;
  LossGrad out;
  out.logits = forward(m, x, &trace);
  out.loss = cross_entropy(out.logits, y);
  out.feature = trace.acts[ti + 1].flattened();
  Tensor dlogits = cross_entropy_grad(out.logits, y);
  out.grad = backward_impl(m, trace, m.layers.size() - 1, dlogits, {});
  return out;
}

size_t argmax_class(const Tensor& logits) {
  size_t best = 0;
  for (size_t i = 1; i < logits.numel(); ++i) {
    if (logits.data[i] > logits.data[best]) best = i;
  }
  return best;
}

}  // namespace xferlab::nn
