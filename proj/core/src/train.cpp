#include "xferlab/train.hpp"

#include <cmath>
#include <numeric>

#include "xferlab/errors.hpp"
#include "xferlab/rng.hpp"

namespace xferlab::nn {

double accuracy(const Model& m, const data::Dataset& ds) {
  size_t correct = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const Tensor logits = forward(m, ds.example(i));
    if (argmax_class(logits) == ds.labels[i]) ++correct;
  }
  return double(correct) / double(ds.size());
}

TrainResult train_sgd(Model& m, const data::Dataset& train,
                      const data::Dataset* holdout, const TrainOptions& opts) {
  if (train.classes != m.classes) {
    throw Error(ErrorKind::InvalidArgument,
                "dataset label space does not match model output width");
  }
  if (opts.batch == 0) {
    throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
  }

  Rng rng(opts.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += opts.batch) {
      const size_t end = std::min(order.size(), start + opts.batch);
      ParamGrads grads = zero_param_grads(m);
      double batch_loss = 0.0;
      for (size_t j = start; j < end; ++j) {
        const size_t idx = order[j];
        const Tensor x = train.example(idx);
        ForwardTrace trace;
        const Tensor logits = forward(m, x, &trace);
        batch_loss += cross_entropy(logits, train.labels[idx]);
        const Tensor dlogits = cross_entropy_grad(logits, train.labels[idx]);
        backward_with_params(m, trace, dlogits, grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorKind::Training, "training diverged: non-finite loss");
      }
      const double scale = opts.lr / double(end - start);
      if (scale == 0.0) continue;
      for (size_t li = 0; li < m.layers.size(); ++li) {
        Layer& l = m.layers[li];
        if (!l.has_params()) continue;
        for (size_t k = 0; k < l.weight.numel(); ++k) {
          l.weight.data[k] -= scale * grads.weight[li].data[k];
        }
        for (size_t k = 0; k < l.bias.numel(); ++k) {
          l.bias.data[k] -= scale * grads.bias[li].data[k];
        }
      }
    }
  }

  TrainResult res;
  res.train_accuracy = accuracy(m, train);
  if (holdout) {
    res.holdout_accuracy = accuracy(m, *holdout);
    if (opts.accuracy_floor > 0.0 && res.holdout_accuracy < opts.accuracy_floor) {
      throw Error(ErrorKind::Training,
                  "under-trained: held-out accuracy " +
                      std::to_string(res.holdout_accuracy) + " below floor " +
                      std::to_string(opts.accuracy_floor));
    }
  }
  return res;
}

}  // namespace xferlab::nn
