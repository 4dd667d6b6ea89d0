#pragma once

#include <cstdint>

#include "xferlab/data.hpp"
#include "xferlab/model.hpp"

namespace xferlab::nn {

struct TrainOptions {
  size_t epochs = 5;
  double lr = 0.05;
  size_t batch = 32;
  uint64_t seed = 1;
  /// If > 0 and a holdout set is given, training below this held-out
  /// accuracy raises a Training error (under-trained).
  double accuracy_floor = 0.0;
};

struct TrainResult {
  double train_accuracy = 0.0;
  double holdout_accuracy = 0.0;
};

/// Plain mini-batch SGD on cross-entropy. Deterministic given the seed;
/// throws Training on divergence (non-finite loss) or a missed floor.
TrainResult train_sgd(Model& m, const data::Dataset& train,
                      const data::Dataset* holdout, const TrainOptions& opts);

/// Fraction of examples whose argmax prediction matches the label.
double accuracy(const Model& m, const data::Dataset& ds);

}  // namespace xferlab::nn
