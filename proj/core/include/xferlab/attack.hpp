#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xferlab/model.hpp"
#include "xferlab/tensor.hpp"

namespace xferlab::attack {

enum class Norm : uint8_t { Linf, L2 };

/// Valid-input set: a norm ball of radius epsilon around the benign
/// anchor, intersected with the [0,1] pixel box.
struct ConstraintSet {
  Norm kind = Norm::Linf;
  double epsilon = 0.03;
  Tensor anchor;

  /// Projection onto the set. Linf: per-coordinate clamp into
  /// [anchor-eps, anchor+eps], then into [0,1]. L2: rescale the
  /// difference to norm eps when outside, then clamp to [0,1].
  Tensor project(const Tensor& z) const;

  bool contains(const Tensor& z, double tol = 1e-12) const;
};

enum class Method : uint8_t { FGSM, IFGSM, PGD, MIFGSM };

Method method_from_string(const std::string& s);
std::string method_name(Method m);

struct AttackConfig {
  Method method = Method::IFGSM;
  size_t steps = 10;
  double step_size = 1.0 / 255.0;
  double momentum = 1.0;              // MI-FGSM only
  double random_start_radius = 0.0;   // PGD only
  uint64_t seed = 0;
  std::string tap;
};

/// Per-step record of a baseline attack: iterates, tap features and
/// cross-entropy losses sampled before each update (so index 0 is the
/// starting point and index steps the final adversarial example).
struct Trajectory {
  Tensor x;  // benign anchor
  uint16_t y = 0;
  std::vector<Tensor> xs;
  std::vector<Tensor> hs;
  std::vector<double> ls;
  AttackConfig config;
  Norm norm = Norm::Linf;
  double epsilon = 0.03;

  size_t steps() const { return xs.empty() ? 0 : xs.size() - 1; }
};

/// One ascent step on the cross-entropy loss: sign step under Linf,
/// l2-normalized gradient step under L2, followed by projection.
Tensor ifgsm_step(const nn::Model& m, const ConstraintSet& c, const Tensor& x_t,
                  uint16_t y, double alpha);

/// Runs the configured baseline attack and records the trajectory.
/// FGSM is IFGSM with steps=1 and alpha=epsilon; PGD adds a seeded
/// uniform start inside the radius; MI-FGSM accumulates an l1-normalized
/// gradient with momentum and steps along its sign.
Trajectory run_baseline(const nn::Model& m, const Tensor& x, uint16_t y,
                        const ConstraintSet& c, const AttackConfig& cfg);

/// Trajectory dump ("XFT1"): config header then per-step tensors in the
/// weight-file tensor encoding.
void save_trajectories(const std::vector<Trajectory>& trajs, const std::string& path);
std::vector<Trajectory> load_trajectories(const std::string& path);

}  // namespace xferlab::attack
