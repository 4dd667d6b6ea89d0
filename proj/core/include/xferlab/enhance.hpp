#pragma once

#include <limits>
#include <string>
#include <vector>

#include "xferlab/attack.hpp"
#include "xferlab/linalg.hpp"
#include "xferlab/model.hpp"
#include "xferlab/tensor.hpp"

namespace xferlab::enhance {

inline constexpr double kLambdaInf = std::numeric_limits<double>::infinity();

/// Ridge regression data built from a baseline trajectory: rows of H are
/// the feature discrepancies h_t - h_0 (t >= 1, zero rows dropped), r the
/// matching adversarial losses.
struct RegressionProblem {
  linalg::Mat H;
  std::vector<double> r;
  double lambda = kLambdaInf;
  bool normalized = true;
  bool ensemble = false;
  std::string tap;
  Tensor anchor;    // benign input shared by the source trajectories
  uint16_t label = 0;
  Tensor h0_clean;  // g(anchor) when the trajectory started at the anchor, else empty
};

enum class Provenance { ILA, ILAppDirect, ILAppWoodbury, ILAppInf, Ensemble };
std::string provenance_name(Provenance p);

/// Directional guide in feature space. The enhancement phase maximizes
/// the scalar projection of (g(x+delta) - h0) onto w.
struct GuideVector {
  std::vector<double> w;
  Provenance provenance = Provenance::ILAppInf;
  std::string tap;
  Tensor h0;
  bool degenerate = false;
};

RegressionProblem build_problem(const attack::Trajectory& traj, bool normalized,
                                double lambda);

/// Pools discrepancy rows from several trajectories that share anchor,
/// label and tap (e.g. I-FGSM + PGD from the same input).
RegressionProblem ensemble_problem(const std::vector<attack::Trajectory>& trajs,
                                   bool normalized, double lambda);

/// w = (H^T H + lambda I_m)^{-1} H^T r via the m x m normal equations.
GuideVector ridge_direct(const RegressionProblem& prob);

/// Same solution through the Woodbury identity: only a p x p system
/// (H H^T + lambda I_p) is ever factorized.
GuideVector ridge_woodbury(const RegressionProblem& prob);

/// lambda -> infinity limit: w = H^T r (the surviving direction once the
/// 1/lambda scaling is dropped).
GuideVector guide_lambda_inf(const RegressionProblem& prob);

/// The final-discrepancy direction h_p - h_0.
GuideVector ila_direction(const attack::Trajectory& traj);

/// Fit a guide choosing the route from lambda: finite -> Woodbury,
/// infinite -> H^T r.
GuideVector fit_guide(const RegressionProblem& prob);

/// Attach the clean feature anchor g(x) when the problem could not supply
/// it (trajectories with a random start).
void anchor_guide(GuideVector& guide, const nn::Model& m, const Tensor& x);

/// Iterative ascent on (g(x+delta) - h0)^T w under the constraint set:
/// sign steps for Linf, normalized-gradient steps for L2, projection
/// after every step. Deterministic; steps=0 returns x.
Tensor enhance_run(const nn::Model& m, const GuideVector& guide, const Tensor& x,
                   const attack::ConstraintSet& c, size_t steps, double alpha);

}  // namespace xferlab::enhance
