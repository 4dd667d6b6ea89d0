#include "xferlab/enhance.hpp"

#include <cmath>

#include "xferlab/errors.hpp"

namespace xferlab::enhance {

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::ILA: return "ila";
    case Provenance::ILAppDirect: return "ilapp_direct";
    case Provenance::ILAppWoodbury: return "ilapp_woodbury";
    case Provenance::ILAppInf: return "ilapp_inf";
    case Provenance::Ensemble: return "ensemble";
  }
  return "?";
}

namespace {

void validate_lambda(double lambda) {
  if (std::isnan(lambda) || lambda <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "lambda must be positive (or infinite)");
  }
}

struct RowAccumulator {
  std::vector<std::vector<double>> rows;
  std::vector<double> losses;
  size_t dim = 0;

  void add(const attack::Trajectory& traj, bool normalized) {
    if (traj.steps() < 1) {
      throw Error(ErrorKind::InvalidArgument,
                  "trajectory needs at least one step to form discrepancies");
    }
    const Tensor& h0 = traj.hs[0];
    if (dim == 0) dim = h0.numel();
    for (size_t t = 1; t < traj.hs.size(); ++t) {
      std::vector<double> row(dim);
      double norm2 = 0.0;
      for (size_t i = 0; i < dim; ++i) {
        row[i] = traj.hs[t].data[i] - h0.data[i];
        norm2 += row[i] * row[i];
      }
      if (norm2 == 0.0) continue;  // zero discrepancy contributes nothing
      if (normalized) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& v : row) v *= inv;
      }
      rows.push_back(std::move(row));
      losses.push_back(traj.ls[t]);
    }
  }
};

RegressionProblem finish_problem(RowAccumulator&& acc, const attack::Trajectory& first,
                                 bool normalized, double lambda, bool ensemble) {
  if (acc.rows.empty()) {
    throw Error(ErrorKind::Degenerate,
                "degenerate trajectory: every feature discrepancy is zero");
  }
  RegressionProblem prob;
  prob.H = linalg::Mat(acc.rows.size(), acc.dim);
  for (size_t r = 0; r < acc.rows.size(); ++r) {
    std::copy(acc.rows[r].begin(), acc.rows[r].end(), prob.H.row(r));
  }
  prob.r = std::move(acc.losses);
  prob.lambda = lambda;
  prob.normalized = normalized;
  prob.ensemble = ensemble;
  prob.tap = first.config.tap;
  prob.anchor = first.x;
  prob.label = first.y;
  if (first.xs[0] == first.x) prob.h0_clean = first.hs[0];
  return prob;
}

GuideVector make_guide(std::vector<double> w, Provenance prov,
                       const RegressionProblem& prob) {
  GuideVector g;
  g.w = std::move(w);
  g.provenance = prob.ensemble ? Provenance::Ensemble : prov;
  g.tap = prob.tap;
  g.h0 = prob.h0_clean;
  double norm2 = 0.0;
  for (double v : g.w) norm2 += v * v;
  g.degenerate = norm2 == 0.0;
  return g;
}

}  // namespace

RegressionProblem build_problem(const attack::Trajectory& traj, bool normalized,
                                double lambda) {
  validate_lambda(lambda);
  RowAccumulator acc;
  acc.add(traj, normalized);
  return finish_problem(std::move(acc), traj, normalized, lambda, false);
}

RegressionProblem ensemble_problem(const std::vector<attack::Trajectory>& trajs,
                                   bool normalized, double lambda) {
  validate_lambda(lambda);
  if (trajs.empty()) {
    throw Error(ErrorKind::InvalidArgument, "ensemble needs at least one trajectory");
  }
  const auto& first = trajs[0];
  for (const auto& t : trajs) {
    if (!(t.x == first.x) || t.y != first.y || t.config.tap != first.config.tap) {
      throw Error(ErrorKind::InvalidArgument,
                  "ensemble trajectories must share anchor, label and tap");
    }
  }
  RowAccumulator acc;
  for (const auto& t : trajs) acc.add(t, normalized);
  RegressionProblem prob =
      finish_problem(std::move(acc), first, normalized, lambda, trajs.size() > 1);
  if (prob.h0_clean.numel() == 0) {
    // any pooled trajectory that started at the anchor can supply g(x)
    for (const auto& t : trajs) {
      if (t.xs[0] == t.x) {
        prob.h0_clean = t.hs[0];
        break;
      }
    }
  }
  return prob;
}

GuideVector ridge_direct(const RegressionProblem& prob) {
  if (!std::isfinite(prob.lambda)) {
    throw Error(ErrorKind::InvalidArgument, "ridge_direct needs a finite lambda");
  }
  for (double v : prob.H.a) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "ridge_direct: non-finite H");
    }
  }
  linalg::Mat A = linalg::gram_tt(prob.H);
  linalg::add_diagonal(A, prob.lambda);
  std::vector<double> b = linalg::matvec_t(prob.H, prob.r);
  return make_guide(linalg::cholesky_solve_spd(std::move(A), std::move(b)),
                    Provenance::ILAppDirect, prob);
}

GuideVector ridge_woodbury(const RegressionProblem& prob) {
  if (!std::isfinite(prob.lambda)) {
    throw Error(ErrorKind::InvalidArgument, "ridge_woodbury needs a finite lambda");
  }
  // w = (1/lambda) (H^T r - H^T (H H^T + lambda I_p)^{-1} H H^T r)
  std::vector<double> u = linalg::matvec_t(prob.H, prob.r);
  std::vector<double> s = linalg::matvec(prob.H, u);
  linalg::Mat G = linalg::gram(prob.H);
  linalg::add_diagonal(G, prob.lambda);
  std::vector<double> z = linalg::cholesky_solve_spd(std::move(G), std::move(s));
  std::vector<double> correction = linalg::matvec_t(prob.H, z);
  std::vector<double> w(u.size());
  const double inv_lambda = 1.0 / prob.lambda;
  for (size_t i = 0; i < w.size(); ++i) {
    w[i] = inv_lambda * (u[i] - correction[i]);
  }
  return make_guide(std::move(w), Provenance::ILAppWoodbury, prob);
}

GuideVector guide_lambda_inf(const RegressionProblem& prob) {
  return make_guide(linalg::matvec_t(prob.H, prob.r), Provenance::ILAppInf, prob);
}

GuideVector ila_direction(const attack::Trajectory& traj) {
  if (traj.steps() < 1) {
    throw Error(ErrorKind::InvalidArgument, "trajectory needs at least one step");
  }
  const Tensor& h0 = traj.hs.front();
  const Tensor& hp = traj.hs.back();
  GuideVector g;
  g.w.resize(h0.numel());
  double norm2 = 0.0;
  for (size_t i = 0; i < h0.numel(); ++i) {
    g.w[i] = hp.data[i] - h0.data[i];
    norm2 += g.w[i] * g.w[i];
  }
  g.provenance = Provenance::ILA;
  g.tap = traj.config.tap;
  if (traj.xs[0] == traj.x) g.h0 = h0;
  g.degenerate = norm2 == 0.0;
  return g;
}

GuideVector fit_guide(const RegressionProblem& prob) {
  return std::isfinite(prob.lambda) ? ridge_woodbury(prob) : guide_lambda_inf(prob);
}

void anchor_guide(GuideVector& guide, const nn::Model& m, const Tensor& x) {
  if (guide.h0.numel() != 0) return;
  guide.h0 = nn::forward_with_tap(m, x, guide.tap).second;
}

Tensor enhance_run(const nn::Model& m, const GuideVector& guide, const Tensor& x,
                   const attack::ConstraintSet& c, size_t steps, double alpha) {
  if (guide.degenerate) {
    throw Error(ErrorKind::Degenerate, "degenerate guide: zero direction");
  }
  const size_t dim = m.tap_dim(guide.tap);
  if (guide.w.size() != dim || guide.h0.numel() != dim) {
    throw Error(ErrorKind::InvalidArgument,
                "guide dimensions do not match tap '" + guide.tap + "'");
  }
  if (alpha <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "step size must be positive");
  }
  const Tensor w({dim}, guide.w);
  Tensor x_t = x;
  for (size_t t = 0; t < steps; ++t) {
    Tensor g = nn::grad_input_projection(m, x_t, guide.tap, w, guide.h0);
    Tensor z(x_t.shape);
    if (c.kind == attack::Norm::Linf) {
      for (size_t i = 0; i < z.numel(); ++i) {
        z.data[i] = x_t.data[i] + alpha * sgn(g.data[i]);
      }
    } else {
      const double n = l2_norm(g);
      const double scale = n > 0.0 ? alpha / n : 0.0;
      for (size_t i = 0; i < z.numel(); ++i) {
        z.data[i] = x_t.data[i] + scale * g.data[i];
      }
    }
    x_t = c.project(z);
  }
  return x_t;
}

}  // namespace xferlab::enhance
