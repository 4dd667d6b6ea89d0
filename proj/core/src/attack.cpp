#include "xferlab/attack.hpp"

#include <cmath>

#include "xferlab/binio.hpp"
#include "xferlab/errors.hpp"
#include "xferlab/rng.hpp"

namespace xferlab::attack {

Tensor ConstraintSet::project(const Tensor& z) const {
  if (!z.same_shape(anchor)) {
    throw Error(ErrorKind::InvalidArgument,
                "project: shape " + shape_str(z.shape) + " does not match anchor " +
                    shape_str(anchor.shape));
  }
  Tensor out(z.shape);
  if (kind == Norm::Linf) {
    for (size_t i = 0; i < z.numel(); ++i) {
      const double lo = anchor.data[i] - epsilon;
      const double hi = anchor.data[i] + epsilon;
      double v = std::min(hi, std::max(lo, z.data[i]));
      out.data[i] = std::min(1.0, std::max(0.0, v));
    }
  } else {
    double norm2 = 0.0;
    for (size_t i = 0; i < z.numel(); ++i) {
      const double d = z.data[i] - anchor.data[i];
      norm2 += d * d;
    }
    const double norm = std::sqrt(norm2);
    const double scale = norm > epsilon ? epsilon / norm : 1.0;
    for (size_t i = 0; i < z.numel(); ++i) {
      const double v = anchor.data[i] + scale * (z.data[i] - anchor.data[i]);
      out.data[i] = std::min(1.0, std::max(0.0, v));
    }
  }
  return out;
}

bool ConstraintSet::contains(const Tensor& z, double tol) const {
  if (!z.same_shape(anchor)) return false;
  for (double v : z.data) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  if (kind == Norm::Linf) {
    for (size_t i = 0; i < z.numel(); ++i) {
      if (std::fabs(z.data[i] - anchor.data[i]) > epsilon + tol) return false;
    }
    return true;
  }
  double norm2 = 0.0;
  for (size_t i = 0; i < z.numel(); ++i) {
    const double d = z.data[i] - anchor.data[i];
    norm2 += d * d;
  }
  return std::sqrt(norm2) <= epsilon + tol;
}

Method method_from_string(const std::string& s) {
  if (s == "fgsm") return Method::FGSM;
  if (s == "ifgsm") return Method::IFGSM;
  if (s == "pgd") return Method::PGD;
  if (s == "mifgsm") return Method::MIFGSM;
  throw Error(ErrorKind::InvalidArgument, "unknown attack method '" + s + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::FGSM: return "fgsm";
    case Method::IFGSM: return "ifgsm";
    case Method::PGD: return "pgd";
    case Method::MIFGSM: return "mifgsm";
  }
  return "?";
}

namespace {

void require_finite_grad(const Tensor& g) {
  if (!all_finite(g)) {
    throw Error(ErrorKind::Attack, "attack failed: non-finite gradient");
  }
}

Tensor step_direction(const Tensor& g, Norm kind, double alpha) {
  Tensor dir(g.shape);
  if (kind == Norm::Linf) {
    for (size_t i = 0; i < g.numel(); ++i) dir.data[i] = alpha * sgn(g.data[i]);
  } else {
    const double n = l2_norm(g);
    if (n > 0.0) {
      for (size_t i = 0; i < g.numel(); ++i) dir.data[i] = alpha * g.data[i] / n;
    }
  }
  return dir;
}

}  // namespace

Tensor ifgsm_step(const nn::Model& m, const ConstraintSet& c, const Tensor& x_t,
                  uint16_t y, double alpha) {
  Tensor g = nn::grad_input_loss(m, x_t, y);
  require_finite_grad(g);
  Tensor dir = step_direction(g, c.kind, alpha);
  Tensor z(x_t.shape);
  for (size_t i = 0; i < z.numel(); ++i) z.data[i] = x_t.data[i] + dir.data[i];
  return c.project(z);
}

Trajectory run_baseline(const nn::Model& m, const Tensor& x, uint16_t y,
                        const ConstraintSet& c, const AttackConfig& cfg) {
  if (!c.anchor.same_shape(x) || c.anchor.data != x.data) {
    throw Error(ErrorKind::InvalidArgument, "constraint anchor must be the benign input");
  }
  for (double v : x.data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "run_baseline: input outside [0,1]");
    }
  }
  AttackConfig eff = cfg;
  if (eff.method == Method::FGSM) {
    eff.steps = 1;
    eff.step_size = c.epsilon;
  }
  if (eff.steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "attack needs at least one step");
  }
  if (eff.step_size <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "step size must be positive");
  }
  m.tap_index(eff.tap);  // validates the tap name up front

  Trajectory traj;
  traj.x = x;
  traj.y = y;
  traj.config = eff;
  traj.norm = c.kind;
  traj.epsilon = c.epsilon;
  traj.xs.reserve(eff.steps + 1);
  traj.hs.reserve(eff.steps + 1);
  traj.ls.reserve(eff.steps + 1);

  Tensor x_t = x;
  if (eff.method == Method::PGD && eff.random_start_radius > 0.0) {
    Rng rng(eff.seed);
    Tensor z(x.shape);
    for (size_t i = 0; i < x.numel(); ++i) {
      z.data[i] = x.data[i] +
                  rng.uniform(-eff.random_start_radius, eff.random_start_radius);
    }
    x_t = c.project(z);
  }

  Tensor mom;  // MI-FGSM accumulator
  if (eff.method == Method::MIFGSM) mom = Tensor(x.shape);

  for (size_t t = 0; t < eff.steps; ++t) {
    nn::LossGrad lg = nn::loss_feature_grad(m, x_t, y, eff.tap);
    require_finite_grad(lg.grad);
    traj.xs.push_back(x_t);
    traj.hs.push_back(std::move(lg.feature));
    traj.ls.push_back(lg.loss);

    Tensor dir;
    if (eff.method == Method::MIFGSM) {
      const double n1 = l1_norm(lg.grad);
      if (n1 > 0.0) {
        for (size_t i = 0; i < mom.numel(); ++i) {
          mom.data[i] = eff.momentum * mom.data[i] + lg.grad.data[i] / n1;
        }
      } else {
        for (size_t i = 0; i < mom.numel(); ++i) {
          mom.data[i] = eff.momentum * mom.data[i];
        }
      }
      dir = step_direction(mom, c.kind, eff.step_size);
    } else {
      dir = step_direction(lg.grad, c.kind, eff.step_size);
    }
    Tensor z(x_t.shape);
    for (size_t i = 0; i < z.numel(); ++i) z.data[i] = x_t.data[i] + dir.data[i];
    x_t = c.project(z);
  }

  auto [logits, feature] = nn::forward_with_tap(m, x_t, eff.tap);
  traj.xs.push_back(std::move(x_t));
  traj.hs.push_back(std::move(feature));
  traj.ls.push_back(nn::cross_entropy(logits, y));
  return traj;
}

void save_trajectories(const std::vector<Trajectory>& trajs, const std::string& path) {
  binio::Writer w(path);
  w.magic("XFT1");
  w.u32(static_cast<uint32_t>(trajs.size()));
  for (const auto& t : trajs) {
    w.u32(static_cast<uint32_t>(t.config.method));
    w.u32(static_cast<uint32_t>(t.config.steps));
    w.f64(t.config.step_size);
    w.f64(t.config.momentum);
    w.f64(t.config.random_start_radius);
    w.u64(t.config.seed);
    w.str(t.config.tap);
    w.u32(static_cast<uint32_t>(t.norm));
    w.f64(t.epsilon);
    w.u16(t.y);
    w.tensor(t.x);
    for (size_t s = 0; s < t.xs.size(); ++s) {
      w.tensor(t.xs[s]);
      w.tensor(t.hs[s]);
      w.tensor(Tensor({1}, {t.ls[s]}));
    }
  }
  w.close();
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("XFT1");
  const uint32_t count = r.u32();
  std::vector<Trajectory> trajs;
  trajs.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Trajectory t;
    const uint32_t method = r.u32();
    if (method > uint32_t(Method::MIFGSM)) {
      throw Error(ErrorKind::Format, path + ": bad method tag");
    }
    t.config.method = static_cast<Method>(method);
    t.config.steps = r.u32();
    t.config.step_size = r.f64();
    t.config.momentum = r.f64();
    t.config.random_start_radius = r.f64();
    t.config.seed = r.u64();
    t.config.tap = r.str();
    const uint32_t norm = r.u32();
    if (norm > uint32_t(Norm::L2)) {
      throw Error(ErrorKind::Format, path + ": bad norm tag");
    }
    t.norm = static_cast<Norm>(norm);
    t.epsilon = r.f64();
    t.y = r.u16();
    t.x = r.tensor("trajectory anchor");
    const size_t records = t.config.steps + 1;
    t.xs.reserve(records);
    t.hs.reserve(records);
    t.ls.reserve(records);
    for (size_t s = 0; s < records; ++s) {
      t.xs.push_back(r.tensor("trajectory iterate"));
      t.hs.push_back(r.tensor("trajectory feature"));
      Tensor l = r.tensor("trajectory loss");
      if (l.numel() != 1) {
        throw Error(ErrorKind::Format, path + ": loss record must be scalar");
      }
      t.ls.push_back(l.data[0]);
    }
    trajs.push_back(std::move(t));
  }
  return trajs;
}

}  // namespace xferlab::attack
