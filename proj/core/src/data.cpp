#include "xferlab/data.hpp"

#include <cmath>

#include "xferlab/binio.hpp"
#include "xferlab/errors.hpp"
#include "xferlab/rng.hpp"

namespace xferlab::data {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Image statistics that make the default 16x16 setup sit in a useful
// regime: CNNs reach >90% test accuracy while epsilon=0.03 attacks still
// bite, and the circular shifts keep a linear probe well below the CNN.
constexpr double kTemplateAmplitude = 0.30;
constexpr double kPixelNoise = 0.09;
constexpr int kMaxShift = 3;

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return Rng::splitmix64(x);
}

// One smooth pattern per class in [-1, 1]: a few oriented sinusoids plus
// signed Gaussian bumps, normalized by peak magnitude.
std::vector<double> make_template(Rng& rng, size_t c, size_t h, size_t w) {
  std::vector<double> t(c * h * w, 0.0);
  for (size_t ch = 0; ch < c; ++ch) {
    struct Wave {
      double fy, fx, phase, amp;
    };
    Wave waves[3];
    for (auto& wv : waves) {
      wv.fy = 1.0 + double(rng.index(3));
      wv.fx = 1.0 + double(rng.index(3));
      if (rng.uniform() < 0.5) wv.fy = -wv.fy;
      wv.phase = rng.uniform(0.0, kTwoPi);
      wv.amp = rng.uniform(0.5, 1.0);
    }
    struct Bump {
      double cy, cx, sigma, amp;
    };
    Bump bumps[2];
    for (auto& b : bumps) {
      b.cy = rng.uniform(0.0, double(h));
      b.cx = rng.uniform(0.0, double(w));
      b.sigma = rng.uniform(1.5, 3.0);
      b.amp = rng.uniform(0.8, 1.6) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    }
    double peak = 0.0;
    for (size_t y = 0; y < h; ++y) {
      for (size_t x = 0; x < w; ++x) {
        double v = 0.0;
        for (const auto& wv : waves) {
          v += wv.amp * std::sin(kTwoPi * (wv.fy * double(y) / double(h) +
                                           wv.fx * double(x) / double(w)) +
                                 wv.phase);
        }
        for (const auto& b : bumps) {
          // wrap-around distance so shifted copies stay on-pattern
          double dy = std::fabs(double(y) - b.cy);
          dy = std::min(dy, double(h) - dy);
          double dx = std::fabs(double(x) - b.cx);
          dx = std::min(dx, double(w) - dx);
          v += b.amp * std::exp(-(dy * dy + dx * dx) / (2.0 * b.sigma * b.sigma));
        }
        t[(ch * h + y) * w + x] = v;
        peak = std::max(peak, std::fabs(v));
      }
    }
    if (peak > 0.0) {
      for (size_t y = 0; y < h; ++y) {
        for (size_t x = 0; x < w; ++x) t[(ch * h + y) * w + x] /= peak;
      }
    }
  }
  return t;
}

}  // namespace

Tensor Dataset::example(size_t i) const {
  const auto s = example_shape();
  const size_t stride = s[0] * s[1] * s[2];
  Tensor t({s[0], s[1], s[2]});
  std::copy(images.data.begin() + i * stride, images.data.begin() + (i + 1) * stride,
            t.data.begin());
  return t;
}

Dataset gen_dataset(uint64_t seed, size_t n, size_t classes,
                    std::array<size_t, 3> shape, Split split) {
  const auto [c, h, w] = shape;
  if (n == 0 || classes == 0 || c == 0 || h == 0 || w == 0) {
    throw Error(ErrorKind::InvalidArgument, "gen_dataset: counts and dims must be positive");
  }
  if (n % classes != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "gen_dataset: n must be divisible by the class count");
  }

  // Templates depend on the seed only, so train/test splits share classes.
  Rng template_rng(mix(seed, 0x74656d706cULL));
  std::vector<std::vector<double>> templates(classes);
  for (size_t k = 0; k < classes; ++k) {
    templates[k] = make_template(template_rng, c, h, w);
  }

  Rng sample_rng(mix(mix(seed, 0x73616d70ULL), split == Split::Train ? 1 : 2));

  Dataset ds;
  ds.images = Tensor({n, c, h, w});
  ds.labels.resize(n);
  ds.classes = classes;
  ds.split = split;
  ds.seed = seed;

  const size_t stride = c * h * w;
  for (size_t i = 0; i < n; ++i) {
    const size_t label = i % classes;
    ds.labels[i] = static_cast<uint16_t>(label);
    const auto& tpl = templates[label];
    const int dy = int(sample_rng.index(2 * kMaxShift + 1)) - kMaxShift;
    const int dx = int(sample_rng.index(2 * kMaxShift + 1)) - kMaxShift;
    double* img = &ds.images.data[i * stride];
    for (size_t ch = 0; ch < c; ++ch) {
      for (size_t y = 0; y < h; ++y) {
        const size_t sy = size_t((int(y) - dy + int(h)) % int(h));
        for (size_t x = 0; x < w; ++x) {
          const size_t sx = size_t((int(x) - dx + int(w)) % int(w));
          double v = 0.5 + kTemplateAmplitude * tpl[(ch * h + sy) * w + sx];
          v += sample_rng.uniform(-kPixelNoise, kPixelNoise);
          img[(ch * h + y) * w + x] = std::min(1.0, std::max(0.0, v));
        }
      }
    }
  }
  return ds;
}

Tensor quantize_8bit(const Tensor& x) {
  Tensor q(x.shape);
  for (size_t i = 0; i < x.numel(); ++i) {
    const double v = x.data[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "quantize_8bit: pixel " + std::to_string(v) + " outside [0,1]");
    }
    q.data[i] = std::round(255.0 * v) / 255.0;
  }
  return q;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  binio::Writer w(path);
  w.magic("XFD1");
  const auto s = ds.example_shape();
  w.u32(static_cast<uint32_t>(ds.size()));
  w.u32(static_cast<uint32_t>(ds.classes));
  w.u32(static_cast<uint32_t>(s[0]));
  w.u32(static_cast<uint32_t>(s[1]));
  w.u32(static_cast<uint32_t>(s[2]));
  w.u64(ds.seed);
  for (uint16_t l : ds.labels) w.u16(l);
  w.f64s(ds.images.data);
  w.close();
}

Dataset load_dataset(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("XFD1");
  const size_t n = r.u32();
  Dataset ds;
  ds.classes = r.u32();
  const size_t c = r.u32(), h = r.u32(), w = r.u32();
  ds.seed = r.u64();
  if (n == 0 || ds.classes == 0 || c == 0 || h == 0 || w == 0) {
    throw Error(ErrorKind::Format, path + ": empty dataset header");
  }
  ds.labels.resize(n);
  for (auto& l : ds.labels) {
    l = r.u16();
    if (l >= ds.classes) {
      throw Error(ErrorKind::Format, path + " at byte " + std::to_string(r.offset()) +
                                         ": label out of range");
    }
  }
  ds.images = Tensor({n, c, h, w});
  for (auto& v : ds.images.data) v = r.f64();
  return ds;
}

}  // namespace xferlab::data
