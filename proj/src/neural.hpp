#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"

namespace hexgraph {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major storage with an explicit shape, used for checkpoints.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;
};

template <class T>
struct Param {
  std::string name;
  Mat<T> value;
  Mat<T> grad;

  Param() = default;
  Param(std::string n, int rows, int cols)
      : name(std::move(n)), value(Mat<T>::Zero(rows, cols)), grad(Mat<T>::Zero(rows, cols)) {}
};

template <class T>
void glorot_uniform(Mat<T>& w, int fan_in, int fan_out, std::mt19937_64& rng, double scale = 1.0) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out)) * scale;
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(dist(rng));
}

template <class T>
void require_finite(const Mat<T>& m, const char* where) {
  if (!m.allFinite()) fail(ErrorCode::kInvalidState, std::string("non-finite values in ") + where);
}

// ---------------------------------------------------------------- activations

template <class T>
Mat<T> relu(const Mat<T>& x) {
  return x.cwiseMax(T(0));
}

// dy masked by the sign of the pre-activation.
template <class T>
Mat<T> relu_backward(const Mat<T>& dy, const Mat<T>& pre) {
  return (pre.array() > T(0)).select(dy, T(0));
}

// Softmax in double precision.
template <class T>
std::vector<double> softmax(const std::vector<T>& logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += p[i] = std::exp(logits[i] - top);
  for (double& x : p) x /= sum;
  return p;
}

// ---------------------------------------------------------------------- dense

template <class T>
class Dense {
 public:
  struct Cache {
    Mat<T> x;
  };

  Dense() = default;
  Dense(const std::string& name, int in, int out)
      : w(name + ".w", in, out), b(name + ".b", 1, out) {}

  int in() const { return static_cast<int>(w.value.rows()); }
  int out() const { return static_cast<int>(w.value.cols()); }

  void init(std::mt19937_64& rng, double scale = 1.0) {
    glorot_uniform(w.value, in(), out(), rng, scale);
    b.value.setZero();
  }

  Mat<T> forward(const Mat<T>& x, Cache* cache) const {
    require(x.cols() == in(), ErrorCode::kInvalidArgument, "dense: input width mismatch");
    if (cache) cache->x = x;
    Mat<T> y = x * w.value;
    y.rowwise() += b.value.row(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    w.grad.noalias() += cache.x.transpose() * dy;
    b.grad.row(0) += dy.colwise().sum();
    return dy * w.value.transpose();
  }

  std::vector<Param<T>*> parameters() { return {&w, &b}; }

  Param<T> w;
  Param<T> b;
};

// ------------------------------------------------------------- graph structure

// Disjoint union of graphs in compressed adjacency form.
struct Csr {
  int num_nodes = 0;
  std::vector<int> offsets{0};  // size num_nodes + 1
  std::vector<int> neighbors;

  int degree(int v) const { return offsets[v + 1] - offsets[v]; }

  static Csr from_edges(int num_nodes, const std::vector<std::pair<int, int>>& directed) {
    Csr g;
    g.num_nodes = num_nodes;
    g.offsets.assign(num_nodes + 1, 0);
    for (auto [a, b] : directed) {
      require(a >= 0 && b >= 0 && a < num_nodes && b < num_nodes, ErrorCode::kInvalidArgument,
              "edge id out of range");
      ++g.offsets[a + 1];
    }
    for (int v = 0; v < num_nodes; ++v) g.offsets[v + 1] += g.offsets[v];
    g.neighbors.resize(directed.size());
    std::vector<int> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (auto [a, b] : directed) g.neighbors[fill[a]++] = b;
    return g;
  }
};

// Mean over neighbours, accumulated in double. Isolated nodes get zeros.
template <class T>
Mat<T> mean_aggregate(const Csr& g, const Mat<T>& h) {
  Mat<T> m(h.rows(), h.cols());
  Eigen::Matrix<double, 1, Eigen::Dynamic> acc(h.cols());
  for (int v = 0; v < g.num_nodes; ++v) {
    acc.setZero();
    const int deg = g.degree(v);
    for (int k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      acc += h.row(g.neighbors[k]).template cast<double>();
    }
    if (deg > 0) acc /= deg;
    m.row(v) = acc.template cast<T>();
  }
  return m;
}

// Adjoint of mean_aggregate.
template <class T>
Mat<T> mean_aggregate_backward(const Csr& g, const Mat<T>& dm) {
  Mat<T> dh = Mat<T>::Zero(dm.rows(), dm.cols());
  for (int v = 0; v < g.num_nodes; ++v) {
    const int deg = g.degree(v);
    if (deg == 0) continue;
    const T inv = T(1) / T(deg);
    for (int k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      dh.row(g.neighbors[k]) += inv * dm.row(v);
    }
  }
  return dh;
}

// h'_v = h_v Ws + mean_{u in N(v)} h_u Wn + b (no activation).
template <class T>
class SageConv {
 public:
  struct Cache {
    Mat<T> h;
    Mat<T> m;
  };

  SageConv() = default;
  SageConv(const std::string& name, int in, int out)
      : w_self(name + ".w_self", in, out),
        w_neigh(name + ".w_neigh", in, out),
        b(name + ".b", 1, out) {}

  int in() const { return static_cast<int>(w_self.value.rows()); }
  int out() const { return static_cast<int>(w_self.value.cols()); }

  void init(std::mt19937_64& rng, double scale = 1.0) {
    glorot_uniform(w_self.value, in(), out(), rng, scale);
    glorot_uniform(w_neigh.value, in(), out(), rng, scale);
    b.value.setZero();
  }

  Mat<T> forward(const Csr& g, const Mat<T>& h, Cache* cache) const {
    require(h.rows() == g.num_nodes && h.cols() == in(), ErrorCode::kInvalidArgument,
            "sage_conv: feature shape mismatch");
    Mat<T> m = mean_aggregate(g, h);
    Mat<T> y = h * w_self.value;
    y.noalias() += m * w_neigh.value;
    y.rowwise() += b.value.row(0);
    if (cache) {
      cache->h = h;
      cache->m = std::move(m);
    }
    return y;
  }

  Mat<T> backward(const Csr& g, const Mat<T>& dy, const Cache& cache) {
    w_self.grad.noalias() += cache.h.transpose() * dy;
    w_neigh.grad.noalias() += cache.m.transpose() * dy;
    b.grad.row(0) += dy.colwise().sum();
    Mat<T> dh = dy * w_self.value.transpose();
    dh += mean_aggregate_backward<T>(g, dy * w_neigh.value.transpose());
    return dh;
  }

  std::vector<Param<T>*> parameters() { return {&w_self, &w_neigh, &b}; }

  Param<T> w_self;
  Param<T> w_neigh;
  Param<T> b;
};

// -------------------------------------------------------------------- readout

// Per segment [offsets[i], offsets[i+1]): concat(mean, max, min, sum).
template <class T>
class Readout {
 public:
  struct Cache {
    std::vector<int> offsets;
    std::vector<int> arg_max;  // segments x F
    std::vector<int> arg_min;
    int features = 0;
  };

  static Mat<T> forward(const Mat<T>& h, const std::vector<int>& offsets, Cache* cache) {
    const int f = static_cast<int>(h.cols());
    const int segs = static_cast<int>(offsets.size()) - 1;
    Mat<T> out(segs, 4 * f);
    if (cache) {
      cache->offsets = offsets;
      cache->features = f;
      cache->arg_max.assign(static_cast<std::size_t>(segs) * f, 0);
      cache->arg_min.assign(static_cast<std::size_t>(segs) * f, 0);
    }
    for (int s = 0; s < segs; ++s) {
      const int lo = offsets[s], hi = offsets[s + 1];
      require(hi > lo, ErrorCode::kInvalidArgument, "readout of an empty graph");
      for (int c = 0; c < f; ++c) {
        double sum = 0.0;
        int amax = lo, amin = lo;
        for (int v = lo; v < hi; ++v) {
          const T x = h(v, c);
          sum += x;
          if (x > h(amax, c)) amax = v;
          if (x < h(amin, c)) amin = v;
        }
        out(s, c) = static_cast<T>(sum / (hi - lo));
        out(s, f + c) = h(amax, c);
        out(s, 2 * f + c) = h(amin, c);
        out(s, 3 * f + c) = static_cast<T>(sum);
        if (cache) {
          cache->arg_max[static_cast<std::size_t>(s) * f + c] = amax;
          cache->arg_min[static_cast<std::size_t>(s) * f + c] = amin;
        }
      }
    }
    return out;
  }

  static Mat<T> backward(const Mat<T>& dy, const Cache& cache, int num_nodes) {
    const int f = cache.features;
    Mat<T> dh = Mat<T>::Zero(num_nodes, f);
    const int segs = static_cast<int>(cache.offsets.size()) - 1;
    for (int s = 0; s < segs; ++s) {
      const int lo = cache.offsets[s], hi = cache.offsets[s + 1];
      const T inv = T(1) / T(hi - lo);
      for (int c = 0; c < f; ++c) {
        const T spread = dy(s, c) * inv + dy(s, 3 * f + c);
        for (int v = lo; v < hi; ++v) dh(v, c) += spread;
        dh(cache.arg_max[static_cast<std::size_t>(s) * f + c], c) += dy(s, f + c);
        dh(cache.arg_min[static_cast<std::size_t>(s) * f + c], c) += dy(s, 2 * f + c);
      }
    }
    return dh;
  }
};

// ---------------------------------------------------------------------- conv2d

// Activations are [channels x (batch * height * width)].
struct ImageShape {
  int batch = 0;
  int height = 0;
  int width = 0;
  int pixels() const { return batch * height * width; }
};

// Cross-correlation with zero "same" padding. Kernel size 1 or 3.
template <class T>
class Conv2d {
 public:
  struct Cache {
    Mat<T> cols;
  };

  Conv2d() = default;
  Conv2d(const std::string& name, int in, int out, int kernel)
      : kernel_(kernel),
        in_(in),
        w(name + ".w", out, in * kernel * kernel),
        b(name + ".b", out, 1) {
    require(kernel == 1 || kernel == 3, ErrorCode::kInvalidArgument, "conv2d: kernel must be 1 or 3");
  }

  int in() const { return in_; }
  int out() const { return static_cast<int>(w.value.rows()); }
  int kernel() const { return kernel_; }

  void init(std::mt19937_64& rng, double scale = 1.0) {
    const int k2 = kernel_ * kernel_;
    glorot_uniform(w.value, in_ * k2, out() * k2, rng, scale);
    b.value.setZero();
  }

  Mat<T> im2col(const Mat<T>& x, const ImageShape& s) const {
    if (kernel_ == 1) return x;
    const int r = kernel_ / 2;
    Mat<T> cols = Mat<T>::Zero(static_cast<Eigen::Index>(in_) * 9, s.pixels());
    for (int c = 0; c < in_; ++c) {
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int row = (c * 3 + (dy + r)) * 3 + (dx + r);
          T* dst = cols.row(row).data();
          const T* src = x.row(c).data();
          for (int bi = 0; bi < s.batch; ++bi) {
            const int base = bi * s.height * s.width;
            for (int y = 0; y < s.height; ++y) {
              const int sy = y + dy;
              if (sy < 0 || sy >= s.height) continue;
              for (int xx = 0; xx < s.width; ++xx) {
                const int sx = xx + dx;
                if (sx < 0 || sx >= s.width) continue;
                dst[base + y * s.width + xx] = src[base + sy * s.width + sx];
              }
            }
          }
        }
      }
    }
    return cols;
  }

  Mat<T> col2im(const Mat<T>& dcols, const ImageShape& s) const {
    if (kernel_ == 1) return dcols;
    const int r = kernel_ / 2;
    Mat<T> dx_out = Mat<T>::Zero(in_, s.pixels());
    for (int c = 0; c < in_; ++c) {
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int row = (c * 3 + (dy + r)) * 3 + (dx + r);
          const T* src = dcols.row(row).data();
          T* dst = dx_out.row(c).data();
          for (int bi = 0; bi < s.batch; ++bi) {
            const int base = bi * s.height * s.width;
            for (int y = 0; y < s.height; ++y) {
              const int sy = y + dy;
              if (sy < 0 || sy >= s.height) continue;
              for (int xx = 0; xx < s.width; ++xx) {
                const int sx = xx + dx;
                if (sx < 0 || sx >= s.width) continue;
                dst[base + sy * s.width + sx] += src[base + y * s.width + xx];
              }
            }
          }
        }
      }
    }
    return dx_out;
  }

  Mat<T> forward(const Mat<T>& x, const ImageShape& s, Cache* cache) const {
    require(x.rows() == in_ && x.cols() == s.pixels(), ErrorCode::kInvalidArgument,
            "conv2d: input shape mismatch");
    Mat<T> cols = im2col(x, s);
    Mat<T> y = w.value * cols;
    y.colwise() += b.value.col(0);
    if (cache) cache->cols = std::move(cols);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const ImageShape& s, const Cache& cache) {
    w.grad.noalias() += dy * cache.cols.transpose();
    b.grad.col(0) += dy.rowwise().sum();
    Mat<T> dcols = w.value.transpose() * dy;
    return col2im(dcols, s);
  }

  std::vector<Param<T>*> parameters() { return {&w, &b}; }

  int kernel_ = 3;
  int in_ = 0;
  Param<T> w;
  Param<T> b;
};

// x + conv2(relu(conv1(x))).
template <class T>
class ResidualBlock {
 public:
  struct Cache {
    typename Conv2d<T>::Cache c1, c2;
    Mat<T> pre;
  };

  ResidualBlock() = default;
  ResidualBlock(const std::string& name, int channels)
      : conv1(name + ".conv1", channels, channels, 3), conv2(name + ".conv2", channels, channels, 3) {}

  void init(std::mt19937_64& rng) {
    conv1.init(rng);
    conv2.init(rng);
  }

  Mat<T> forward(const Mat<T>& x, const ImageShape& s, Cache* cache) const {
    Mat<T> pre = conv1.forward(x, s, cache ? &cache->c1 : nullptr);
    Mat<T> y = x + conv2.forward(relu(pre), s, cache ? &cache->c2 : nullptr);
    if (cache) cache->pre = std::move(pre);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const ImageShape& s, const Cache& cache) {
    Mat<T> dmid = conv2.backward(dy, s, cache.c2);
    Mat<T> dx = conv1.backward(relu_backward(dmid, cache.pre), s, cache.c1);
    dx += dy;
    return dx;
  }

  std::vector<Param<T>*> parameters() {
    auto p = conv1.parameters();
    auto q = conv2.parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  }

  Conv2d<T> conv1;
  Conv2d<T> conv2;
};

// ----------------------------------------------------------------------- adam

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

template <class T>
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }
  long step_count() const { return t_; }

  // Applies one update and zeroes the gradients.
  void step(const std::vector<Param<T>*>& params) {
    if (m_.size() != params.size()) {
      m_.clear();
      v_.clear();
      for (auto* p : params) {
        m_.push_back(Mat<double>::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Mat<double>::Zero(p->value.rows(), p->value.cols()));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Param<T>& p = *params[i];
      double* m = m_[i].data();
      double* v = v_[i].data();
      T* w = p.value.data();
      T* g = p.grad.data();
      for (Eigen::Index k = 0; k < p.value.size(); ++k) {
        const double gk = g[k];
        m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * gk;
        v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * gk * gk;
        const double mhat = m[k] / c1;
        const double vhat = v[k] / c2;
        double wk = w[k];
        wk -= config_.lr * (mhat / (std::sqrt(vhat) + config_.eps) + config_.weight_decay * wk);
        w[k] = static_cast<T>(wk);
        g[k] = T(0);
      }
    }
  }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<Mat<double>> m_;
  std::vector<Mat<double>> v_;
};

template <class T>
void zero_grads(const std::vector<Param<T>*>& params) {
  for (auto* p : params) p->grad.setZero();
}

// ----------------------------------------------------------------- grad check

// Compares analytic gradients with central differences. `loss` evaluates the
// scalar objective; `backprop` fills every grad buffer for the current values.
// Each entry in `checked` pairs a value buffer with its gradient buffer.
// Returns max |a - n| / max(|a| + |n|, 1e-6).
inline double grad_check(const std::vector<std::pair<Mat<double>*, const Mat<double>*>>& checked,
                         const std::function<double()>& loss,
                         const std::function<void()>& backprop, double h = 1e-5) {
  backprop();
  std::vector<Mat<double>> analytic;
  for (auto& [value, grad] : checked) analytic.push_back(*grad);
  double worst = 0.0;
  for (std::size_t i = 0; i < checked.size(); ++i) {
    Mat<double>& x = *checked[i].first;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double keep = x.data()[k];
      x.data()[k] = keep + h;
      const double up = loss();
      x.data()[k] = keep - h;
      const double down = loss();
      x.data()[k] = keep;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[i].data()[k];
      worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-6));
    }
  }
  return worst;
}

}  // namespace hexgraph
