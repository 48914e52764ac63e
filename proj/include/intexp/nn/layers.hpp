#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "intexp/nn/tensor.hpp"

namespace intexp::nn {

template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value, grad;
  Tensor<T> m, v;  // optimizer moments
  bool trainable = true;

  Param(std::string n, Shape s) : name(std::move(n)), value(s), grad(s), m(s), v(s) {}
};

template <typename T>
void init_uniform(Tensor<T>& t, double bound, Rng& rng) {
  for (auto& x : t.data) x = static_cast<T>(rng.uniform(-bound, bound));
}

// Random orthogonal rows (rows x cols block starting at `offset` rows), scaled by gain.
template <typename T>
void init_orthogonal(Tensor<T>& t, int row_offset, int rows, int cols, double gain, Rng& rng) {
  Eigen::MatrixXd a(std::max(rows, cols), std::min(rows, cols));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  // Sign fix so the result is uniformly distributed.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
  for (int j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) *= -1;
  if (rows < cols) q.transposeInPlace();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      t.data[static_cast<size_t>(row_offset + i) * cols + j] = static_cast<T>(gain * q(i, j));
}

// Base class. forward() records what backward() needs on a per-layer stack, so
// a layer applied k times (e.g. once per time step) is differentiated by k
// backward calls in reverse order.
template <typename T>
class Layer {
 public:
  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;
  Layer(const Layer&) = delete;
  Layer& operator=(const Layer&) = delete;

  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  virtual Tensor<T> backward(const Tensor<T>& gy) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual void clear_cache() = 0;
  // When false, forward() keeps no state (inference).
  virtual void set_record(bool on) { record_ = on; }

  const std::string& name() const { return name_; }

 protected:
  template <typename C>
  C pop(std::vector<C>& stack) {
    if (stack.empty()) throw UsageError(name_ + ": backward called without a matching forward");
    C c = std::move(stack.back());
    stack.pop_back();
    return c;
  }
  void expect_rank(const Tensor<T>& x, int rank) const {
    if (x.rank() != rank)
      throw DimensionError(name_ + ": expected rank " + std::to_string(rank) + " input, got " + shape_str(x.shape));
  }

  std::string name_;
  bool record_ = true;
};

// ---------------------------------------------------------------------------

template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(std::string name, int in, int out, Rng& rng, double init_scale = 1.0)
      : Layer<T>(std::move(name)), in_(in), out_(out), w_(this->name_ + ".weight", {out, in}),
        b_(this->name_ + ".bias", {out}) {
    const double bound = init_scale / std::sqrt(static_cast<double>(in));
    init_uniform(w_.value, bound, rng);
    init_uniform(b_.value, bound, rng);
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    this->expect_rank(x, 2);
    if (x.dim(1) != in_)
      throw DimensionError(this->name_ + ": expected " + std::to_string(in_) + " features, got " + shape_str(x.shape));
    const int n = x.dim(0);
    Tensor<T> y({n, out_});
    MatMap<T> Y(y.ptr(), n, out_);
    Y.noalias() = ConstMatMap<T>(x.ptr(), n, in_) * ConstMatMap<T>(w_.value.ptr(), out_, in_).transpose();
    Y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_.value.ptr(), out_);
    if (this->record_) cache_.push_back(x);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const Tensor<T> x = this->pop(cache_);
    const int n = x.dim(0);
    ConstMatMap<T> G(gy.ptr(), n, out_);
    ConstMatMap<T> X(x.ptr(), n, in_);
    MatMap<T>(w_.grad.ptr(), out_, in_).noalias() += G.transpose() * X;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_.grad.ptr(), out_) += G.colwise().sum();
    Tensor<T> gx({n, in_});
    MatMap<T>(gx.ptr(), n, in_).noalias() = G * ConstMatMap<T>(w_.value.ptr(), out_, in_);
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&w_, &b_}; }
  Shape output_shape(const Shape& in) const override { return {in.at(0), out_}; }
  void clear_cache() override { cache_.clear(); }

  Param<T>& weight() { return w_; }
  Param<T>& bias() { return b_; }

 private:
  int in_, out_;
  Param<T> w_, b_;
  std::vector<Tensor<T>> cache_;
};

// ---------------------------------------------------------------------------

template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng)
      : Layer<T>(std::move(name)), c_(in_ch), oc_(out_ch), k_(kernel), s_(stride), p_(pad),
        w_(this->name_ + ".weight", {out_ch, in_ch, kernel, kernel}), b_(this->name_ + ".bias", {out_ch}) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch * kernel * kernel));
    init_uniform(w_.value, bound, rng);
    init_uniform(b_.value, bound, rng);
  }

  int out_size(int in) const { return (in + 2 * p_ - k_) / s_ + 1; }

  // First layers of a network can skip the input gradient; backward then
  // returns an empty tensor.
  void set_input_grad(bool on) { input_grad_ = on; }

  Shape output_shape(const Shape& in) const override {
    return {in.at(0), oc_, out_size(in.at(2)), out_size(in.at(3))};
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    this->expect_rank(x, 4);
    if (x.dim(1) != c_)
      throw DimensionError(this->name_ + ": expected " + std::to_string(c_) + " channels, got " + shape_str(x.shape));
    if (x.dim(2) + 2 * p_ < k_ || x.dim(3) + 2 * p_ < k_)
      throw DimensionError(this->name_ + ": input " + shape_str(x.shape) + " smaller than kernel");
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const int oh = out_size(h), ow = out_size(w), P = oh * ow, K = c_ * k_ * k_;
    Tensor<T> y({n, oc_, oh, ow});
    ConstMatMap<T> W(w_.value.ptr(), oc_, K);
    const int chunk = chunk_size(K, P);
    Buffer<T> cols, out;
    for (int b0 = 0; b0 < n; b0 += chunk) {
      const int bn = std::min(chunk, n - b0);
      im2col(x, b0, bn, oh, ow, cols);
      out.resize(static_cast<size_t>(oc_) * bn * P);
      MatMap<T> Y(out.data(), oc_, bn * P);
      Y.noalias() = W * ConstMatMap<T>(cols.data(), K, bn * P);
      for (int b = 0; b < bn; ++b)
        for (int o = 0; o < oc_; ++o) {
          const T bias = b_.value[static_cast<size_t>(o)];
          const T* src = out.data() + static_cast<size_t>(o) * bn * P + static_cast<size_t>(b) * P;
          T* dst = y.ptr() + (static_cast<size_t>(b0 + b) * oc_ + o) * P;
          for (int i = 0; i < P; ++i) dst[i] = src[i] + bias;
        }
    }
    if (this->record_) cache_.push_back(x);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const Tensor<T> x = this->pop(cache_);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const int oh = out_size(h), ow = out_size(w), P = oh * ow, K = c_ * k_ * k_;
    Tensor<T> gx(input_grad_ ? x.shape : Shape{0});
    ConstMatMap<T> W(w_.value.ptr(), oc_, K);
    MatMap<T> GW(w_.grad.ptr(), oc_, K);
    const int chunk = chunk_size(K, P);
    Buffer<T> cols, g, dcols;
    for (int b0 = 0; b0 < n; b0 += chunk) {
      const int bn = std::min(chunk, n - b0);
      im2col(x, b0, bn, oh, ow, cols);
      g.resize(static_cast<size_t>(oc_) * bn * P);
      for (int b = 0; b < bn; ++b)
        for (int o = 0; o < oc_; ++o) {
          const T* src = gy.ptr() + (static_cast<size_t>(b0 + b) * oc_ + o) * P;
          T* dst = g.data() + static_cast<size_t>(o) * bn * P + static_cast<size_t>(b) * P;
          std::copy_n(src, P, dst);
        }
      ConstMatMap<T> G(g.data(), oc_, bn * P);
      GW.noalias() += G * ConstMatMap<T>(cols.data(), K, bn * P).transpose();
      for (int o = 0; o < oc_; ++o) b_.grad[static_cast<size_t>(o)] += G.row(o).sum();
      if (!input_grad_) continue;
      dcols.resize(static_cast<size_t>(K) * bn * P);
      MatMap<T>(dcols.data(), K, bn * P).noalias() = W.transpose() * G;
      col2im(dcols, b0, bn, oh, ow, gx);
    }
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&w_, &b_}; }
  void clear_cache() override { cache_.clear(); }

 private:
  static int chunk_size(int K, int P) {
    const long budget = 1L << 22;  // elements of the column buffer
    return static_cast<int>(std::max<long>(1, budget / (static_cast<long>(K) * P)));
  }

  // cols: [K, bn*P], row r = (c, ki, kj), column = b*P + oh*ow_ + ow.
  void im2col(const Tensor<T>& x, int b0, int bn, int oh, int ow, Buffer<T>& cols) const {
    const int h = x.dim(2), w = x.dim(3), P = oh * ow;
    cols.assign(static_cast<size_t>(c_) * k_ * k_ * bn * P, T(0));
    for (int c = 0; c < c_; ++c)
      for (int ki = 0; ki < k_; ++ki)
        for (int kj = 0; kj < k_; ++kj) {
          T* row = cols.data() + static_cast<size_t>((c * k_ + ki) * k_ + kj) * bn * P;
          for (int b = 0; b < bn; ++b) {
            const T* img = x.ptr() + (static_cast<size_t>(b0 + b) * c_ + c) * h * w;
            T* dst = row + static_cast<size_t>(b) * P;
            for (int i = 0; i < oh; ++i) {
              const int ih = i * s_ + ki - p_;
              if (ih < 0 || ih >= h) continue;
              const T* src = img + static_cast<size_t>(ih) * w;
              for (int j = 0; j < ow; ++j) {
                const int iw = j * s_ + kj - p_;
                if (iw >= 0 && iw < w) dst[i * ow + j] = src[iw];
              }
            }
          }
        }
  }

  void col2im(const Buffer<T>& cols, int b0, int bn, int oh, int ow, Tensor<T>& gx) const {
    const int h = gx.dim(2), w = gx.dim(3), P = oh * ow;
    for (int c = 0; c < c_; ++c)
      for (int ki = 0; ki < k_; ++ki)
        for (int kj = 0; kj < k_; ++kj) {
          const T* row = cols.data() + static_cast<size_t>((c * k_ + ki) * k_ + kj) * bn * P;
          for (int b = 0; b < bn; ++b) {
            T* img = gx.ptr() + (static_cast<size_t>(b0 + b) * c_ + c) * h * w;
            const T* src = row + static_cast<size_t>(b) * P;
            for (int i = 0; i < oh; ++i) {
              const int ih = i * s_ + ki - p_;
              if (ih < 0 || ih >= h) continue;
              T* dst = img + static_cast<size_t>(ih) * w;
              for (int j = 0; j < ow; ++j) {
                const int iw = j * s_ + kj - p_;
                if (iw >= 0 && iw < w) dst[iw] += src[i * ow + j];
              }
            }
          }
        }
  }

  int c_, oc_, k_, s_, p_;
  bool input_grad_ = true;
  Param<T> w_, b_;
  std::vector<Tensor<T>> cache_;
};

// ---------------------------------------------------------------------------
// Elementwise activations

enum class Activation { Identity, ReLU, ELU, Sigmoid, Tanh };

template <typename T>
class Elementwise : public Layer<T> {
 public:
  Elementwise(std::string name, Activation kind) : Layer<T>(std::move(name)), kind_(kind) {}

  static T apply(Activation k, T x) {
    switch (k) {
      case Activation::ReLU: return x > T(0) ? x : T(0);
      case Activation::ELU: return x > T(0) ? x : std::expm1(x);
      case Activation::Sigmoid: return T(1) / (T(1) + std::exp(-x));
      case Activation::Tanh: return std::tanh(x);
      default: return x;
    }
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y(x.shape);
    for (size_t i = 0; i < x.size(); ++i) y.data[i] = apply(kind_, x.data[i]);
    if (this->record_) cache_.push_back({x, y});
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const auto [x, y] = this->pop(cache_);
    if (gy.shape != x.shape) throw DimensionError(this->name_ + ": gradient shape mismatch");
    Tensor<T> gx(x.shape);
    for (size_t i = 0; i < x.size(); ++i) {
      T d = T(1);
      switch (kind_) {
        case Activation::ReLU: d = x.data[i] > T(0) ? T(1) : T(0); break;
        case Activation::ELU: d = x.data[i] > T(0) ? T(1) : y.data[i] + T(1); break;
        case Activation::Sigmoid: d = y.data[i] * (T(1) - y.data[i]); break;
        case Activation::Tanh: d = T(1) - y.data[i] * y.data[i]; break;
        default: break;
      }
      gx.data[i] = gy.data[i] * d;
    }
    return gx;
  }

  Shape output_shape(const Shape& in) const override { return in; }
  void clear_cache() override { cache_.clear(); }

 private:
  Activation kind_;
  std::vector<std::pair<Tensor<T>, Tensor<T>>> cache_;
};

template <typename T>
class Flatten : public Layer<T> {
 public:
  explicit Flatten(std::string name) : Layer<T>(std::move(name)) {}
  Tensor<T> forward(const Tensor<T>& x) override {
    if (this->record_) cache_.push_back(x.shape);
    return x.reshaped({x.dim(0), static_cast<int>(x.size() / static_cast<size_t>(x.dim(0)))});
  }
  Tensor<T> backward(const Tensor<T>& gy) override { return gy.reshaped(this->pop(cache_)); }
  Shape output_shape(const Shape& in) const override {
    return {in.at(0), static_cast<int>(numel(in) / static_cast<size_t>(in.at(0)))};
  }
  void clear_cache() override { cache_.clear(); }

 private:
  std::vector<Shape> cache_;
};

// Nearest-neighbour 2x upsampling of NCHW tensors.
template <typename T>
class Upsample2x : public Layer<T> {
 public:
  explicit Upsample2x(std::string name) : Layer<T>(std::move(name)) {}
  Tensor<T> forward(const Tensor<T>& x) override {
    this->expect_rank(x, 4);
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor<T> y({n, c, 2 * h, 2 * w});
    for (int p = 0; p < n * c; ++p) {
      const T* src = x.ptr() + static_cast<size_t>(p) * h * w;
      T* dst = y.ptr() + static_cast<size_t>(p) * 4 * h * w;
      for (int i = 0; i < 2 * h; ++i)
        for (int j = 0; j < 2 * w; ++j) dst[i * 2 * w + j] = src[(i / 2) * w + j / 2];
    }
    if (this->record_) ++pending_;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    if (pending_ == 0) throw UsageError(this->name_ + ": backward called without a matching forward");
    --pending_;
    const int n = gy.dim(0), c = gy.dim(1), h = gy.dim(2) / 2, w = gy.dim(3) / 2;
    Tensor<T> gx({n, c, h, w});
    for (int p = 0; p < n * c; ++p) {
      const T* src = gy.ptr() + static_cast<size_t>(p) * 4 * h * w;
      T* dst = gx.ptr() + static_cast<size_t>(p) * h * w;
      for (int i = 0; i < 2 * h; ++i)
        for (int j = 0; j < 2 * w; ++j) dst[(i / 2) * w + j / 2] += src[i * 2 * w + j];
    }
    return gx;
  }
  Shape output_shape(const Shape& in) const override { return {in.at(0), in.at(1), 2 * in.at(2), 2 * in.at(3)}; }
  void clear_cache() override { pending_ = 0; }

 private:
  int pending_ = 0;
};

template <typename T>
class Sequential : public Layer<T> {
 public:
  explicit Sequential(std::string name) : Layer<T>(std::move(name)) {}

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h);
    return h;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> g = gy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }
  std::vector<Param<T>*> params() override {
    std::vector<Param<T>*> out;
    for (auto& l : layers_)
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }
  Shape output_shape(const Shape& in) const override {
    Shape s = in;
    for (const auto& l : layers_) s = l->output_shape(s);
    return s;
  }
  void clear_cache() override {
    for (auto& l : layers_) l->clear_cache();
  }
  void set_record(bool on) override {
    Layer<T>::set_record(on);
    for (auto& l : layers_) l->set_record(on);
  }
  size_t size() const { return layers_.size(); }
  Layer<T>& at(size_t i) { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// ---------------------------------------------------------------------------
// Gated recurrent cell (reset, update, new gate ordering).

template <typename T>
class GRUCell {
 public:
  GRUCell(std::string name, int input, int hidden, Rng& rng)
      : name_(std::move(name)), in_(input), hid_(hidden), w_ih_(name_ + ".weight_ih", {3 * hidden, input}),
        w_hh_(name_ + ".weight_hh", {3 * hidden, hidden}), b_ih_(name_ + ".bias_ih", {3 * hidden}),
        b_hh_(name_ + ".bias_hh", {3 * hidden}) {
    init_uniform(w_ih_.value, 1.0 / std::sqrt(static_cast<double>(input)), rng);
    for (int g = 0; g < 3; ++g) init_orthogonal(w_hh_.value, g * hidden, hidden, hidden, 1.0, rng);
  }

  const std::string& name() const { return name_; }
  int hidden() const { return hid_; }
  void set_record(bool on) { record_ = on; }
  void clear_cache() { cache_.clear(); }

  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& h) {
    if (x.rank() != 2 || x.dim(1) != in_ || h.rank() != 2 || h.dim(1) != hid_ || h.dim(0) != x.dim(0))
      throw DimensionError(name_ + ": bad shapes x=" + shape_str(x.shape) + " h=" + shape_str(h.shape));
    const int n = x.dim(0), H = hid_;
    Tensor<T> gi({n, 3 * H}), gh({n, 3 * H});
    MatMap<T>(gi.ptr(), n, 3 * H).noalias() =
        ConstMatMap<T>(x.ptr(), n, in_) * ConstMatMap<T>(w_ih_.value.ptr(), 3 * H, in_).transpose();
    MatMap<T>(gh.ptr(), n, 3 * H).noalias() =
        ConstMatMap<T>(h.ptr(), n, H) * ConstMatMap<T>(w_hh_.value.ptr(), 3 * H, H).transpose();
    Cache c{x, h, Tensor<T>({n, H}), Tensor<T>({n, H}), Tensor<T>({n, H}), Tensor<T>({n, H})};
    Tensor<T> out({n, H});
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < H; ++j) {
        const size_t row = static_cast<size_t>(b) * 3 * H;
        const size_t idx = static_cast<size_t>(b) * H + j;
        const T r = sigmoid(gi[row + j] + b_ih_.value[j] + gh[row + j] + b_hh_.value[j]);
        const T z = sigmoid(gi[row + H + j] + b_ih_.value[H + j] + gh[row + H + j] + b_hh_.value[H + j]);
        const T hn = gh[row + 2 * H + j] + b_hh_.value[2 * H + j];
        const T nn = std::tanh(gi[row + 2 * H + j] + b_ih_.value[2 * H + j] + r * hn);
        out[idx] = (T(1) - z) * nn + z * h[idx];
        c.r[idx] = r;
        c.z[idx] = z;
        c.n[idx] = nn;
        c.hn[idx] = hn;
      }
    if (record_) cache_.push_back(std::move(c));
    return out;
  }

  // Returns (d input, d previous hidden).
  std::pair<Tensor<T>, Tensor<T>> backward(const Tensor<T>& gout) {
    if (cache_.empty()) throw UsageError(name_ + ": backward called without a matching forward");
    const Cache c = std::move(cache_.back());
    cache_.pop_back();
    const int n = c.x.dim(0), H = hid_;
    Tensor<T> dgi({n, 3 * H}), dgh({n, 3 * H}), dh({n, H});
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < H; ++j) {
        const size_t idx = static_cast<size_t>(b) * H + j;
        const size_t row = static_cast<size_t>(b) * 3 * H;
        const T g = gout[idx], r = c.r[idx], z = c.z[idx], nn = c.n[idx];
        const T dn = g * (T(1) - z);
        const T dz = g * (c.h[idx] - nn);
        dh[idx] = g * z;
        const T dn_pre = dn * (T(1) - nn * nn);
        const T dr = dn_pre * c.hn[idx];
        const T dz_pre = dz * z * (T(1) - z);
        const T dr_pre = dr * r * (T(1) - r);
        dgi[row + j] = dr_pre;
        dgi[row + H + j] = dz_pre;
        dgi[row + 2 * H + j] = dn_pre;
        dgh[row + j] = dr_pre;
        dgh[row + H + j] = dz_pre;
        dgh[row + 2 * H + j] = dn_pre * r;
      }
    ConstMatMap<T> DGI(dgi.ptr(), n, 3 * H), DGH(dgh.ptr(), n, 3 * H);
    MatMap<T>(w_ih_.grad.ptr(), 3 * H, in_).noalias() += DGI.transpose() * ConstMatMap<T>(c.x.ptr(), n, in_);
    MatMap<T>(w_hh_.grad.ptr(), 3 * H, H).noalias() += DGH.transpose() * ConstMatMap<T>(c.h.ptr(), n, H);
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_ih_.grad.ptr(), 3 * H) += DGI.colwise().sum();
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_hh_.grad.ptr(), 3 * H) += DGH.colwise().sum();
    Tensor<T> dx({n, in_});
    MatMap<T>(dx.ptr(), n, in_).noalias() = DGI * ConstMatMap<T>(w_ih_.value.ptr(), 3 * H, in_);
    MatMap<T>(dh.ptr(), n, H).noalias() += DGH * ConstMatMap<T>(w_hh_.value.ptr(), 3 * H, H);
    return {std::move(dx), std::move(dh)};
  }

  std::vector<Param<T>*> params() { return {&w_ih_, &w_hh_, &b_ih_, &b_hh_}; }

 private:
  static T sigmoid(T v) { return T(1) / (T(1) + std::exp(-v)); }

  struct Cache {
    Tensor<T> x, h, r, z, n, hn;
  };
  std::string name_;
  int in_, hid_;
  Param<T> w_ih_, w_hh_, b_ih_, b_hh_;
  std::vector<Cache> cache_;
  bool record_ = true;
};

template <typename T>
void zero_grads(const std::vector<Param<T>*>& ps) {
  for (auto* p : ps) p->grad.zero();
}

}  // namespace intexp::nn
