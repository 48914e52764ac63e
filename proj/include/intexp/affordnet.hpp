#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "intexp/markers.hpp"
#include "intexp/nn/adam.hpp"
#include "intexp/nn/layers.hpp"
#include "intexp/nn/loss.hpp"

namespace intexp {

// Encoder-decoder with skip connections. Three stride-2 encoder stages
// (32/64/128 channels), decoder stages of width 128/64/32, and two 1x1 heads
// producing per-interaction logits: head A (interaction succeeds) and head I
// (region is never interacted with).
template <typename T>
class AffordanceNet {
 public:
  AffordanceNet(int in_channels, Rng& rng)
      : in_ch_(in_channels),
        e1_("afford.enc1", in_channels, 32, 4, 2, 1, rng),
        e2_("afford.enc2", 32, 64, 4, 2, 1, rng),
        e3_("afford.enc3", 64, 128, 4, 2, 1, rng),
        d3_("afford.dec3", 128, 128, 3, 1, 1, rng),
        d2_("afford.dec2", 128 + 64, 64, 1, 1, 0, rng),
        d1_("afford.dec1", 64 + 32, 32, 1, 1, 0, rng),
        head_a_("afford.head_a", 32, kNumInteractions, 1, 1, 0, rng),
        head_i_("afford.head_i", 32, kNumInteractions, 1, 1, 0, rng),
        r1_("afford.relu1", nn::Activation::ReLU), r2_("afford.relu2", nn::Activation::ReLU),
        r3_("afford.relu3", nn::Activation::ReLU), r4_("afford.relu4", nn::Activation::ReLU),
        r5_("afford.relu5", nn::Activation::ReLU), r6_("afford.relu6", nn::Activation::ReLU),
        up3_("afford.up3"), up2_("afford.up2"), up_a_("afford.up_a"), up_i_("afford.up_i") {}

  int in_channels() const { return in_ch_; }

  struct Output {
    nn::Tensor<T> logits_a, logits_i;  // [N, K, H, W]
  };

  Output forward(const nn::Tensor<T>& x) {
    if (x.rank() != 4 || x.dim(1) != in_ch_ || x.dim(2) % 8 || x.dim(3) % 8)
      throw DimensionError("afford.enc1: expected [N," + std::to_string(in_ch_) +
                           ",H,W] with H, W divisible by 8, got " + nn::shape_str(x.shape));
    const auto f1 = r1_.forward(e1_.forward(x));
    const auto f2 = r2_.forward(e2_.forward(f1));
    const auto f3 = r3_.forward(e3_.forward(f2));
    const auto g3 = r4_.forward(d3_.forward(f3));
    const auto g2 = r5_.forward(d2_.forward(nn::concat_channels(up3_.forward(g3), f2)));
    const auto g1 = r6_.forward(d1_.forward(nn::concat_channels(up2_.forward(g2), f1)));
    // 1x1 convolutions commute with nearest upsampling, so the heads run at
    // half resolution and their logits are upsampled.
    return {up_a_.forward(head_a_.forward(g1)), up_i_.forward(head_i_.forward(g1))};
  }

  // Returns the input gradient.
  nn::Tensor<T> backward(const nn::Tensor<T>& grad_a, const nn::Tensor<T>& grad_i) {
    auto g1 = head_a_.backward(up_a_.backward(grad_a));
    nn::add_into(g1, head_i_.backward(up_i_.backward(grad_i)));
    auto [gu2, gf1] = nn::split_channels(d1_.backward(r6_.backward(g1)), 64);
    auto [gu3, gf2] = nn::split_channels(d2_.backward(r5_.backward(up2_.backward(gu2))), 128);
    auto gf3 = d3_.backward(r4_.backward(up3_.backward(gu3)));
    nn::add_into(gf2, e3_.backward(r3_.backward(gf3)));
    nn::add_into(gf1, e2_.backward(r2_.backward(gf2)));
    return e1_.backward(r1_.backward(gf1));
  }

  std::vector<nn::Param<T>*> params() {
    std::vector<nn::Param<T>*> out;
    for (nn::Layer<T>* l : layers())
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }

  void set_record(bool on) {
    for (nn::Layer<T>* l : layers()) l->set_record(on);
  }
  void clear_cache() {
    for (nn::Layer<T>* l : layers()) l->clear_cache();
  }

 private:
  std::vector<nn::Layer<T>*> layers() {
    return {&e1_, &e2_, &e3_, &d3_, &d2_, &d1_, &head_a_, &head_i_, &r1_, &r2_,  &r3_,
            &r4_, &r5_, &r6_, &up3_, &up2_, &up_a_, &up_i_};
  }

  int in_ch_;
  nn::Conv2d<T> e1_, e2_, e3_, d3_, d2_, d1_, head_a_, head_i_;
  nn::Elementwise<T> r1_, r2_, r3_, r4_, r5_, r6_;
  nn::Upsample2x<T> up3_, up2_, up_a_, up_i_;
};

// Inverse-frequency weights per (interaction channel, label).
//   a[k][z]: term 1, z in {0 = fails, 1 = succeeds}, over labeled pixels.
//   i[k][z]: term 2, z in {0 = labeled, 1 = unlabeled}, over all pixels.
// Each weight is total / (2 * count); absent classes get weight 1.
struct ClassWeights {
  std::array<std::array<double, 2>, kNumInteractions> a{}, i{};
  static ClassWeights uniform();
};

ClassWeights compute_class_weights(const std::vector<DatasetEntry>& data);
ClassWeights compute_class_weights(const std::vector<const LabelMask*>& masks);

template <typename T>
struct AffordanceLoss {
  double total = 0, term_a = 0, term_i = 0;
  nn::Tensor<T> grad_a, grad_i;
};

// Two-term loss over [N, K, H, W] logits. Term 1: weighted BCE of head A
// against y on pixels with y != -1, normalized by the number of such pixels.
// Term 2: weighted BCE of head I against [y == -1] on all pixels, normalized by
// the pixel count. `labels` is the concatenation of the batch's masks.
template <typename T>
AffordanceLoss<T> affordance_loss(const nn::Tensor<T>& logits_a, const nn::Tensor<T>& logits_i,
                                  const std::vector<std::int8_t>& labels, const ClassWeights& w) {
  if (logits_a.shape != logits_i.shape || logits_a.rank() != 4 || logits_a.dim(1) != kNumInteractions ||
      labels.size() != logits_a.size())
    throw DimensionError("affordance loss: shape mismatch " + nn::shape_str(logits_a.shape) + " / " +
                         nn::shape_str(logits_i.shape) + " / " + std::to_string(labels.size()) + " labels");
  const size_t n = logits_a.size();
  const size_t plane = static_cast<size_t>(logits_a.dim(2)) * logits_a.dim(3);
  std::vector<T> ta(n), wa(n), ti(n), wi(n);
  size_t labeled = 0;
  for (size_t idx = 0; idx < n; ++idx) {
    const int y = labels[idx];
    if (y < -1 || y > 1) throw DataError("label mask value " + std::to_string(y) + " outside {-1, 0, 1}");
    const int k = static_cast<int>((idx / plane) % kNumInteractions);
    if (y != -1) {
      ta[idx] = static_cast<T>(y);
      wa[idx] = static_cast<T>(w.a[k][y]);
      ++labeled;
    }
    ti[idx] = y == -1 ? T(1) : T(0);
    wi[idx] = static_cast<T>(w.i[k][y == -1 ? 1 : 0]);
  }
  AffordanceLoss<T> out;
  if (labeled > 0) {
    auto la = nn::bce_with_logits(logits_a, ta, wa, static_cast<double>(labeled));
    out.term_a = la.value;
    out.grad_a = std::move(la.grad);
  } else {
    out.grad_a = nn::Tensor<T>(logits_a.shape);
  }
  auto li = nn::bce_with_logits(logits_i, ti, wi, static_cast<double>(n));
  out.term_i = li.value;
  out.grad_i = std::move(li.grad);
  out.total = out.term_a + out.term_i;
  return out;
}

// y = sigmoid(a) * (1 - sigmoid(i)).
inline double fuse_scores(double logit_a, double logit_i) {
  return nn::sigmoid(logit_a) * (1.0 - nn::sigmoid(logit_i));
}

struct AffordanceConfig {
  bool use_depth = false;  // RGB-D input instead of RGB
  int batch_size = 16;
  int epochs = 20;
  double lr = 1e-4;
  double lr_decayed = 1e-5;
  int decay_epoch = 18;
  std::uint64_t seed = 0;
};

// Network input for one observation: RGB in [-0.5, 0.5], optional depth / 5 m.
void frame_to_input(const Frame& frame, bool use_depth, float* out);
void entry_to_input(const DatasetEntry& entry, bool use_depth, int width, int height, float* out);

class AffordanceModel {
 public:
  explicit AffordanceModel(const AffordanceConfig& cfg = {});

  const AffordanceConfig& config() const { return cfg_; }
  AffordanceNet<float>& net() { return net_; }

  // Fused scores, K x H x W in (0, 1).
  std::vector<float> predict(const Frame& frame);
  std::vector<std::vector<float>> predict(const std::vector<const Frame*>& frames);

  // Per-epoch mean loss. Throws TrainingError on an empty dataset.
  std::vector<double> train(const std::vector<DatasetEntry>& data, const std::vector<DatasetEntry>* validation = nullptr,
                            std::vector<double>* val_losses = nullptr);

  double evaluate_loss(const std::vector<DatasetEntry>& data, const ClassWeights& w);

  void save(const std::string& path);
  void load(const std::string& path);

 private:
  nn::Tensor<float> batch_input(const std::vector<const DatasetEntry*>& batch) const;

  AffordanceConfig cfg_;
  Rng init_rng_;
  AffordanceNet<float> net_;
};

// One 8-bit PGM per interaction channel: <prefix>_<action>.pgm.
void write_heatmaps(const std::string& prefix, const std::vector<float>& scores, int width = kFrameWidth,
                    int height = kFrameHeight);

}  // namespace intexp
