#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intexp/affordnet.hpp"
#include "intexp/explore.hpp"
#include "intexp/nn/adam.hpp"
#include "intexp/nn/checkpoint.hpp"
#include "intexp/nn/layers.hpp"

namespace intexp {

struct PolicyConfig {
  bool use_affordance = true;  // second encoder over the 7-channel affordance map
  int hidden = 512;
  std::uint64_t seed = 0;
};

// Observation as stored in rollouts, quantized to 8 bits.
struct PolicyObs {
  std::vector<std::uint8_t> rgb;  // H*W*3, frame layout
  std::vector<std::uint8_t> aff;  // K*H*W; empty without affordance input
};

// Conv encoder (N->32->64->64, kernels 8/4/3, strides 4/2/1, no padding) and a
// 512-wide projection, one per input modality; fusion with ELU; GRU; linear
// actor and critic heads.
class PolicyNet {
 public:
  explicit PolicyNet(const PolicyConfig& cfg);

  const PolicyConfig& config() const { return cfg_; }
  int hidden() const { return cfg_.hidden; }

  struct StepOut {
    nn::Tensor<float> logits;    // [N, 12]
    std::vector<float> values;   // N
    nn::Tensor<float> h;         // [N, hidden] next state
    nn::Tensor<float> features;  // [N, hidden] trunk output fed to the heads
    nn::Tensor<float> rgb_code;  // [N, 512] RGB encoder output
  };

  // Batched single step without recording (rollouts and evaluation).
  StepOut step(const std::vector<const PolicyObs*>& obs, const nn::Tensor<float>& h);

  struct SeqOut {
    nn::Tensor<float> logits;  // [T, 12]
    std::vector<float> values;
  };

  // One environment's sequence. `starts[t]` zeroes the state before step t.
  // With record = true the pass can be differentiated by sequence_backward.
  SeqOut sequence(const std::vector<const PolicyObs*>& obs, const nn::Tensor<float>& h0,
                  const std::vector<std::uint8_t>& starts, bool record);
  void sequence_backward(const nn::Tensor<float>& dlogits, const std::vector<float>& dvalues);

  // Heads on precomputed trunk features (frozen-trunk fine-tuning).
  SeqOut heads(const nn::Tensor<float>& features, bool record);
  void heads_backward(const nn::Tensor<float>& dlogits, const std::vector<float>& dvalues);

  std::vector<nn::Param<float>*> params();
  std::vector<nn::Param<float>*> head_params();
  std::vector<nn::Param<float>*> trunk_params();

  void clear_cache();

  void save(const std::string& path, const nn::CheckpointMeta& meta = {});
  nn::CheckpointMeta load(const std::string& path);

 private:
  nn::Tensor<float> encode(const std::vector<const PolicyObs*>& obs, bool record);
  void set_record(bool on);

  PolicyConfig cfg_;
  Rng rng_;
  nn::Sequential<float> rgb_enc_, aff_enc_;
  nn::Dense<float> fusion_;
  nn::Elementwise<float> fusion_act_;
  nn::GRUCell<float> gru_;
  nn::Dense<float> actor_, critic_;
  // Per-sequence bookkeeping for backward.
  std::vector<std::vector<std::uint8_t>> seq_starts_;
};

// Converts a frame (and optional affordance scores / binary maps) to a
// quantized observation.
PolicyObs make_obs(const Frame& frame, const std::vector<float>* scores);
PolicyObs make_obs(const Frame& frame, const std::vector<std::uint8_t>& binary_maps);

std::vector<double> softmax(const float* logits, int n);
int sample_categorical(const std::vector<double>& probs, Rng& rng);
int argmax(const float* logits, int n);

// ---------------------------------------------------------------------------
// Clipped-surrogate optimization

struct PPOConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  int epochs = 4;
  int minibatches = 8;
  int envs = 8;
  int rollout = 256;
  double lr = 1e-4;
  double adam_eps = 1e-5;
  double max_grad_norm = 0.5;
  bool heads_only = false;  // freeze the trunk, train actor and critic only
};

struct RolloutBuffer {
  int T = 0, B = 0;
  std::vector<PolicyObs> obs;           // [t * B + b]
  std::vector<int> actions;
  std::vector<float> logp, values, rewards;
  std::vector<std::uint8_t> dones;      // episode ended after step t
  std::vector<std::uint8_t> starts;     // step t is the first of an episode
  nn::Tensor<float> h0;                 // [B, hidden] state before step 0
  std::vector<float> last_values;       // bootstrap values after step T-1
  std::vector<float> advantages, returns;
  nn::Tensor<float> features;           // [T*B, hidden], heads-only mode
  nn::Tensor<float> rgb_codes;          // [(T+1)*B, 512], curiosity only

  void allocate(int T, int B, int hidden, bool keep_features);
  size_t index(int t, int b) const { return static_cast<size_t>(t) * B + b; }
};

// Generalized advantage estimation; fills advantages and returns.
void compute_gae(RolloutBuffer& buf, double gamma, double lambda);
// Shifts and scales to zero mean and unit variance.
void normalize_advantages(std::vector<float>& adv);

struct PPOStats {
  double policy_loss = 0, value_loss = 0, entropy = 0, clip_fraction = 0, approx_kl = 0, grad_norm = 0;
  double first_ratio_max_dev = 0;  // max |ratio - 1| over the first minibatch
};

// Recomputes old log-probabilities and values through the training path, then
// runs the configured epochs of minibatch updates (one environment sequence per
// minibatch).
PPOStats ppo_update(PolicyNet& net, nn::Adam<float>& opt, RolloutBuffer& buf, const PPOConfig& cfg,
                    std::uint64_t shuffle_seed = 0);

// ---------------------------------------------------------------------------
// Training driver

enum class AffordanceSource { None, Model, GroundTruth };

struct TrainLogRow {
  long frames = 0;
  int update = 0;
  double mean_reward = 0;         // mean return of episodes finished during the rollout
  double mean_unique = 0;         // mean distinct successful (a, o) per finished episode
  double mean_task_success = 0;
  PPOStats stats;
};

class PolicyTrainer {
 public:
  PolicyTrainer(PolicyNet& net, std::vector<std::shared_ptr<const SceneSpec>> scenes, EnvConfig env,
                PPOConfig ppo, std::uint64_t seed);

  void set_affordance(AffordanceSource src, AffordanceModel* model = nullptr);
  // Runs updates until at least `frames` environment steps have been consumed.
  std::vector<TrainLogRow> train(long frames, const std::function<void(const TrainLogRow&)>& on_update = {});
  long frames() const { return frames_; }
  int updates() const { return updates_; }

 private:
  RolloutBuffer collect();

  PolicyNet& net_;
  EnvConfig env_cfg_;
  PPOConfig ppo_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<ExploreEnv> envs_;
  std::vector<PolicyObs> current_;
  std::vector<std::uint8_t> fresh_;
  nn::Tensor<float> h_;
  nn::Adam<float> opt_;
  AffordanceSource aff_src_ = AffordanceSource::None;
  AffordanceModel* aff_model_ = nullptr;
  std::unique_ptr<ForwardModel> curiosity_;
  std::vector<double> ep_return_;
  long frames_ = 0;
  int updates_ = 0;
  // Episode statistics accumulated during the last rollout.
  std::vector<double> finished_returns_, finished_unique_, finished_success_;
};

// Affordance input for a batch of envs: fused scores or binary ground truth.
std::vector<PolicyObs> observe_batch(const std::vector<const ExploreEnv*>& envs, AffordanceSource src,
                                     AffordanceModel* model);

}  // namespace intexp
