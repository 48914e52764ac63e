#pragma once

#include <array>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intexp/markers.hpp"
#include "intexp/nn/adam.hpp"
#include "intexp/nn/layers.hpp"
#include "intexp/render.hpp"
#include "intexp/world.hpp"

namespace intexp {

enum class RewardKind { IntExp, IntNovelty, ActNovelty, Novelty, Curiosity, ObjCoverage, Task, None };
std::string_view reward_name(RewardKind r);
RewardKind parse_reward(const std::string& s);

// Per-episode interaction bookkeeping.
struct InteractionLedger {
  std::map<std::pair<int, InstanceId>, int> successes;  // c(a, o), keyed by interaction index
  std::array<int, kNumInteractions> action_successes{};  // n(a)
  std::array<int, kNumInteractions> action_attempts{};
  std::map<std::pair<int, int>, int> visits;             // n(x, y)
  std::set<InstanceId> visited_objects;
  int attempts = 0;        // interaction actions executed, successful or not
  int success_count = 0;   // successful interaction actions

  void reset() { *this = InteractionLedger{}; }
  size_t unique_successes() const { return successes.size(); }
};

// Counts before and after recording one step.
struct LedgerUpdate {
  bool interaction = false;
  bool success = false;
  int pair_count = 0;    // c(a, o) after the step
  int action_count = 0;  // n(a) after the step
};

// Records an interaction step. Navigation steps leave the ledger unchanged.
LedgerUpdate record_interaction(InteractionLedger& ledger, const StepResult& result);

// 1 iff the step is a successful interaction whose (a, o) had no prior success.
double reward_intexp(InteractionLedger& ledger, const StepResult& result);
// 1 / sqrt(n(a, o)) after counting this success; 0 otherwise.
double reward_intnovelty(InteractionLedger& ledger, const StepResult& result);
// 1 / sqrt(n(a)) after counting this success; 0 otherwise.
double reward_actnovelty(InteractionLedger& ledger, const StepResult& result);

inline constexpr double kNoveltyScale = 0.1;
// Visits the cell and returns scale / sqrt(n(x, y)).
double reward_novelty(InteractionLedger& ledger, Cell cell, double scale = kNoveltyScale);

inline constexpr int kCoverageBox = 60;
inline constexpr double kCoverageDistance = 1.5;
inline constexpr double kCoverageFraction = 0.30;
// Marks newly visited instances and returns how many there were.
double reward_objcoverage(InteractionLedger& ledger, const WorldState& world, const Frame& frame,
                          std::vector<InstanceId>* newly_visited = nullptr);

// The 60x60 center-box pixel test, exposed for testing.
bool object_in_view_box(const Frame& frame, InstanceId id, int box = kCoverageBox,
                        double fraction = kCoverageFraction);

// ---------------------------------------------------------------------------
// Curiosity forward model: predicts the next observation encoding from the
// current encoding and a one-hot action.

inline constexpr double kCuriosityLambda = 1e-2;
inline constexpr double kCuriosityScale = 0.5;

class ForwardModel {
 public:
  ForwardModel(int feature_dim, std::uint64_t seed, double lr = 1e-4);

  int feature_dim() const { return dim_; }
  // Per-sample squared error ||F(s, a) - s'||^2 for a batch.
  std::vector<double> errors(const nn::Tensor<float>& s, const std::vector<int>& actions,
                             const nn::Tensor<float>& s_next);
  // Curiosity rewards 0.5 * lambda * error.
  std::vector<double> rewards(const nn::Tensor<float>& s, const std::vector<int>& actions,
                              const nn::Tensor<float>& s_next);
  // One gradient step on lambda * mean error. Returns the mean error before it.
  double train_step(const nn::Tensor<float>& s, const std::vector<int>& actions, const nn::Tensor<float>& s_next);

  std::vector<nn::Param<float>*> params() { return net_.params(); }

 private:
  nn::Tensor<float> input(const nn::Tensor<float>& s, const std::vector<int>& actions) const;
  int dim_;
  Rng rng_;
  nn::Sequential<float> net_;
  nn::Adam<float> opt_;
};

inline double curiosity_reward(double squared_error) { return kCuriosityScale * kCuriosityLambda * squared_error; }

// ---------------------------------------------------------------------------
// Downstream tasks

enum class Task { Retrieve, Store, Wash, Heat };
std::string_view task_name(Task t);
Task parse_task(const std::string& s);
// Subgoal events that make up a task; success requires all of them.
const std::vector<SubgoalEvent>& task_subgoals(Task t);

inline constexpr double kSubgoalReward = 10.0;

// ---------------------------------------------------------------------------
// Environment wrapper used for training and evaluation.

struct EnvConfig {
  RewardKind reward = RewardKind::IntExp;
  int episode_length = 256;
  NoiseConfig noise;
  // Execute all interactions in declaration order when the cycle trigger fires
  // (novel cell for Novelty, newly visited object for ObjCoverage).
  bool cycle_interactions = false;
  std::optional<Task> task;
  bool record_markers = false;
};

struct EnvStep {
  double reward = 0;  // summed over the policy step and any cycled interactions
  bool done = false;
  int env_steps = 0;
  std::vector<StepResult> results;
};

class ExploreEnv {
 public:
  ExploreEnv(std::vector<std::shared_ptr<const SceneSpec>> scenes, EnvConfig cfg, std::uint64_t seed);

  // Random scene and episode seed from the env's own stream.
  void reset();
  void reset(size_t scene_index, std::uint64_t episode_seed);

  EnvStep step(Action action);

  const Frame& frame() const { return frame_; }
  const WorldState& world() const { return *world_; }
  const InteractionLedger& ledger() const { return ledger_; }
  const MarkerMemory& markers() const { return markers_; }
  const EnvConfig& config() const { return cfg_; }
  int t() const { return t_; }
  bool done() const { return t_ >= cfg_.episode_length; }
  size_t scene_index() const { return scene_index_; }
  std::uint64_t episode_seed() const { return episode_seed_; }
  const std::set<SubgoalEvent>& subgoals_seen() const { return subgoals_; }
  bool task_success() const;
  size_t scene_count() const { return scenes_.size(); }

 private:
  double single_step(Action action, EnvStep& out);

  std::vector<std::shared_ptr<const SceneSpec>> scenes_;
  EnvConfig cfg_;
  Rng rng_;
  std::optional<WorldState> world_;
  Frame frame_;
  InteractionLedger ledger_;
  MarkerMemory markers_;
  std::set<SubgoalEvent> subgoals_;
  size_t scene_index_ = 0;
  std::uint64_t episode_seed_ = 0;
  int t_ = 0;
};

// ---------------------------------------------------------------------------
// Scripted agents

class ScriptedAgent {
 public:
  virtual ~ScriptedAgent() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual Action act(const WorldState& world) = 0;
};

// Uniform over all 12 actions.
class RandomAgent : public ScriptedAgent {
 public:
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const WorldState& world) override;

 private:
  Rng rng_;
};

// Random navigation; on arrival at a cell not visited before in the episode
// emits every interaction in declaration order. The spawn cell counts as
// visited.
class RandomPlusAgent : public ScriptedAgent {
 public:
  void reset(std::uint64_t seed) override;
  Action act(const WorldState& world) override;

 private:
  Rng rng_;
  std::set<std::pair<int, int>> visited_;
  std::deque<Action> pending_;
};

}  // namespace intexp
