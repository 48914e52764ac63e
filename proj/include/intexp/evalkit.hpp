#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intexp/affordnet.hpp"
#include "intexp/explore.hpp"
#include "intexp/policy.hpp"

namespace intexp {

using InteractionPair = std::pair<int, InstanceId>;  // (interaction index, instance)

// ---------------------------------------------------------------------------
// Oracle

// Greedy privileged planner. Walks the shortest path (breadth-first over
// poses) to the nearest pose whose view ray hits an instance with a valid
// interaction not yet achieved, performs it, and re-plans. When nothing new is
// reachable it falls back to enabling actions (opening a container holding
// untried items, freeing the hands, fetching an item or a knife).
class OraclePlanner {
 public:
  static constexpr int kEnablingBudget = 4;  // enabling actions allowed between new successes

  void reset();
  // Next action, or nullopt when no achievable interaction remains.
  std::optional<Action> next(const WorldState& world);
  // Must be called with the result of every executed action.
  void observe(const StepResult& result);

  const std::set<InteractionPair>& achieved() const { return achieved_; }

 private:
  enum class Tier { NewStrict, EnablingOpen, NewRelaxed, Enabling };
  struct Pending {
    bool take = false, put = false, slice = false, holding_knife = false;
  };
  Pending pending(const WorldState& w) const;
  bool untried(Action a, InstanceId id) const;
  bool untried_take(const ObjectInstance& o) const;
  bool untried_slice(const ObjectInstance& o) const;
  bool holds_untried(const WorldState& w, const ObjectInstance& o, bool knife) const;
  bool deferred(const WorldState& w, Action a, InstanceId id, const Pending& p) const;
  bool enabling(const WorldState& w, Action a, InstanceId id, const Pending& p) const;
  std::optional<Action> actionable(const WorldState& w, InstanceId id, Tier tier) const;
  std::optional<InstanceId> target_at(const WorldState& w, const Pose& pose);
  // Fills path_ with the navigation to the nearest goal pose. Returns false
  // when no goal pose is reachable.
  bool plan(const WorldState& w, Tier tier);

  std::set<InteractionPair> achieved_;
  std::set<InteractionPair> blacklist_;  // failed unexpectedly since the last new success
  std::vector<Action> path_;
  size_t path_pos_ = 0;
  int enabling_used_ = 0;
  // View-ray cache for the current geometry; cleared after interactions.
  std::vector<std::int32_t> hit_cache_;  // -2 unknown, -1 nothing in reach, else id
  int cache_w_ = 0, cache_h_ = 0;
};

struct OracleResult {
  int denominator = 0;  // distinct successful (a, o) pairs
  bool zero_horizon = false;
  std::set<InteractionPair> pairs;
  std::vector<StepResult> trace;
  // Instances with an untried valid interaction the oracle never achieved.
  std::vector<InstanceId> skipped;
};

OracleResult oracle_run(WorldState world, int horizon);

// ---------------------------------------------------------------------------
// Episode reports and metrics

struct EpisodeReport {
  std::string agent;
  std::string scene_id;
  std::uint64_t episode_seed = 0;
  int horizon = 0;
  std::set<InteractionPair> unique;
  int attempts = 0;
  int successes = 0;
  std::array<int, kNumInteractions> action_attempts{}, action_successes{}, action_unique{};
  std::vector<int> curve;  // unique count after each env step, length horizon
  std::optional<int> denominator;
  std::array<int, kNumInteractions> oracle_action_unique{};
  bool task_success = false;
};

// Builds a report from an episode's step results.
EpisodeReport make_report(const std::string& agent, const std::string& scene_id, std::uint64_t episode_seed,
                          int horizon, const std::vector<StepResult>& steps);

void attach_oracle(EpisodeReport& report, const OracleResult& oracle);

struct Metrics {
  double coverage = 0, precision = 0;
  bool coverage_undefined = false;   // denominator 0
  bool precision_undefined = false;  // no attempts
  bool clamped = false;              // agent beat the greedy oracle
};

// Throws EvaluationError when the report has no oracle denominator.
Metrics coverage_precision(const EpisodeReport& report);

// Rows: Take, Put, Open, Close, Turn-on, Turn-off, Slice, Average. Pooled over
// reports. Actions the oracle never achieved are left out of the average.
struct ActionTable {
  std::array<double, kNumInteractions + 1> precision{}, coverage{};
  std::array<bool, kNumInteractions> defined{};
};
ActionTable action_table(const std::vector<EpisodeReport>& reports);
inline constexpr std::array<const char*, kNumInteractions + 1> kActionTableColumns = {
    "Take", "Put", "Open", "Close", "Turn-on", "Turn-off", "Slice", "Average"};

struct Summary {
  int episodes = 0;
  double mean_coverage = 0, mean_precision = 0, std_coverage = 0;
  double mean_unique = 0, mean_denominator = 0;
  int coverage_flags = 0, precision_flags = 0, clamped = 0;
  double task_success_rate = 0;
};
Summary summarize(const std::vector<EpisodeReport>& reports);

// Mean coverage at each timestep (unique(t) / denominator).
std::vector<double> coverage_curve(const std::vector<EpisodeReport>& reports);

void write_episode_csv(const std::string& path, const std::vector<EpisodeReport>& reports);
void write_summary_csv(const std::string& path, const std::string& agent, const Summary& s, const ActionTable& t);
void write_curve_csv(const std::string& path, const std::vector<EpisodeReport>& reports);

// ---------------------------------------------------------------------------
// Agents and episode runners

class EvalAgent {
 public:
  virtual ~EvalAgent() = default;
  virtual std::string name() const = 0;
  virtual void reset(std::uint64_t seed) = 0;
  virtual Action act(const ExploreEnv& env) = 0;
  virtual void observe(const EnvStep&) {}
};

class ScriptedEvalAgent : public EvalAgent {
 public:
  ScriptedEvalAgent(std::string name, std::unique_ptr<ScriptedAgent> agent)
      : name_(std::move(name)), agent_(std::move(agent)) {}
  std::string name() const override { return name_; }
  void reset(std::uint64_t seed) override { agent_->reset(seed); }
  Action act(const ExploreEnv& env) override { return agent_->act(env.world()); }

 private:
  std::string name_;
  std::unique_ptr<ScriptedAgent> agent_;
};

class OracleEvalAgent : public EvalAgent {
 public:
  std::string name() const override { return "oracle"; }
  void reset(std::uint64_t) override { planner_.reset(); }
  Action act(const ExploreEnv& env) override;
  void observe(const EnvStep& s) override;

 private:
  OraclePlanner planner_;
};

// Samples from a trained policy. `model` is required for AffordanceSource::Model.
class PolicyEvalAgent : public EvalAgent {
 public:
  PolicyEvalAgent(std::string name, std::shared_ptr<PolicyNet> net, AffordanceSource src,
                  std::shared_ptr<AffordanceModel> model, bool greedy = false);
  std::string name() const override { return name_; }
  void reset(std::uint64_t seed) override;
  Action act(const ExploreEnv& env) override;

 private:
  std::string name_;
  std::shared_ptr<PolicyNet> net_;
  AffordanceSource src_;
  std::shared_ptr<AffordanceModel> model_;
  bool greedy_;
  nn::Tensor<float> h_;
  Rng rng_;
};

using AgentFactory = std::function<std::unique_ptr<EvalAgent>()>;

struct EvalConfig {
  int episodes = 40;  // spread round-robin over the scenes
  int episode_length = 256;
  std::uint64_t seed = 0;
  int workers = 1;
  NoiseConfig noise;
  RewardKind reward = RewardKind::None;  // selects the cycle trigger for cycling agents
  bool cycle_interactions = false;
  std::optional<Task> task;
  bool with_oracle = true;  // compute denominators
};

// Refuses any scene not tagged as test.
void audit_test_split(const std::vector<std::shared_ptr<const SceneSpec>>& scenes);

// Episode (scene index, seed) list in evaluation order.
std::vector<std::pair<size_t, std::uint64_t>> eval_episodes(size_t scene_count, const EvalConfig& cfg);

// Runs every evaluation episode. Results do not depend on the worker count.
std::vector<EpisodeReport> evaluate(const std::vector<std::shared_ptr<const SceneSpec>>& scenes,
                                    const AgentFactory& factory, const EvalConfig& cfg);

// Fraction of episodes in which every subgoal of cfg.task occurred.
double task_success_rate(const std::vector<EpisodeReport>& reports);

// ---------------------------------------------------------------------------
// Affordance map evaluation

// Step-wise average precision over distinct score thresholds: sum over
// thresholds of (recall gain) x (precision at the threshold). Tied scores
// enter together, so a constant predictor scores the positive prevalence.
// Returns nullopt when there are no positives.
std::optional<double> average_precision(const std::vector<float>& scores, const std::vector<std::uint8_t>& labels);

struct ViewSample {
  Frame frame;
  std::vector<std::uint8_t> truth;  // K x H x W binary
};

// Uniformly sampled (scene, episode seed, free cell, heading, pitch) views.
std::vector<ViewSample> sample_views(const std::vector<std::shared_ptr<const SceneSpec>>& scenes, int count,
                                     std::uint64_t seed);

struct ApReport {
  std::array<std::optional<double>, kNumInteractions> ap{};
  double map = 0;
  std::vector<int> excluded;  // channels without positives
};

// Pools pixels over all views per channel. `scores` holds K*H*W per view.
ApReport evaluate_ap(const std::vector<ViewSample>& views, const std::vector<std::vector<float>>& scores);
ApReport evaluate_ap_all_ones(const std::vector<ViewSample>& views);

}  // namespace intexp
