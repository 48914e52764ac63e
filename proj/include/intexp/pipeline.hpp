#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intexp/affordnet.hpp"
#include "intexp/evalkit.hpp"
#include "intexp/markers.hpp"
#include "intexp/policy.hpp"

namespace intexp {

// Resolved settings of one CLI run. Every field has a dotted config-file path
// and a flag name; see config_fields().
struct RunConfig {
  std::string command;
  std::string name;  // run directory under the output root
  std::uint64_t seed = 1;
  int workers = 1;

  std::string scenes_train = "scenes/train";
  std::string scenes_val = "scenes/val";
  std::string scenes_test = "scenes/test";

  // Exploration training
  std::string reward = "intexp";
  long frames = 0;  // 0 = command default
  long phase_frames = 50000;
  int alternations = 2;
  std::string affordance_input = "auto";  // auto | model | gt | none
  std::string marking = "point";
  bool noise = false;
  int episode_length = kDefaultEpisodeLength;

  // Dataset collection and affordance training
  int collect_episodes = 48;
  int dataset_size = 2000;
  int heap_capacity = 50;
  int afford_epochs = 20;
  int afford_batch = 16;
  bool use_depth = false;

  // Policy optimization
  double lr = 1e-4;
  int envs = 8;
  int rollout = 256;
  int ppo_epochs = 4;
  int minibatches = 8;

  // Evaluation
  std::string agent = "policy";
  int episodes = 0;  // 0 = command default
  int views = 2000;
  std::uint64_t eval_seed = 0;
  bool greedy = false;

  // Inputs
  std::string checkpoint;             // run directory or checkpoint file
  std::string affordance_checkpoint;  // run directory or checkpoint file
  std::string dataset;                // dataset directory or run directory

  // Downstream tasks
  std::string task;
  bool from_scratch = false;

  // render-debug
  std::string scene;
  std::uint64_t episode_seed = 0;
  int pose_x = -1, pose_y = -1, heading = -1, pitch = 0;
};

struct ConfigField {
  std::string path;  // dotted config-file key
  std::string flag;  // command-line flag without dashes
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<ConfigField>& config_fields();

// Applies a YAML config file. Unknown keys raise UsageError naming the key.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source);
// Sets one field by flag name. Unknown names raise UsageError.
void apply_flag(RunConfig& cfg, const std::string& flag, const std::string& value);
// Fills command-dependent defaults and validates values.
void resolve_config(RunConfig& cfg);
std::string config_to_yaml(const RunConfig& cfg);

// Output root from INTEXP_OUT (default "runs").
std::string output_root();
std::string run_directory(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Workflows. Each writes into `dir` and skips work whose outputs exist.

using SceneList = std::vector<std::shared_ptr<const SceneSpec>>;
SceneList load_scenes(const std::string& dir, Split expected);

struct CollectOptions {
  int episodes = 48;
  int episode_length = kDefaultEpisodeLength;
  MarkingStrategy marking = MarkingStrategy::Point;
  int heap_capacity = 50;
  int target_size = 2000;
  std::uint64_t seed = 0;
  NoiseConfig noise;
  bool cycle_interactions = false;
};

// Rolls out `agent` with marker recording, labels every observed frame from the
// episode's markers, and curates the result.
std::vector<DatasetEntry> collect_dataset(const SceneList& scenes, EvalAgent& agent, const CollectOptions& opt);

void run_train_explore(const RunConfig& cfg, const std::string& dir);
void run_collect_dataset(const RunConfig& cfg, const std::string& dir);
void run_train_affordance(const RunConfig& cfg, const std::string& dir);
void run_eval_explore(const RunConfig& cfg, const std::string& dir);
void run_eval_affordance(const RunConfig& cfg, const std::string& dir);
void run_finetune_task(const RunConfig& cfg, const std::string& dir);
void run_eval_task(const RunConfig& cfg, const std::string& dir);
void run_render_debug(const RunConfig& cfg, const std::string& dir);

void run_command(const RunConfig& cfg);

}  // namespace intexp
