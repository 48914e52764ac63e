#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intexp/camera.hpp"
#include "intexp/common.hpp"
#include "intexp/geometry.hpp"

namespace intexp {

inline constexpr double kCellSize = 0.25;
inline constexpr double kReach = 1.5;
inline constexpr double kCeilingHeight = 2.5;
inline constexpr double kCounterHeight = 1.0;
inline constexpr int kMaxGridCells = 24;
inline constexpr int kDefaultEpisodeLength = 256;
inline constexpr int kHeadingStepDeg = 30;
inline constexpr int kPitchStepDeg = 15;
inline constexpr int kMaxPitchDeg = 30;

// ---------------------------------------------------------------------------
// Actions

enum class Action : std::uint8_t {
  MoveForward,
  TurnLeft,
  TurnRight,
  LookUp,
  LookDown,
  Take,
  Put,
  Open,
  Close,
  ToggleOn,
  ToggleOff,
  Slice,
};

inline constexpr int kNumActions = 12;
inline constexpr int kNumNavigation = 5;
inline constexpr int kNumInteractions = 7;

constexpr bool is_navigation(Action a) { return static_cast<int>(a) < kNumNavigation; }
constexpr bool is_interaction(Action a) { return !is_navigation(a); }
constexpr int action_index(Action a) { return static_cast<int>(a); }
constexpr Action action_from_index(int i) { return static_cast<Action>(i); }
// Position of an interaction inside the 7-element interaction set.
constexpr int interaction_index(Action a) { return static_cast<int>(a) - kNumNavigation; }
constexpr Action interaction_action(int k) { return static_cast<Action>(k + kNumNavigation); }

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

// ---------------------------------------------------------------------------
// Object taxonomy

enum class Category : std::uint8_t {
  Counter,
  Cupboard,
  Drawer,
  Fridge,
  Microwave,
  Cabinet,
  Sink,
  Tap,
  StoveBurner,
  LightSwitch,
  Kettle,
  Cup,
  Pan,
  Knife,
  Apple,
  Tomato,
  Potato,
};
inline constexpr int kNumCategories = 17;

// Where an instance lives. Items are stored in receptacles; everything else is
// anchored to a grid cell.
enum class Mount : std::uint8_t { Floor, CounterFront, CounterTop, AboveCounter, Wall, Item, Architecture };

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct CategoryInfo {
  std::string_view name;
  bool pickupable = false;
  bool receptacle = false;
  bool openable = false;
  bool toggleable = false;
  bool sliceable = false;
  bool knife = false;
  std::uint32_t texture_seed = 0;
  Vec3 size;  // x: width across the face, y: height, z: depth
  int capacity = 0;
  Rgb8 color;
  Rgb8 interior;
  Mount mount = Mount::Item;
};

const CategoryInfo& category_info(Category c);
std::optional<Category> parse_category(std::string_view name);
// Number of interactions that can target an instance of this category.
int interaction_count(Category c);

// ---------------------------------------------------------------------------
// Scene description

enum class Facing : std::uint8_t { East, South, West, North };
enum class Split : std::uint8_t { Train, Val, Test };

std::string_view facing_name(Facing f);
std::optional<Facing> parse_facing(std::string_view s);
std::string_view split_name(Split s);
std::optional<Split> parse_split(std::string_view s);

struct Cell {
  int x = 0;
  int y = 0;
  constexpr bool operator==(const Cell&) const = default;
};

constexpr Cell step_toward(Cell c, Facing f) {
  switch (f) {
    case Facing::East: return {c.x + 1, c.y};
    case Facing::South: return {c.x, c.y + 1};
    case Facing::West: return {c.x - 1, c.y};
    case Facing::North: return {c.x, c.y - 1};
  }
  return c;
}

struct CellRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive
  bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
  int area() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
  bool operator==(const CellRect&) const = default;
};

struct SolidSpec {
  CellRect cells;
  double height = kCeilingHeight;
};

struct ObjectState {
  bool is_open = false;
  bool is_toggled = false;
  bool is_sliced = false;
  constexpr bool operator==(const ObjectState&) const = default;
};

struct PlacementSpec {
  Category category = Category::Cup;
  std::optional<Cell> cell;         // fixtures
  Facing facing = Facing::South;    // side the fixture opens toward
  std::optional<int> in_object;     // items: index into SceneSpec::objects
  std::optional<int> on_counter;    // items: index into SceneSpec::counters
  ObjectState state;
};

struct SceneSpec {
  std::string scene_id;
  Split split = Split::Train;
  int width = 0;   // cells
  int height = 0;  // cells
  std::vector<SolidSpec> walls;
  std::vector<SolidSpec> counters;
  std::vector<PlacementSpec> objects;
  // Per-episode randomization of item placement, fixture states, and spawn.
  bool randomize = true;
};

// Checks every SceneSpec invariant; throws SchemaError naming the field.
void validate_scene(const SceneSpec& spec);

// ---------------------------------------------------------------------------
// Runtime state

using InstanceId = std::uint16_t;  // 0 = architecture / none

enum class PartKind : std::uint8_t { Body, Interior, Door };

// A renderable box belonging to an instance (or to architecture when id = 0).
struct Part {
  Box box;
  InstanceId id = 0;
  PartKind kind = PartKind::Body;
  std::uint8_t surface = 0;  // architecture material: 0 wall, 1 floor, 2 ceiling
  bool operator==(const Part&) const = default;
};

struct ObjectInstance {
  InstanceId id = 0;
  Category category = Category::Cup;
  Cell cell;                  // anchor cell (fixtures) or slot cell (items)
  Facing facing = Facing::South;
  ObjectState state;
  InstanceId container = 0;   // receptacle holding this item; 0 when free or held
  int slot = -1;
  std::vector<InstanceId> contents;  // indexed by slot; 0 = empty slot
  bool held = false;
  Box pose;                   // main body box in world coordinates
  CellRect counter_cells;     // counters only
  bool operator==(const ObjectInstance&) const = default;

  const CategoryInfo& info() const { return category_info(category); }
  int occupied() const;
};

struct Pose {
  int x = 0, y = 0;   // cell
  int heading = 0;    // degrees, multiple of 30 in [0, 360)
  int pitch = 0;      // degrees, multiple of 15 in [-30, 30]
  bool operator==(const Pose&) const = default;
};

// Odometry estimate in continuous coordinates (meters / degrees).
struct OdometryPose {
  double x = 0, z = 0;
  double heading_deg = 0;
  double pitch_deg = 0;
  bool operator==(const OdometryPose&) const = default;
};

struct AgentState {
  Pose true_pose;
  OdometryPose reported_pose;
  InstanceId inventory = 0;
  bool operator==(const AgentState&) const = default;
};

struct NoiseConfig {
  bool enabled = false;
  double translation_mean_mm = 14.0;
  double translation_std_mm = 5.0;
  double rotation_mean_deg = 1.0;
  double rotation_std_deg = 0.5;
  double truncation_sigmas = 3.0;
  void validate() const;
};

enum class SubgoalEvent : std::uint8_t {
  TakenFromContainer,
  PlacedOutsideVisible,
  TakenFromOutside,
  PlacedInContainer,
  ContainerClosedWithItem,
  ObjectInSink,
  TapOnWithObject,
  PanOnBurner,
  BurnerOnWithPan,
};
inline constexpr int kNumSubgoalEvents = 9;
std::string_view subgoal_name(SubgoalEvent e);

// Bookkeeping used to decide when multi-step task subgoals complete.
struct TaskTracker {
  bool enabled = false;
  std::vector<InstanceId> taken_from_closable;  // items last taken out of a closable receptacle
  std::vector<InstanceId> taken_from_outside;
  std::vector<std::pair<InstanceId, InstanceId>> stored;  // (item, closable receptacle)
  bool operator==(const TaskTracker&) const = default;
};

struct WorldState {
  std::shared_ptr<const SceneSpec> scene;
  std::uint64_t episode_seed = 0;
  int width = 0, height = 0;
  std::vector<std::uint8_t> static_blocked;  // width*height, architecture and floor fixtures
  std::vector<ObjectInstance> objects;       // objects[id - 1]
  std::vector<Part> architecture;
  std::vector<Part> parts;                   // instance geometry, rebuilt after changes
  AgentState agent;
  NoiseConfig noise;
  Rng noise_rng;
  int steps = 0;
  TaskTracker tracker;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_static_blocked(Cell c) const {
    return !in_bounds(c) || static_blocked[static_cast<size_t>(c.y * width + c.x)] != 0;
  }
  // Static obstacles plus open doors/drawers that intrude into the cell.
  bool is_blocked(Cell c) const;
  const ObjectInstance& object(InstanceId id) const { return objects.at(id - 1u); }
  ObjectInstance& object(InstanceId id) { return objects.at(id - 1u); }
};

// Canonical text dump used for byte-level determinism checks.
std::string world_digest(const WorldState& w);

enum class FailureReason : std::uint8_t { None, Blocked, NoTarget, OutOfReach, PreconditionFailed };
std::string_view failure_name(FailureReason f);

struct StepResult {
  Action action = Action::MoveForward;
  bool success = false;
  // Set iff the action is an interaction and the target ray hit a surface
  // within reach; 0 means the surface was architecture.
  std::optional<InstanceId> target;
  // Take: the receptacle the item came from. Put: the item that was placed.
  InstanceId source = 0;
  FailureReason failure = FailureReason::None;
  std::vector<SubgoalEvent> subgoal_events;
};

struct TargetHit {
  InstanceId id = 0;   // 0 if the ray hit architecture
  double distance = 0;
  Vec3 point;
};

// ---------------------------------------------------------------------------
// Operations

WorldState load_scene(const SceneSpec& spec, std::uint64_t episode_seed,
                      const NoiseConfig& noise = {});
WorldState load_scene(std::shared_ptr<const SceneSpec> spec, std::uint64_t episode_seed,
                      const NoiseConfig& noise = {});

StepResult step(WorldState& world, Action action);

// Pose after a navigation action, or nullopt when it fails. Does not mutate.
std::optional<Pose> navigate(const WorldState& world, const Pose& pose, Action action);

// Precondition check for an interaction against a specific instance, ignoring
// reach. This is the hidden validity model; step() applies it after ray casting.
bool interaction_valid(const WorldState& world, Action action, InstanceId target);

// Same as interaction_valid but ignoring the agent's inventory (used for the
// ground-truth affordance landscape).
bool affordance_valid(const WorldState& world, Action action, InstanceId target);

Camera camera_for(const Pose& pose);
Camera camera_for(const OdometryPose& pose);
Camera true_camera(const WorldState& w);
Camera odometry_camera(const WorldState& w);

// First surface hit along a ray. Ties on distance go to the lower instance id.
std::optional<TargetHit> cast_ray(const WorldState& w, const Vec3& origin, const Vec3& dir);
// The interaction target ray (center pixel) for a pose.
std::optional<TargetHit> center_hit(const WorldState& w, const Pose& pose);

// Updates reported_pose after a navigation action. Called by step().
void apply_odometry_noise(WorldState& world, Action action, bool success);

// Rebuilds instance parts after state changes.
void rebuild_parts(WorldState& world);

// Task subgoal detection for the post-step state (requires tracker.enabled).
std::vector<SubgoalEvent> subgoal_events(WorldState& world, const StepResult& result,
                                         InstanceId held_before);

Cell cell_of(const Vec3& p);
Vec3 cell_center(Cell c, double y = 0.0);
Facing move_direction(int heading_deg);
bool is_closable_receptacle(Category c);

}  // namespace intexp
