#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "intexp/render.hpp"
#include "intexp/world.hpp"

namespace intexp {

inline constexpr double kMarkerRadius = 0.20;
inline constexpr double kVisibilityTolerance = 0.10;

struct Marker {
  Vec3 point;
  Action action = Action::Take;
  bool success = false;
  InstanceId instance = 0;
};

struct MarkerMemory {
  std::vector<Marker> markers;
  void clear() { markers.clear(); }
  size_t size() const { return markers.size(); }
};

// Label planes: kNumInteractions x H x W, values in {-1, 0, 1}.
using LabelMask = std::vector<std::int8_t>;

// Appends a marker for an interaction whose target ray hit a surface within
// reach. `frame` is the observation the action was taken from. Returns whether
// a marker was recorded.
bool record_marker(MarkerMemory& memory, const StepResult& result, const Frame& frame);

// Per-pixel world points of a frame (H*W), via the reported camera.
std::vector<Vec3> frame_points(const Frame& frame);

// Point marking: nearest visible marker of each interaction within `radius`
// decides the label; equidistant markers with mixed outcomes give 0.
LabelMask label_frame_point(const Frame& frame, const MarkerMemory& memory, double radius = kMarkerRadius,
                            double tolerance = kVisibilityTolerance);

// Object marking: every pixel of a marked instance takes the latest marker's
// outcome for that interaction.
LabelMask label_frame_object(const Frame& frame, const MarkerMemory& memory);

int labeled_count(const LabelMask& mask, int channel, int pixels);

enum class MarkingStrategy { Point, Object };
std::string_view marking_name(MarkingStrategy m);
MarkingStrategy parse_marking(const std::string& s);

LabelMask label_frame(MarkingStrategy strategy, const Frame& frame, const MarkerMemory& memory);

// ---------------------------------------------------------------------------
// Dataset

struct DatasetEntry {
  std::uint64_t uid = 0;
  std::string scene_id;
  std::vector<std::uint8_t> rgb;     // H*W*3
  std::vector<std::uint16_t> depth;  // H*W millimeters
  LabelMask mask;                    // kNumInteractions*H*W
};

// Balanced curation: one bounded min-heap per (interaction, scene), keyed on
// the number of labeled pixels in that interaction's channel.
class Curator {
 public:
  explicit Curator(int heap_capacity = 50) : capacity_(heap_capacity) {}

  // Returns the number of heaps the entry was inserted into.
  int insert(DatasetEntry entry);

  // Union of all heaps, deduplicated. When larger than `target`, heaps are
  // drained round-robin (densest first) until `target` entries are selected.
  std::vector<DatasetEntry> finalize(size_t target) const;

  size_t heap_count() const { return heaps_.size(); }
  size_t heap_size(int channel, const std::string& scene) const;
  size_t stored() const { return entries_.size(); }
  int capacity() const { return capacity_; }

 private:
  struct Item {
    int key;
    std::uint64_t uid;
  };
  struct Stored {
    DatasetEntry entry;
    int refs = 0;
  };
  int capacity_;
  std::map<std::pair<int, std::string>, std::vector<Item>> heaps_;
  std::map<std::uint64_t, Stored> entries_;
};

// On-disk layout: <dir>/index.tsv plus <uid>.ppm, <uid>_depth.pgm and
// <uid>_mask.pgm (channels stacked vertically, value = label + 1).
void save_dataset(const std::string& dir, const std::vector<DatasetEntry>& entries, int width = kFrameWidth,
                  int height = kFrameHeight);
std::vector<DatasetEntry> load_dataset(const std::string& dir);

}  // namespace intexp
