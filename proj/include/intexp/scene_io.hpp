#pragma once

#include <string>
#include <vector>

#include "intexp/world.hpp"

namespace intexp {

// Scene files are YAML; docs/scene-format.md describes the schema.
SceneSpec parse_scene(const std::string& text, const std::string& source = "<string>");
SceneSpec load_scene_file(const std::string& path);
std::string scene_to_yaml(const SceneSpec& spec);
void save_scene_file(const std::string& path, const SceneSpec& spec);

// All *.yaml scenes in a directory, sorted by file name.
std::vector<SceneSpec> load_scene_dir(const std::string& dir);

}  // namespace intexp
