#pragma once

#include <optional>
#include <string>
#include <utility>

#include "edgematch/geometry.hpp"

namespace edgematch {

struct PuzzleFile {
  Puzzle puzzle;
  std::optional<Placement> planted;
};

void save_puzzle(const std::string& path, const Puzzle& puzzle,
                 const Placement* planted = nullptr);
PuzzleFile load_puzzle(const std::string& path);

std::string puzzle_to_json(const Puzzle& puzzle, const Placement* planted = nullptr);
PuzzleFile puzzle_from_json(const std::string& text);

void save_placement(const std::string& path, const Placement& placement);
Placement load_placement(const std::string& path);
std::string placement_to_json(const Placement& placement);
Placement placement_from_json(const std::string& text);

}  // namespace edgematch
