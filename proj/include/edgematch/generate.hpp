#pragma once

#include <cstdint>
#include <utility>

#include "edgematch/geometry.hpp"

namespace edgematch {

// rows x cols unit-square puzzle with random interior/frame edge colors,
// plus the planted placement (a solution by construction). Deterministic for
// a fixed seed. Presets are the cell centers.
std::pair<Puzzle, Placement> generate_grid_puzzle(int rows, int cols, int num_colors,
                                                  std::uint64_t seed);

// 2x2 instance engineered to have exactly two solutions: two identical pieces
// in mirror-compatible cells can swap.
std::pair<Puzzle, Placement> make_two_solution_puzzle();

// Four-rectangle dissection of a 2x1 frame with unequal cuts; edges are not
// unit length, so path-integral coefficients are required. No preset
// locations.
std::pair<Puzzle, Placement> make_rect_dissection();

// Rotates each piece in place by a random multiple of 1/r turn (seeded), so
// the planted solution needs per-piece orientations to undo the scramble.
// Returns the scrambled puzzle (rotation_order = r) and its planted placement.
std::pair<Puzzle, Placement> scramble_orientations(const Puzzle& puzzle, const Placement& planted,
                                                   int r, std::uint64_t seed);

}  // namespace edgematch
