#pragma once

#include <string>
#include <vector>

#include "edgematch/geometry.hpp"

namespace edgematch {

enum class RenderStyle {
  Triangles,  // each edge drawn as a colored triangle from the piece center
  Pieces,     // per-piece fill, Tangram style
};

struct RenderOptions {
  RenderStyle style = RenderStyle::Triangles;
  double pixels_per_unit = 60.0;
  // Draw the r rotated frame copies of an augmented solve with transparency.
  bool show_rotation_copies = false;
};

// Placement may be null: pieces are then laid out on a shelf beside the frame
// (the scrambled view).
std::string render_puzzle_svg(const Puzzle& puzzle, const Placement* placement,
                              const RenderOptions& opts = {});

// Grayscale heatmap strip of matrices (white = 1, black = 0).
std::string render_matrix_strip_svg(const std::vector<Eigen::MatrixXd>& trace);

// Small-multiple strip of intermediate placements.
std::string render_placement_strip_svg(const Puzzle& puzzle,
                                       const std::vector<Placement>& steps,
                                       const RenderOptions& opts = {});

}  // namespace edgematch
