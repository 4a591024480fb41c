#include "edgematch/generate.hpp"

#include <random>
#include <stdexcept>

namespace edgematch {

namespace {

Piece unit_square_piece(int id, int color_s, int color_e, int color_n, int color_w) {
  Piece p;
  p.id = id;
  p.vertices = {Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.5), Vec2(-0.5, 0.5)};
  p.edges = {
      EdgeElement::between(p.vertices[0], p.vertices[1], color_s),
      EdgeElement::between(p.vertices[1], p.vertices[2], color_e),
      EdgeElement::between(p.vertices[2], p.vertices[3], color_n),
      EdgeElement::between(p.vertices[3], p.vertices[0], color_w),
  };
  return p;
}

// Axis-aligned rectangular piece centered at the origin.
Piece rect_piece(int id, double w, double h, int color_s, int color_e, int color_n, int color_w) {
  Piece p;
  p.id = id;
  p.vertices = {Vec2(-w / 2, -h / 2), Vec2(w / 2, -h / 2), Vec2(w / 2, h / 2), Vec2(-w / 2, h / 2)};
  p.edges = {
      EdgeElement::between(p.vertices[0], p.vertices[1], color_s),
      EdgeElement::between(p.vertices[1], p.vertices[2], color_e),
      EdgeElement::between(p.vertices[2], p.vertices[3], color_n),
      EdgeElement::between(p.vertices[3], p.vertices[0], color_w),
  };
  return p;
}

}  // namespace

std::pair<Puzzle, Placement> generate_grid_puzzle(int rows, int cols, int num_colors,
                                                  std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid puzzle needs rows, cols >= 1");
  if (num_colors < 1) throw std::invalid_argument("grid puzzle needs num_colors >= 1");

  std::mt19937_64 rng(seed);
  auto draw = [&]() { return static_cast<int>(rng() % std::uint64_t(num_colors)); };

  // Interior adjacency colors: vertical walls between (r,c)-(r,c+1) and
  // horizontal walls between (r,c)-(r+1,c), row-major.
  std::vector<std::vector<int>> vint(rows, std::vector<int>(std::max(cols - 1, 0)));
  std::vector<std::vector<int>> hint(std::max(rows - 1, 0), std::vector<int>(cols));
  for (auto& row : vint)
    for (auto& c : row) c = draw();
  for (auto& row : hint)
    for (auto& c : row) c = draw();
  std::vector<int> fleft(rows), fright(rows), fbottom(cols), ftop(cols);
  for (auto& c : fleft) c = draw();
  for (auto& c : fright) c = draw();
  for (auto& c : fbottom) c = draw();
  for (auto& c : ftop) c = draw();

  Puzzle puzzle;
  Placement planted;
  std::vector<Vec2> presets;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int south = r > 0 ? hint[r - 1][c] : fbottom[c];
      const int east = c < cols - 1 ? vint[r][c] : fright[r];
      const int north = r < rows - 1 ? hint[r][c] : ftop[c];
      const int west = c > 0 ? vint[r][c - 1] : fleft[r];
      puzzle.pieces.push_back(
          unit_square_piece(r * cols + c + 1, south, east, north, west));
      const Vec2 center(c + 0.5, r + 0.5);
      planted.translations.push_back(center);
      planted.orientations.push_back(Turn());
      presets.push_back(center);
    }
  puzzle.preset_locations = std::move(presets);

  puzzle.frame.region = {Vec2(0, 0), Vec2(cols, 0), Vec2(cols, rows), Vec2(0, rows)};
  // Clockwise traversal: left wall up, top wall right, right wall down,
  // bottom wall left; normals point inward.
  for (int r = 0; r < rows; ++r)
    puzzle.frame.edges.push_back(EdgeElement::between(Vec2(0, r), Vec2(0, r + 1), fleft[r]));
  for (int c = 0; c < cols; ++c)
    puzzle.frame.edges.push_back(EdgeElement::between(Vec2(c, rows), Vec2(c + 1, rows), ftop[c]));
  for (int r = rows - 1; r >= 0; --r)
    puzzle.frame.edges.push_back(
        EdgeElement::between(Vec2(cols, r + 1), Vec2(cols, r), fright[r]));
  for (int c = cols - 1; c >= 0; --c)
    puzzle.frame.edges.push_back(EdgeElement::between(Vec2(c + 1, 0), Vec2(c, 0), fbottom[c]));

  return {std::move(puzzle), std::move(planted)};
}

std::pair<Puzzle, Placement> make_two_solution_puzzle() {
  // Cells: A=(0,0) B=(0,1) bottom row, C=(1,0) D=(1,1) top row. Pieces at A
  // and B are identical, their surroundings accept either, and everything
  // else is pinned by unique colors.
  const int f1 = 0;   // bottom frame under A and B
  const int i1 = 1;   // A-B wall, also A's left frame and B's right frame
  const int i2 = 2;   // A-C and B-D walls
  const int i4 = 3;   // C-D wall
  const int f4 = 4, f5 = 5, f6 = 6, f7 = 7;  // remaining frame colors

  Puzzle puzzle;
  puzzle.pieces = {
      unit_square_piece(1, f1, i1, i2, i1),  // A at (0.5, 0.5)
      unit_square_piece(2, f1, i1, i2, i1),  // B at (1.5, 0.5), identical to A
      unit_square_piece(3, i2, i4, f4, f5),  // C at (0.5, 1.5)
      unit_square_piece(4, i2, f6, f7, i4),  // D at (1.5, 1.5)
  };
  puzzle.frame.region = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 2), Vec2(0, 2)};
  puzzle.frame.edges = {
      EdgeElement::between(Vec2(0, 0), Vec2(0, 1), i1),  // left of A
      EdgeElement::between(Vec2(0, 1), Vec2(0, 2), f5),  // left of C
      EdgeElement::between(Vec2(0, 2), Vec2(1, 2), f4),  // top of C
      EdgeElement::between(Vec2(1, 2), Vec2(2, 2), f7),  // top of D
      EdgeElement::between(Vec2(2, 2), Vec2(2, 1), f6),  // right of D
      EdgeElement::between(Vec2(2, 1), Vec2(2, 0), i1),  // right of B
      EdgeElement::between(Vec2(2, 0), Vec2(1, 0), f1),  // bottom of B
      EdgeElement::between(Vec2(1, 0), Vec2(0, 0), f1),  // bottom of A
  };
  puzzle.preset_locations = std::vector<Vec2>{Vec2(0.5, 0.5), Vec2(1.5, 0.5), Vec2(0.5, 1.5),
                                              Vec2(1.5, 1.5)};
  Placement planted = Placement::translations_only(
      {Vec2(0.5, 0.5), Vec2(1.5, 0.5), Vec2(0.5, 1.5), Vec2(1.5, 1.5)});
  return {std::move(puzzle), std::move(planted)};
}

std::pair<Puzzle, Placement> make_rect_dissection() {
  // Frame [0,2]x[0,1]; vertical cut at x0, horizontal cut at y0. All edges
  // share one color, Tangram style.
  const double x0 = 1.2, y0 = 0.45;
  const int c = 0;
  Puzzle puzzle;
  puzzle.pieces = {
      rect_piece(1, x0, y0, c, c, c, c),              // bottom-left
      rect_piece(2, 2 - x0, y0, c, c, c, c),          // bottom-right
      rect_piece(3, x0, 1 - y0, c, c, c, c),          // top-left
      rect_piece(4, 2 - x0, 1 - y0, c, c, c, c),      // top-right
  };
  puzzle.frame.region = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(0, 1)};
  puzzle.frame.edges = {
      EdgeElement::between(Vec2(0, 0), Vec2(0, y0), c),
      EdgeElement::between(Vec2(0, y0), Vec2(0, 1), c),
      EdgeElement::between(Vec2(0, 1), Vec2(x0, 1), c),
      EdgeElement::between(Vec2(x0, 1), Vec2(2, 1), c),
      EdgeElement::between(Vec2(2, 1), Vec2(2, y0), c),
      EdgeElement::between(Vec2(2, y0), Vec2(2, 0), c),
      EdgeElement::between(Vec2(2, 0), Vec2(x0, 0), c),
      EdgeElement::between(Vec2(x0, 0), Vec2(0, 0), c),
  };
  Placement planted = Placement::translations_only({
      Vec2(x0 / 2, y0 / 2),
      Vec2((2 + x0) / 2, y0 / 2),
      Vec2(x0 / 2, (1 + y0) / 2),
      Vec2((2 + x0) / 2, (1 + y0) / 2),
  });
  return {std::move(puzzle), std::move(planted)};
}

std::pair<Puzzle, Placement> scramble_orientations(const Puzzle& puzzle, const Placement& planted,
                                                   int r, std::uint64_t seed) {
  if (r < 1) throw std::invalid_argument("scramble_orientations: r >= 1 required");
  std::mt19937_64 rng(seed);
  Puzzle out = puzzle;
  out.rotation_order = r;
  Placement planted_out = planted;
  for (std::size_t i = 0; i < out.pieces.size(); ++i) {
    const int rho = static_cast<int>(rng() % std::uint64_t(r));
    const Turn phi(rho, r);
    const double back = (-phi).radians();
    auto& piece = out.pieces[i];
    for (auto& v : piece.vertices) v = rotate(v, back);
    for (auto& e : piece.edges) {
      e.offset = rotate(e.offset, back);
      e.endpoints = {rotate(e.endpoints[0], back), rotate(e.endpoints[1], back)};
      e.orientation = e.orientation - phi;
    }
    planted_out.orientations[i] = phi;
  }
  return {std::move(out), std::move(planted_out)};
}

}  // namespace edgematch
