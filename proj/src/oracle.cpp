#include "edgematch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "edgematch/errors.hpp"

namespace edgematch {

namespace {

// Open edge surfaces keyed by quantized midpoint and length. Two coincident
// equal-length surfaces must pair (same color, opposite orientation) in any
// overlap-free completion, so a mismatch prunes the branch.
using SurfaceKey = std::tuple<long, long, long>;
using OpenMap = std::map<SurfaceKey, std::vector<std::pair<int, Turn>>>;

constexpr double kQuant = 1e-6;

SurfaceKey make_key(const Vec2& mid, double length) {
  return {std::llround(mid.x() / kQuant), std::llround(mid.y() / kQuant),
          std::llround(length / kQuant)};
}

struct Search {
  const Puzzle& puzzle;
  std::vector<std::vector<Vec2>> candidates;  // per piece
  bool preset_mode;
  int limit;
  long long nodes = 0;
  bool exhausted = true;
  std::vector<int> assignment;
  std::vector<std::vector<int>> solutions;
  OpenMap open;
  int open_total = 0;
  std::vector<char> cell_used;

  explicit Search(const Puzzle& p) : puzzle(p) {}

  // Pairs or registers all surfaces of piece `i` at translation `t`.
  // Returns false on a conflict; `journal` records undo operations.
  bool push_piece(int i, const Vec2& t, std::vector<std::pair<SurfaceKey, int>>& journal) {
    for (const auto& e : puzzle.pieces[i].edges) {
      const SurfaceKey key = make_key(t + e.offset, e.length());
      auto& bucket = open[key];
      if (!bucket.empty()) {
        const auto& [color, orientation] = bucket.back();
        if (color != e.color || orientation != e.orientation.opposite()) return false;
        bucket.pop_back();
        --open_total;
        journal.push_back({key, -1});
      } else {
        bucket.push_back({e.color, e.orientation});
        ++open_total;
        journal.push_back({key, +1});
      }
    }
    return true;
  }

  void undo(int i, const std::vector<std::pair<SurfaceKey, int>>& journal) {
    // Replay backwards: re-open the paired partner, drop what was added.
    const auto& edges = puzzle.pieces[i].edges;
    for (int j = static_cast<int>(journal.size()) - 1; j >= 0; --j) {
      const auto& [key, delta] = journal[j];
      auto& bucket = open[key];
      if (delta > 0) {
        bucket.pop_back();
        --open_total;
      } else {
        const auto& e = edges[j];
        bucket.push_back({e.color, e.orientation.opposite()});
        ++open_total;
      }
    }
  }

  bool overlaps_placed(int i, const Vec2& t, int depth, const std::vector<int>& order) const {
    std::vector<Vec2> poly;
    for (const auto& v : puzzle.pieces[i].vertices) poly.push_back(v + t);
    for (int d = 0; d < depth; ++d) {
      const int j = order[d];
      std::vector<Vec2> other;
      const Vec2 tj = candidates[j][assignment[j]];
      for (const auto& v : puzzle.pieces[j].vertices) other.push_back(v + tj);
      if (polygons_interiors_overlap(poly, other)) return true;
    }
    return false;
  }

  void record_if_solution() {
    if (open_total != 0) return;
    Placement placement;
    const int n = puzzle.piece_count();
    for (int i = 0; i < n; ++i)
      placement.translations.push_back(candidates[i][assignment[i]]);
    placement.orientations.assign(n, Turn());
    if (validate_solution(puzzle, placement).is_valid) solutions.push_back(assignment);
  }

  // Preset mode: fill cells in order, choosing an unused piece for each.
  void dfs_cells(int cell) {
    if (static_cast<int>(solutions.size()) >= limit) return;
    if (++nodes > 2'000'000'000LL) {
      exhausted = false;
      return;
    }
    const int n = puzzle.piece_count();
    if (cell == n) {
      record_if_solution();
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (assignment[i] >= 0) continue;
      std::vector<std::pair<SurfaceKey, int>> journal;
      if (push_piece(i, candidates[i][cell], journal)) {
        assignment[i] = cell;
        dfs_cells(cell + 1);
        assignment[i] = -1;
      }
      undo(i, journal);
    }
  }

  // Anchored mode: place pieces in order, trying their candidate locations.
  void dfs_pieces(int depth, const std::vector<int>& order) {
    if (static_cast<int>(solutions.size()) >= limit) return;
    if (++nodes > 2'000'000'000LL) {
      exhausted = false;
      return;
    }
    const int n = puzzle.piece_count();
    if (depth == n) {
      record_if_solution();
      return;
    }
    const int i = order[depth];
    for (int c = 0; c < static_cast<int>(candidates[i].size()); ++c) {
      const Vec2 t = candidates[i][c];
      std::vector<std::pair<SurfaceKey, int>> journal;
      if (push_piece(i, t, journal) && !overlaps_placed(i, t, depth, order)) {
        assignment[i] = c;
        dfs_pieces(depth + 1, order);
        assignment[i] = -1;
      }
      undo(i, journal);
    }
  }
};

}  // namespace

SolutionSet brute_force_solve(const Puzzle& puzzle, int limit) {
  if (puzzle.rotation_order != 1)
    throw std::invalid_argument("brute_force_solve: translation-only puzzles");
  const int n = puzzle.piece_count();
  SolutionSet out;
  out.exhausted = true;
  if (n == 0) return out;

  Search s(puzzle);
  s.limit = limit;
  s.assignment.assign(n, -1);
  s.candidates.resize(n);
  s.preset_mode = puzzle.preset_locations.has_value();

  double log_nodes = 0;
  if (s.preset_mode) {
    if (n > 12)
      throw std::invalid_argument("brute_force_solve: preset puzzles limited to 12 pieces");
    for (int i = 0; i < n; ++i) s.candidates[i] = *puzzle.preset_locations;
    for (int i = 2; i <= n; ++i) log_nodes += std::log10(double(i));
  } else {
    for (int i = 0; i < n; ++i) {
      std::vector<Vec2> cands;
      for (const auto& pe : puzzle.pieces[i].edges)
        for (const auto& fe : puzzle.frame.edges) {
          if (fe.color != pe.color) continue;
          if (fe.orientation != pe.orientation.opposite()) continue;
          if (std::abs(fe.length() - pe.length()) > 1e-9) continue;
          const Vec2 t = fe.offset - pe.offset;
          bool dup = false;
          for (const auto& c : cands)
            if ((c - t).norm() < 1e-9) dup = true;
          if (!dup) cands.push_back(t);
        }
      if (cands.empty()) return out;  // piece cannot touch the frame anywhere
      log_nodes += std::log10(double(cands.size()));
      s.candidates[i] = std::move(cands);
    }
  }
  if (log_nodes > 9)
    throw std::invalid_argument("brute_force_solve: estimated search space exceeds 1e9 nodes");

  // The frame's surfaces start open and must all be consumed.
  for (const auto& e : puzzle.frame.edges) {
    s.open[make_key(e.offset, e.length())].push_back({e.color, e.orientation});
    ++s.open_total;
  }

  if (s.preset_mode) {
    s.dfs_cells(0);
  } else {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    s.dfs_pieces(0, order);
  }

  std::sort(s.solutions.begin(), s.solutions.end());
  for (const auto& a : s.solutions) {
    Placement p;
    for (int i = 0; i < n; ++i) p.translations.push_back(s.candidates[i][a[i]]);
    p.orientations.assign(n, Turn());
    out.placements.push_back(std::move(p));
  }
  out.exhausted = s.exhausted;
  return out;
}

double power_sum_check(std::span<const std::complex<double>> u,
                       std::span<const std::complex<double>> v, int K) {
  if (u.size() != v.size()) throw std::invalid_argument("power_sum_check: length mismatch");
  if (K < 1) throw std::invalid_argument("power_sum_check: K >= 1");
  double worst = 0;
  std::vector<std::complex<double>> up(u.begin(), u.end()), vp(v.begin(), v.end());
  for (int k = 1; k <= K; ++k) {
    std::complex<double> su = 0, sv = 0;
    for (std::size_t i = 0; i < up.size(); ++i) {
      su += up[i];
      sv += vp[i];
    }
    worst = std::max(worst, std::abs(su - sv));
    if (k < K)
      for (std::size_t i = 0; i < up.size(); ++i) {
        up[i] *= u[i];
        vp[i] *= v[i];
      }
  }
  return worst;
}

Lemma2Report lemma2_witness_test(std::span<const std::complex<double>> v, int trials,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(v.size());
  if (n < 1 || n > 4)
    throw std::invalid_argument("lemma2_witness_test: desk scale requires 1 <= N <= 4");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v[i] - v[j]) < 1e-8)
        throw std::invalid_argument("lemma2_witness_test: entries must be pairwise distinct");

  Lemma2Report report;
  std::vector<std::complex<double>> perm(v.begin(), v.end());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  bool all_pass = true;
  do {
    for (int i = 0; i < n; ++i) perm[i] = v[idx[i]];
    const double viol = power_sum_check(perm, v, n);
    report.max_permutation_violation = std::max(report.max_permutation_violation, viol);
    if (viol > 1e-10) all_pass = false;
  } while (std::next_permutation(idx.begin(), idx.end()));
  report.permutations_pass = all_pass;

  double scale = 0;
  for (const auto& z : v) scale = std::max(scale, std::abs(z));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-scale - 1.0, scale + 1.0);
  report.min_witness_violation = std::numeric_limits<double>::infinity();
  std::vector<std::complex<double>> w(n);
  for (int t = 0; t < trials; ++t) {
    bool near;
    do {
      for (int i = 0; i < n; ++i) w[i] = {coord(rng), coord(rng)};
      near = false;
      std::vector<int> p(n);
      for (int i = 0; i < n; ++i) p[i] = i;
      do {
        double d = 0;
        for (int i = 0; i < n; ++i) d = std::max(d, std::abs(w[i] - v[p[i]]));
        if (d < 1e-8) near = true;
      } while (!near && std::next_permutation(p.begin(), p.end()));
    } while (near);
    const double viol = power_sum_check(w, v, n);
    report.witnesses_tested++;
    if (viol > 1e-6) report.witnesses_violating++;
    report.min_witness_violation = std::min(report.min_witness_violation, viol);
  }
  return report;
}

std::vector<std::complex<double>> elementary_from_power_sums(
    std::span<const std::complex<double>> p) {
  // Newton: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i, with e_0 = 1.
  const int n = static_cast<int>(p.size());
  std::vector<std::complex<double>> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    std::complex<double> acc = 0;
    for (int i = 1; i <= k; ++i) acc += (i % 2 ? 1.0 : -1.0) * e[k - i] * p[i - 1];
    e[k] = acc / double(k);
  }
  return {e.begin() + 1, e.end()};
}

}  // namespace edgematch
