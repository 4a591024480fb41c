#pragma once

#include <complex>
#include <span>
#include <vector>

#include "edgematch/geometry.hpp"

namespace edgematch {

struct SolutionSet {
  std::vector<Placement> placements;  // lexicographic on the assignment vector
  bool exhausted = false;
};

// Exhaustive depth-first search over placements with edge-compatibility
// pruning. Preset-location puzzles enumerate assignments of pieces to preset
// cells; other polygonal puzzles derive per-piece candidate locations by
// anchoring piece edges to compatible frame edges. Refuses searches whose
// estimated size exceeds 1e9 nodes.
SolutionSet brute_force_solve(const Puzzle& puzzle, int limit = 1 << 20);

// max over k <= K of |sum u_i^k - sum v_i^k|.
double power_sum_check(std::span<const std::complex<double>> u,
                       std::span<const std::complex<double>> v, int K);

struct Lemma2Report {
  bool permutations_pass = false;
  double max_permutation_violation = 0.0;
  int witnesses_tested = 0;
  int witnesses_violating = 0;
  double min_witness_violation = 0.0;
};

// Checks the multiset-determination content of the bipartite power-sum
// system: every permutation of v satisfies it with K = N, and seeded random
// non-permutations violate it. Entries must be pairwise distinct; N <= 4.
Lemma2Report lemma2_witness_test(std::span<const std::complex<double>> v, int trials,
                                 std::uint64_t seed);

// Elementary symmetric polynomials from power sums via Newton's identities.
std::vector<std::complex<double>> elementary_from_power_sums(
    std::span<const std::complex<double>> p);

}  // namespace edgematch
