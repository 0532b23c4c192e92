#ifndef SPLITWISE_TREESPLIT_HPP
#define SPLITWISE_TREESPLIT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace splitwise {

// Controls for the shallow regression-tree split search. Defaults follow the
// conventional recursive-partitioning settings: a split must improve SSE by
// at least cp times the root deviance, nodes under minsplit rows are not
// split, and children under minbucket rows are not allowed.
struct TreeParams {
  int max_depth = 2;  // 1 or 2
  double cp = 0.01;
  std::size_t minsplit = 20;
  std::size_t minbucket = 7;

  void validate() const;  // throws Error on violated invariants
};

struct SplitCandidate {
  double cut = 0;       // midpoint between two adjacent distinct x values
  double sse_gain = 0;  // SSE(node) - [SSE(left) + SSE(right)]
};

// Zero, one, or two retained cuts, sorted ascending, plus the node SSE
// before and after partitioning on them.
struct SplitResult {
  std::vector<double> cuts;
  double sse_root = 0;
  double sse_after = 0;
};

// Best single split of target on x: candidate cuts are midpoints between
// consecutive distinct sorted x values; both sides must have at least
// minbucket rows; the gain must be positive and at least cp times the node
// SSE. Returns nothing when no candidate qualifies or n < minsplit. Ties
// break toward the smallest cut. Throws Error on length mismatch or n == 0.
std::optional<SplitCandidate> best_single_split(std::span<const double> x,
                                                std::span<const double> target,
                                                const TreeParams& params);

// Root split, then (at max_depth 2) one optional split in each child; child
// splits are kept when their gain is at least cp times the *root* SSE, and
// if both children qualify only the larger gain survives, so there are at
// most two cuts (three segments).
SplitResult shallow_tree_cuts(std::span<const double> x,
                              std::span<const double> target,
                              const TreeParams& params);

}  // namespace splitwise

#endif  // SPLITWISE_TREESPLIT_HPP
