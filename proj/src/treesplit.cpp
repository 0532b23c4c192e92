#include "splitwise/treesplit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "splitwise/error.hpp"

namespace splitwise {

void TreeParams::validate() const {
  if (max_depth != 1 && max_depth != 2) throw Error("tree params: max_depth must be 1 or 2");
  if (cp < 0) throw Error("tree params: cp must be >= 0");
  if (minbucket < 1) throw Error("tree params: minbucket must be >= 1");
  if (minsplit < 2 * minbucket)
    throw Error("tree params: minsplit must be >= 2 * minbucket");
}

namespace {

// (x, target) sorted by x with SSE prefix machinery.
struct SortedNode {
  std::vector<double> x;
  std::vector<double> t;
  std::vector<double> cum;    // cumulative sum of t
  std::vector<double> cum2;   // cumulative sum of t^2

  // SSE of t over [i, j).
  double seg_sse(std::size_t i, std::size_t j) const {
    const std::size_t m = j - i;
    if (m == 0) return 0.0;
    const double s = cum[j] - cum[i];
    const double s2 = cum2[j] - cum2[i];
    const double sse = s2 - s * s / static_cast<double>(m);
    return sse > 0 ? sse : 0.0;
  }
  double sse() const { return seg_sse(0, x.size()); }
  std::size_t size() const { return x.size(); }
};

SortedNode sort_node(std::span<const double> x, std::span<const double> t) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  SortedNode node;
  node.x.resize(n);
  node.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    node.x[i] = x[order[i]];
    node.t[i] = t[order[i]];
  }
  node.cum.assign(n + 1, 0.0);
  node.cum2.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    node.cum[i + 1] = node.cum[i] + node.t[i];
    node.cum2[i + 1] = node.cum2[i] + node.t[i] * node.t[i];
  }
  return node;
}

SortedNode slice(const SortedNode& node, std::size_t i, std::size_t j) {
  SortedNode out;
  out.x.assign(node.x.begin() + i, node.x.begin() + j);
  out.t.assign(node.t.begin() + i, node.t.begin() + j);
  const std::size_t m = out.x.size();
  out.cum.assign(m + 1, 0.0);
  out.cum2.assign(m + 1, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    out.cum[r + 1] = out.cum[r] + out.t[r];
    out.cum2[r + 1] = out.cum2[r] + out.t[r] * out.t[r];
  }
  return out;
}

struct RawSplit {
  double cut;
  std::size_t left_count;  // rows with x < cut
  double sse_after;
  double gain;
};

// Unconstrained-by-cp optimum over midpoint cuts; minsplit/minbucket still
// apply. First minimal SSE wins, which is the smallest cut.
std::optional<RawSplit> optimal_split(const SortedNode& node, const TreeParams& params) {
  const std::size_t n = node.size();
  if (n < params.minsplit) return std::nullopt;
  const double root = node.sse();
  std::optional<RawSplit> best;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(node.x[i + 1] > node.x[i])) continue;
    const std::size_t nl = i + 1;
    if (nl < params.minbucket || n - nl < params.minbucket) continue;
    const double s = node.seg_sse(0, nl) + node.seg_sse(nl, n);
    if (!best || s < best->sse_after) {
      const double cut = node.x[i] + (node.x[i + 1] - node.x[i]) / 2.0;
      best = RawSplit{cut, nl, s, root - s};
    }
  }
  return best;
}

bool passes_cp(double gain, double sse_root, double cp) {
  // Zero-gain splits never qualify, even with cp = 0 or a zero-SSE node.
  return gain > 0 && gain >= cp * sse_root;
}

}  // namespace

std::optional<SplitCandidate> best_single_split(std::span<const double> x,
                                                std::span<const double> target,
                                                const TreeParams& params) {
  params.validate();
  if (x.size() != target.size())
    throw Error("best_single_split: x and target lengths differ");
  if (x.empty()) throw Error("best_single_split: empty input");
  if (x.size() < 2) return std::nullopt;

  const SortedNode node = sort_node(x, target);
  const auto raw = optimal_split(node, params);
  if (!raw || !passes_cp(raw->gain, node.sse(), params.cp)) return std::nullopt;
  return SplitCandidate{raw->cut, raw->gain};
}

SplitResult shallow_tree_cuts(std::span<const double> x,
                              std::span<const double> target,
                              const TreeParams& params) {
  params.validate();
  if (x.size() != target.size())
    throw Error("shallow_tree_cuts: x and target lengths differ");
  if (x.empty()) throw Error("shallow_tree_cuts: empty input");

  const SortedNode node = sort_node(x, target);
  SplitResult result;
  result.sse_root = node.sse();
  result.sse_after = result.sse_root;

  const auto root = optimal_split(node, params);
  if (!root || !passes_cp(root->gain, result.sse_root, params.cp)) return result;

  result.cuts.push_back(root->cut);
  result.sse_after = root->sse_after;

  if (params.max_depth == 2) {
    // One candidate split per child, pruned against the root deviance; if
    // both qualify only the larger gain is kept, so cuts stay at most two.
    // Gain ties prefer the left child (the smaller cut).
    std::optional<RawSplit> kept;
    const SortedNode left = slice(node, 0, root->left_count);
    const SortedNode right = slice(node, root->left_count, node.size());
    for (const SortedNode* child : {&left, &right}) {
      const auto c = optimal_split(*child, params);
      if (c && passes_cp(c->gain, result.sse_root, params.cp)) {
        if (!kept || c->gain > kept->gain) kept = c;
      }
    }
    if (kept) {
      result.cuts.push_back(kept->cut);
      std::sort(result.cuts.begin(), result.cuts.end());
      // SSE over the three segments defined by the two cuts.
      const auto lo =
          std::lower_bound(node.x.begin(), node.x.end(), result.cuts[0]) - node.x.begin();
      const auto hi =
          std::lower_bound(node.x.begin(), node.x.end(), result.cuts[1]) - node.x.begin();
      result.sse_after = node.seg_sse(0, static_cast<std::size_t>(lo)) +
                         node.seg_sse(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)) +
                         node.seg_sse(static_cast<std::size_t>(hi), node.size());
    }
  }
  return result;
}

}  // namespace splitwise
