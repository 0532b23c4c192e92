#ifndef SPLITWISE_TEST_ORACLES_HPP
#define SPLITWISE_TEST_ORACLES_HPP

// Brute-force reference implementations the test and acceptance suites check
// the library against. These recompute everything directly from definitions
// (no prefix sums, no incremental state) and must stay independent of the
// code paths under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "splitwise/encode.hpp"
#include "splitwise/error.hpp"
#include "splitwise/linmod.hpp"
#include "splitwise/treesplit.hpp"

namespace test_oracles {

inline double seg_sse(const std::vector<double>& t) {
  if (t.empty()) return 0.0;
  double m = 0;
  for (double v : t) m += v;
  m /= static_cast<double>(t.size());
  double s = 0;
  for (double v : t) s += (v - m) * (v - m);
  return s;
}

// Single split by direct evaluation of every midpoint between consecutive
// distinct sorted x values, under the same minsplit/minbucket/cp rules.
inline std::optional<splitwise::SplitCandidate> brute_single(
    const std::vector<double>& x, const std::vector<double>& t,
    const splitwise::TreeParams& p) {
  const std::size_t n = x.size();
  if (n < p.minsplit) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  const double root = seg_sse(t);
  std::optional<splitwise::SplitCandidate> best;
  double best_sse = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lo = x[order[i]], hi = x[order[i + 1]];
    if (!(hi > lo)) continue;
    const double cut = lo + (hi - lo) / 2;
    std::vector<double> left, right;
    for (std::size_t r = 0; r < n; ++r) (x[r] < cut ? left : right).push_back(t[r]);
    if (left.size() < p.minbucket || right.size() < p.minbucket) continue;
    const double after = seg_sse(left) + seg_sse(right);
    if (!best || after < best_sse) {
      best = splitwise::SplitCandidate{cut, root - after};
      best_sse = after;
    }
  }
  if (best && (best->sse_gain <= 0 || best->sse_gain < p.cp * root)) return std::nullopt;
  return best;
}

// Greedy-family two-level reference: root split first, then the best child
// split pruned against the root SSE; the larger child gain is kept when both
// qualify, the left child on ties.
inline splitwise::SplitResult brute_tree(const std::vector<double>& x,
                                         const std::vector<double>& t,
                                         const splitwise::TreeParams& p) {
  splitwise::SplitResult res;
  res.sse_root = seg_sse(t);
  res.sse_after = res.sse_root;
  const auto root = brute_single(x, t, p);
  if (!root) return res;
  res.cuts = {root->cut};

  if (p.max_depth == 2) {
    std::vector<double> lx, lt, rx, rt;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < root->cut) {
        lx.push_back(x[i]);
        lt.push_back(t[i]);
      } else {
        rx.push_back(x[i]);
        rt.push_back(t[i]);
      }
    }
    const auto qualify = [&](const std::vector<double>& cx, const std::vector<double>& ct)
        -> std::optional<splitwise::SplitCandidate> {
      splitwise::TreeParams loose = p;
      loose.cp = 0.0;
      auto c = brute_single(cx, ct, loose);
      if (c && c->sse_gain > 0 && c->sse_gain >= p.cp * res.sse_root) return c;
      return std::nullopt;
    };
    const auto lc = qualify(lx, lt);
    const auto rc = qualify(rx, rt);
    std::optional<splitwise::SplitCandidate> kept;
    if (lc) kept = lc;
    if (rc && (!kept || rc->sse_gain > kept->sse_gain)) kept = rc;
    if (kept) res.cuts.push_back(kept->cut);
  }
  std::sort(res.cuts.begin(), res.cuts.end());
  std::vector<std::vector<double>> segs(res.cuts.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t s = 0;
    while (s < res.cuts.size() && x[i] >= res.cuts[s]) ++s;
    segs[s].push_back(t[i]);
  }
  res.sse_after = 0;
  for (const auto& s : segs) res.sse_after += seg_sse(s);
  return res;
}

// Explicit enumeration of the four single-variable candidates with the
// simpler-wins tie rule.
inline std::pair<splitwise::Encoding, double> enumerate_univariate(
    const std::vector<double>& x, const std::vector<double>& y,
    splitwise::Criterion crit, const splitwise::TreeParams& params) {
  using namespace splitwise;
  const std::size_t n = x.size();
  const auto crit_for = [&](const std::vector<EncodedColumn>& cols) {
    std::vector<std::pair<std::string, std::span<const double>>> named;
    for (const auto& c : cols) named.emplace_back(c.name, std::span<const double>(c.values));
    const OlsFit fit = fit_ols(make_design(n, named), y);
    if (!(fit.rss > 0)) return -std::numeric_limits<double>::infinity();
    return crit == Criterion::aic ? fit.aic : fit.bic;
  };

  std::vector<std::pair<Encoding, double>> cands;
  cands.emplace_back(Encoding::excluded(), crit_for({}));
  try {
    cands.emplace_back(Encoding::linear(),
                       crit_for(apply_encoding(x, "x", Encoding::linear())));
  } catch (const Error&) {
  }
  const auto root = best_single_split(x, y, params);
  if (root) {
    try {
      cands.emplace_back(Encoding::single_split(root->cut),
                         crit_for(apply_encoding(x, "x", Encoding::single_split(root->cut))));
    } catch (const Error&) {
    }
    const auto tree = shallow_tree_cuts(x, y, params);
    if (tree.cuts.size() == 2) {
      const auto enc = Encoding::double_split(tree.cuts[0], tree.cuts[1]);
      try {
        cands.emplace_back(enc, crit_for(apply_encoding(x, "x", enc)));
      } catch (const Error&) {
      }
    }
  }
  auto best = cands.front();
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].second < best.second - 1e-9) best = cands[i];
  return best;
}

}  // namespace test_oracles

#endif  // SPLITWISE_TEST_ORACLES_HPP
