#include <algorithm>
#include <map>

#include "graph_algorithms.hpp"

namespace hexgraph {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 31);
}

// Colour refinement. Both terminals start with the same colour; the result
// only depends on the graph structure, so colours are comparable across
// graphs.
std::vector<std::uint64_t> refine(const ShannonGraph& g) {
  const int n = g.num_nodes();
  std::vector<std::uint64_t> color(n);
  for (NodeId v = 0; v < n; ++v) color[v] = g.is_terminal(v) ? 0x7e57ULL : 0x1ULL;
  std::vector<std::uint64_t> next(n), scratch;
  for (int round = 0; round < n; ++round) {
    for (NodeId v = 0; v < n; ++v) {
      scratch.clear();
      for (NodeId u : g.neighbors(v)) scratch.push_back(color[u]);
      std::sort(scratch.begin(), scratch.end());
      std::uint64_t h = mix(color[v], scratch.size());
      for (std::uint64_t c : scratch) h = mix(h, c);
      next[v] = h;
    }
    // Stop once the partition is stable.
    auto classes = [](const std::vector<std::uint64_t>& c) {
      std::vector<std::uint64_t> s = c;
      std::sort(s.begin(), s.end());
      return std::unique(s.begin(), s.end()) - s.begin();
    };
    const bool stable = classes(next) == classes(color);
    color.swap(next);
    if (stable) break;
  }
  return color;
}

class Matcher {
 public:
  Matcher(const ShannonGraph& a, const ShannonGraph& b, std::vector<std::uint64_t> ca,
          std::vector<std::uint64_t> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)) {
    map_.assign(a.num_nodes(), -1);
    used_.assign(b.num_nodes(), 0);
    order_.resize(a.num_nodes());
    for (NodeId v = 0; v < a.num_nodes(); ++v) order_[v] = v;
    // Terminals first, then the most constrained nodes.
    std::stable_sort(order_.begin(), order_.end(), [&](NodeId x, NodeId y) {
      if (a.is_terminal(x) != a.is_terminal(y)) return a.is_terminal(x);
      return a.neighbors(x).size() > a.neighbors(y).size();
    });
  }

  bool search(std::size_t depth) {
    if (depth == order_.size()) return true;
    const NodeId v = order_[depth];
    for (NodeId w = 0; w < b_.num_nodes(); ++w) {
      if (used_[w] || cb_[w] != ca_[v] || a_.is_terminal(v) != b_.is_terminal(w)) continue;
      if (!consistent(v, w)) continue;
      map_[v] = w;
      used_[w] = 1;
      if (search(depth + 1)) return true;
      map_[v] = -1;
      used_[w] = 0;
    }
    return false;
  }

 private:
  bool consistent(NodeId v, NodeId w) const {
    for (NodeId u = 0; u < a_.num_nodes(); ++u) {
      if (map_[u] < 0) continue;
      if (a_.adjacent(v, u) != b_.adjacent(w, map_[u])) return false;
    }
    return true;
  }

  const ShannonGraph& a_;
  const ShannonGraph& b_;
  std::vector<std::uint64_t> ca_, cb_;
  std::vector<NodeId> map_;
  std::vector<char> used_;
  std::vector<NodeId> order_;
};

}  // namespace

std::uint64_t canonical_hash(const ShannonGraph& graph) {
  std::vector<std::uint64_t> color = refine(graph);
  std::sort(color.begin(), color.end());
  std::uint64_t h = mix(graph.num_nodes(), graph.num_edges());
  for (std::uint64_t c : color) h = mix(h, c);
  return h;
}

bool is_isomorphic(const ShannonGraph& a, const ShannonGraph& b, int max_playable) {
  require(a.num_playable() <= max_playable && b.num_playable() <= max_playable,
          ErrorCode::kResourceLimit,
          "exact isomorphism limited to " + std::to_string(max_playable) + " playable nodes");
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
  auto ca = refine(a);
  auto cb = refine(b);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  return Matcher(a, b, std::move(ca), std::move(cb)).search(0);
}

}  // namespace hexgraph
