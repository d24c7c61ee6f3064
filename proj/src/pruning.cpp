#include <algorithm>
#include <set>

#include "graph_algorithms.hpp"

namespace hexgraph {

namespace {

// Mutable view with stable ids. Deleted nodes keep their slot but lose all
// edges.
class Workspace {
 public:
  Workspace(const ShannonGraph& g, std::mt19937_64* rng) : graph_(g), rng_(rng) {
    adj_.resize(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) adj_[v] = g.neighbors(v);
    alive_.assign(g.num_nodes(), 1);
  }

  PruneResult run(std::vector<NodeId> candidates) {
    while (!candidates.empty()) {
      candidates = pass(std::move(candidates));
    }
    PruneResult out{graph_, removed_, joined_, std::move(stats_)};
    std::sort(out.joined.begin(), out.joined.end());
    for (auto [a, b] : added_) out.graph.add_edge(a, b);
    std::sort(out.removed.begin(), out.removed.end());
    out.graph.remove_nodes(out.removed);
    return out;
  }

 private:
  bool terminal(NodeId v) const { return graph_.is_terminal(v); }

  bool adjacent(NodeId a, NodeId b) const {
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  bool fully_connected(const std::vector<NodeId>& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      touch(nodes[i]);
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (!adjacent(nodes[i], nodes[j])) return false;
      }
    }
    return true;
  }

  static std::vector<NodeId> without(const std::vector<NodeId>& set, NodeId x) {
    std::vector<NodeId> out;
    out.reserve(set.size());
    for (NodeId y : set) {
      if (y != x) out.push_back(y);
    }
    return out;
  }

  void touch(NodeId v) { touched_.insert(v); }

  void link(NodeId a, NodeId b) {
    if (a == b || adjacent(a, b)) return;
    adj_[a].insert(std::lower_bound(adj_[a].begin(), adj_[a].end(), b), b);
    adj_[b].insert(std::lower_bound(adj_[b].begin(), adj_[b].end(), a), a);
    added_.emplace_back(a, b);
  }

  void erase(NodeId v) {
    for (NodeId u : adj_[v]) {
      auto& n = adj_[u];
      n.erase(std::lower_bound(n.begin(), n.end(), v));
    }
    adj_[v].clear();
    alive_[v] = 0;
    removed_.push_back(v);
  }

  std::vector<NodeId> pass(std::vector<NodeId> candidates) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (rng_) std::shuffle(candidates.begin(), candidates.end(), *rng_);
    touched_.clear();
    ++stats_.passes;
    stats_.pass_candidates.push_back(candidates);

    std::set<NodeId> next;
    auto add_all = [&](const std::vector<NodeId>& nodes) {
      next.insert(nodes.begin(), nodes.end());
    };

    for (NodeId v : candidates) {
      if (!alive_[v] || terminal(v)) continue;
      touch(v);
      const std::vector<NodeId> nv = adj_[v];

      if (fully_connected(nv)) {
        add_all(nv);
        erase(v);
        ++stats_.dead;
        continue;
      }

      // Twins: Short answers a move on one by taking the other.
      bool captured = false;
      if (!nv.empty()) {
        const NodeId first =
            rng_ ? nv[std::uniform_int_distribution<std::size_t>(0, nv.size() - 1)(*rng_)]
                 : nv.front();
        touch(first);
        std::vector<NodeId> partners = {first};
        partners.insert(partners.end(), adj_[first].begin(), adj_[first].end());
        if (rng_) std::shuffle(partners.begin() + 1, partners.end(), *rng_);
        for (NodeId n : partners) {
          if (n == v || terminal(n) || !alive_[n]) continue;
          touch(n);
          const std::vector<NodeId> rest = without(nv, n);
          if (rest != without(adj_[n], v)) continue;
          add_all(rest);
          for (std::size_t i = 0; i < nv.size(); ++i) {
            for (std::size_t j = i + 1; j < nv.size(); ++j) link(nv[i], nv[j]);
          }
          erase(v);
          erase(n);
          joined_.push_back(v);
          ++stats_.short_captures;
          captured = true;
          break;
        }
      }
      if (captured) continue;

      std::vector<NodeId> order = nv;
      if (rng_) std::shuffle(order.begin(), order.end(), *rng_);
      for (NodeId n : order) {
        if (terminal(n) || !alive_[n]) continue;
        touch(n);
        const std::vector<NodeId> rest_v = without(nv, n);
        const std::vector<NodeId> rest_n = without(adj_[n], v);
        if (!fully_connected(rest_v) || !fully_connected(rest_n)) continue;
        add_all(rest_v);
        add_all(rest_n);
        erase(v);
        erase(n);
        ++stats_.cut_captures;
        break;
      }
    }
    stats_.pass_touched.emplace_back(touched_.begin(), touched_.end());

    std::vector<NodeId> out;
    for (NodeId u : next) {
      if (alive_[u] && !terminal(u)) out.push_back(u);
    }
    return out;
  }

  const ShannonGraph& graph_;
  std::mt19937_64* rng_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<char> alive_;
  std::vector<NodeId> removed_;
  std::vector<NodeId> joined_;
  std::vector<std::pair<NodeId, NodeId>> added_;
  std::set<NodeId> touched_;
  PruneStats stats_;
};

}  // namespace

PruneResult prune_dead_captured(const ShannonGraph& graph,
                                const std::vector<NodeId>& candidates,
                                std::mt19937_64* rng) {
  for (NodeId v : candidates) {
    require(graph.contains(v), ErrorCode::kInvalidArgument,
            "candidate " + std::to_string(v) + " is not a node");
    require(!graph.is_terminal(v), ErrorCode::kInvalidArgument,
            "terminal " + std::to_string(v) + " cannot be a pruning candidate");
  }
  return Workspace(graph, rng).run(candidates);
}

PruneResult prune_all(const ShannonGraph& graph, std::mt19937_64* rng) {
  return prune_dead_captured(graph, graph.playable_nodes(), rng);
}

}  // namespace hexgraph
