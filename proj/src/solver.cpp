#include <algorithm>
#include <bit>
#include <unordered_map>

#include "graph_algorithms.hpp"

namespace hexgraph {

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(int v) { return Mask{1} << v; }

struct KeyHash {
  std::size_t operator()(const std::vector<Mask>& key) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Mask m : key) {
      h ^= m;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

class Solver {
 public:
  Solver(const ShannonGraph& g, const SolveOptions& options)
      : options_(options), n_(g.num_nodes()), t1_(g.t1()), t2_(g.t2()) {
    require(g.num_playable() <= options.max_playable && g.num_nodes() <= 64,
            ErrorCode::kResourceLimit,
            "solver limited to " + std::to_string(options.max_playable) +
                " playable nodes, graph has " + std::to_string(g.num_playable()));
    adj_.assign(n_, 0);
    for (NodeId v = 0; v < n_; ++v) {
      for (NodeId u : g.neighbors(v)) adj_[v] |= bit(u);
    }
    alive_ = n_ == 64 ? ~Mask{0} : bit(n_) - 1;
  }

  struct State {
    std::vector<Mask> adj;
    Mask alive;
  };

  State root() const { return {adj_, alive_}; }

  // Nodes reachable from t1 through alive nodes.
  Mask reach(const State& s, Mask alive) const {
    Mask seen = bit(t1_);
    Mask frontier = seen;
    while (frontier) {
      Mask next = 0;
      for (Mask f = frontier; f; f &= f - 1) next |= s.adj[std::countr_zero(f)];
      next &= alive & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen;
  }

  GameStatus status(const State& s) const {
    if (s.adj[t1_] & bit(t2_)) return GameStatus::kShortWins;
    if (!(reach(s, s.alive) & bit(t2_))) return GameStatus::kCutWins;
    return GameStatus::kOngoing;
  }

  Mask playable(const State& s) const { return s.alive & ~bit(t1_) & ~bit(t2_); }

  State join(const State& s, int v) const {
    State c = s;
    const Mask hood = s.adj[v] & s.alive & ~bit(v);
    for (Mask m = hood; m; m &= m - 1) {
      const int u = std::countr_zero(m);
      c.adj[u] |= hood & ~bit(u);
    }
    c.alive &= ~bit(v);
    return c;
  }

  State cut(const State& s, int v) const {
    State c = s;
    c.alive &= ~bit(v);
    return c;
  }

  // Drops nodes outside the terminals' component: moves there are passes,
  // which never help either side in this monotone game.
  void normalize(State& s) const { s.alive &= reach(s, s.alive) | bit(t2_); }

  // True iff the side to move wins. Assumes an ongoing position.
  bool wins(State s, Role to_move) {
    if (++nodes_ > options_.node_budget) {
      fail(ErrorCode::kResourceLimit, "solver node budget exhausted");
    }
    normalize(s);
    std::vector<Mask> key;
    key.reserve(n_ + 2);
    key.push_back(s.alive | (to_move == Role::kCut ? bit(63) : 0));
    for (Mask m = s.alive; m; m &= m - 1) key.push_back(s.adj[std::countr_zero(m)] & s.alive);
    if (auto it = table_.find(key); it != table_.end()) return it->second;

    const bool result = to_move == Role::kShort ? short_wins(s) : cut_wins(s);
    table_.emplace(std::move(key), result);
    return result;
  }

  std::vector<int> ordered_moves(const State& s) const {
    std::vector<int> moves;
    for (Mask m = playable(s); m; m &= m - 1) moves.push_back(std::countr_zero(m));
    std::stable_sort(moves.begin(), moves.end(), [&](int a, int b) {
      return std::popcount(s.adj[a] & s.alive) > std::popcount(s.adj[b] & s.alive);
    });
    return moves;
  }

  bool immediate_short_win(const State& s, int v) const {
    return (s.adj[v] & bit(t1_)) && (s.adj[v] & bit(t2_));
  }

  bool immediate_cut_win(const State& s, int v) const {
    return !(reach(s, s.alive & ~bit(v)) & bit(t2_));
  }

  bool short_wins(const State& s) {
    const auto moves = ordered_moves(s);
    for (int v : moves) {
      if (immediate_short_win(s, v)) return true;
    }
    for (int v : moves) {
      if (!wins(join(s, v), Role::kCut)) return true;
    }
    return false;
  }

  bool cut_wins(const State& s) {
    const auto moves = ordered_moves(s);
    for (int v : moves) {
      if (immediate_cut_win(s, v)) return true;
    }
    for (int v : moves) {
      if (!wins(cut(s, v), Role::kShort)) return true;
    }
    return false;
  }

  // Whether playing v wins for the mover, including immediate wins.
  bool move_wins(const State& s, Role to_move, int v) {
    const State child = to_move == Role::kShort ? join(s, v) : cut(s, v);
    const GameStatus st = status(child);
    if (st != GameStatus::kOngoing) {
      return (st == GameStatus::kShortWins) == (to_move == Role::kShort);
    }
    return !wins(child, other(to_move));
  }

  std::int64_t nodes() const { return nodes_; }

 private:
  SolveOptions options_;
  int n_;
  int t1_;
  int t2_;
  std::vector<Mask> adj_;
  Mask alive_ = 0;
  std::int64_t nodes_ = 0;
  std::unordered_map<std::vector<Mask>, bool, KeyHash> table_;
};

GameStatus winner_status(Role r) {
  return r == Role::kShort ? GameStatus::kShortWins : GameStatus::kCutWins;
}

}  // namespace

SolveResult solve(const ShannonGraph& graph, const SolveOptions& options) {
  Solver solver(graph, options);
  const auto root = solver.root();
  SolveResult out;
  out.value = solver.status(root);
  if (out.value != GameStatus::kOngoing) return out;
  const Role mover = graph.to_move();
  const bool win = solver.wins(root, mover);
  out.value = win ? winner_status(mover) : winner_status(other(mover));
  if (win) {
    for (int v : solver.ordered_moves(root)) {
      if (solver.move_wins(root, mover, v)) {
        out.best_move = v;
        break;
      }
    }
  }
  out.nodes = solver.nodes();
  return out;
}

std::vector<NodeId> winning_moves(const ShannonGraph& graph, const SolveOptions& options) {
  Solver solver(graph, options);
  const auto root = solver.root();
  std::vector<NodeId> out;
  if (solver.status(root) != GameStatus::kOngoing) return out;
  for (NodeId v : graph.playable_nodes()) {
    if (solver.move_wins(root, graph.to_move(), v)) out.push_back(v);
  }
  return out;
}

}  // namespace hexgraph
