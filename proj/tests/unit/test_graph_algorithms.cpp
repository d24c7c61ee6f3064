#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "graph_algorithms.hpp"

using namespace hexgraph;

namespace {

ShannonGraph relabel(const ShannonGraph& g, std::mt19937_64& rng) {
  const int n = g.num_nodes();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.neighbors(v)) {
      if (v < u) edges.emplace_back(perm[v], perm[u]);
    }
  }
  return ShannonGraph::from_edges(n, edges, perm[g.t1()], perm[g.t2()], g.to_move());
}

HexBoard random_position(int n, int stones, std::mt19937_64& rng) {
  while (true) {
    HexBoard b(n);
    for (int k = 0; k < stones && !b.is_over(); ++k) {
      auto empty = b.empty_cells();
      b.play(empty[rng() % empty.size()]);
    }
    if (!b.is_over()) return b;
  }
}

// Plain minimax without tables or move ordering.
bool brute_wins(const ShannonGraph& g) {
  for (NodeId v : g.playable_nodes()) {
    ShannonGraph c = g.to_move() == Role::kShort ? g.join(v) : g.cut(v);
    const GameStatus st = c.status();
    if (st == GameStatus::kShortWins) {
      if (g.to_move() == Role::kShort) return true;
      continue;
    }
    if (st == GameStatus::kCutWins) {
      if (g.to_move() == Role::kCut) return true;
      continue;
    }
    if (!brute_wins(c)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("dead node") {
  // t1=0, a=1, b=2, t2=3; edges t1-a, a-b, b-t2, t1-b.
  ShannonGraph g = ShannonGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}}, 0, 3, Role::kShort);
  PruneResult r = prune_dead_captured(g, {1});
  CHECK(r.removed == std::vector<NodeId>{1});
  CHECK(r.stats.dead == 1);
  CHECK(r.graph.num_nodes() == 3);
  CHECK(r.graph.to_move() == Role::kShort);
}

TEST_CASE("bridge is a short capture") {
  // t1=0, u=1, v=2, t2=3.
  ShannonGraph g =
      ShannonGraph::from_edges(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, 3, Role::kCut);
  PruneResult r = prune_dead_captured(g, {1, 2});
  CHECK(r.removed == std::vector<NodeId>{1, 2});
  CHECK(r.stats.short_captures == 1);
  CHECK(r.graph.num_nodes() == 2);
  CHECK(r.graph.status() == GameStatus::kShortWins);
  CHECK(r.graph.to_move() == Role::kCut);
}

TEST_CASE("chain is a cut capture") {
  // t1=0 - u=1 - v=2 - t2=3.
  ShannonGraph g = ShannonGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}, 0, 3, Role::kShort);
  PruneResult r = prune_dead_captured(g, {1, 2});
  CHECK(r.removed == std::vector<NodeId>{1, 2});
  CHECK(r.stats.cut_captures == 1);
  CHECK(r.graph.status() == GameStatus::kCutWins);
  // Two-ply minimax agrees for both sides to move.
  CHECK_FALSE(brute_wins(g));
  ShannonGraph cut_first = g;
  cut_first.set_to_move(Role::kCut);
  CHECK(brute_wins(cut_first));
}

TEST_CASE("terminal candidates are rejected") {
  ShannonGraph g = ShannonGraph::from_edges(3, {{1, 0}, {0, 2}}, 1, 2, Role::kShort);
  try {
    prune_dead_captured(g, {1});
    FAIL("expected invalid argument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("solver basics") {
  ShannonGraph s = ShannonGraph::from_edges(3, {{1, 0}, {0, 2}}, 1, 2, Role::kShort);
  CHECK(solve(s).value == GameStatus::kShortWins);
  CHECK(solve(s).best_move == 0);
  ShannonGraph c = s;
  c.set_to_move(Role::kCut);
  CHECK(solve(c).value == GameStatus::kCutWins);

  CHECK(solve(from_board(HexBoard(3), Color::kRed)).value == GameStatus::kShortWins);
  // Blue perspective of the same empty board: Red moves first, so Cut moves.
  CHECK(solve(from_board(HexBoard(3), Color::kBlue)).value == GameStatus::kCutWins);

  SolveOptions tiny;
  tiny.node_budget = 3;
  try {
    solve(from_board(HexBoard(3), Color::kRed), tiny);
    FAIL("expected resource limit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kResourceLimit);
  }
  CHECK_THROWS_AS(solve(from_board(HexBoard(5), Color::kRed)), Error);
}

TEST_CASE("solver agrees with plain minimax") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    HexBoard b = random_position(3 + static_cast<int>(t % 2), 4 + static_cast<int>(rng() % 4), rng);
    for (Color persp : {Color::kRed, Color::kBlue}) {
      ShannonGraph g = from_board(b, persp);
      if (g.num_playable() > 9) continue;
      const bool short_to_move_wins = brute_wins(g);
      const bool mover_short = g.to_move() == Role::kShort;
      const GameStatus expect = short_to_move_wins == mover_short ? GameStatus::kShortWins
                                                                  : GameStatus::kCutWins;
      REQUIRE(solve(g).value == expect);
    }
  }
}

TEST_CASE("pruning keeps the game value on small boards") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 150; ++t) {
    HexBoard b = random_position(4, 3 + static_cast<int>(rng() % 6), rng);
    ShannonGraph g = from_board(b, Color::kRed);
    for (Role r : {Role::kShort, Role::kCut}) {
      g.set_to_move(r);
      PruneResult p = prune_all(g, &rng);
      REQUIRE(solve(p.graph).value == solve(g).value);
      // Each pass only reads adjacency within two hops of its candidates.
      ShannonGraph seen = g;
      for (std::size_t pass = 0; pass < 1 && pass < p.stats.pass_touched.size(); ++pass) {
        std::set<NodeId> near;
        for (NodeId c : p.stats.pass_candidates[pass]) {
          near.insert(c);
          for (NodeId u : seen.neighbors(c)) {
            near.insert(u);
            for (NodeId w : seen.neighbors(u)) near.insert(w);
          }
        }
        for (NodeId v : p.stats.pass_touched[pass]) CHECK(near.count(v) == 1);
      }
    }
  }
}

TEST_CASE("canonical hash and isomorphism") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    HexBoard b = random_position(4, 6 + static_cast<int>(rng() % 4), rng);
    ShannonGraph g = from_board(b, Color::kRed);
    ShannonGraph h = relabel(g, rng);
    CHECK(canonical_hash(g) == canonical_hash(h));
    if (g.num_playable() <= 12) CHECK(is_isomorphic(g, h));
  }
  ShannonGraph p3 = ShannonGraph::from_edges(3, {{1, 0}, {0, 2}}, 1, 2, Role::kShort);
  ShannonGraph p4 = ShannonGraph::from_edges(4, {{2, 0}, {0, 1}, {1, 3}}, 2, 3, Role::kShort);
  CHECK_FALSE(is_isomorphic(p3, p4));
  CHECK(canonical_hash(p3) != canonical_hash(p4));

  // Different hashes never come with an isomorphism.
  for (int t = 0; t < 200; ++t) {
    ShannonGraph a = from_board(random_position(3, 3, rng), Color::kRed);
    ShannonGraph b = from_board(random_position(3, 3, rng), Color::kRed);
    if (canonical_hash(a) != canonical_hash(b)) CHECK_FALSE(is_isomorphic(a, b));
  }
  CHECK_THROWS_AS(is_isomorphic(from_board(HexBoard(4), Color::kRed),
                                from_board(HexBoard(4), Color::kRed)),
                  Error);
}
