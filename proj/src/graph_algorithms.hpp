#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "shannon_graph.hpp"

namespace hexgraph {

struct PruneStats {
  int passes = 0;
  int dead = 0;
  int short_captures = 0;
  int cut_captures = 0;
  // Per pass: candidates and every node whose adjacency was read, as ids of
  // the input graph.
  std::vector<std::vector<NodeId>> pass_candidates;
  std::vector<std::vector<NodeId>> pass_touched;
};

struct PruneResult {
  ShannonGraph graph;
  std::vector<NodeId> removed;  // ids in the input graph, ascending
  // The subset of `removed` taken as Short moves (the captured node of a
  // short capture). Every other removed node is equivalent to a Cut move.
  std::vector<NodeId> joined;
  PruneStats stats;
};

// Dead and captured node removal, repeated on the affected neighbourhood until
// nothing changes. A short capture is applied as join(v) followed by deleting
// the partner. to_move is left alone. With rng set, the first neighbour and
// the scan orders are randomized.
PruneResult prune_dead_captured(const ShannonGraph& graph,
                                const std::vector<NodeId>& candidates,
                                std::mt19937_64* rng = nullptr);

// Prunes with every non-terminal node as a candidate.
PruneResult prune_all(const ShannonGraph& graph, std::mt19937_64* rng = nullptr);

struct SolveOptions {
  int max_playable = 22;
  std::int64_t node_budget = 20'000'000;
};

struct SolveResult {
  GameStatus value = GameStatus::kOngoing;  // kShortWins or kCutWins
  std::int64_t nodes = 0;
  // A winning move for the side to move, as a node id, when one exists and
  // the game is not already decided.
  NodeId best_move = -1;
};

// Exact value of the vertex-switching game by AND/OR search with a
// transposition table keyed on the full labelled state. Throws kResourceLimit
// when the graph is too large or the node budget runs out.
SolveResult solve(const ShannonGraph& graph, const SolveOptions& options = {});

// Every move of the side to move that wins with perfect play.
std::vector<NodeId> winning_moves(const ShannonGraph& graph,
                                  const SolveOptions& options = {});

// Refinement hash. Invariant under relabelling and under swapping t1/t2.
// to_move is not part of the hash.
std::uint64_t canonical_hash(const ShannonGraph& graph);

// Exact check with terminals mapped onto terminals. Throws kResourceLimit
// above max_playable non-terminal nodes.
bool is_isomorphic(const ShannonGraph& a, const ShannonGraph& b, int max_playable = 12);

}  // namespace hexgraph
