#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hex_board.hpp"

namespace hexgraph {

// Short joins (wants the terminals adjacent), Cut deletes (wants them
// separated). In a perspective graph the perspective color plays Short.
enum class Role : std::uint8_t { kShort = 0, kCut = 1 };

constexpr Role other(Role r) { return r == Role::kShort ? Role::kCut : Role::kShort; }
const char* role_name(Role r);

enum class GameStatus { kOngoing, kShortWins, kCutWins };

using NodeId = int;

struct NodeLabel {
  // terminal == 0 for a tile, 1 or 2 for the two border nodes.
  int terminal = 0;
  Cell cell{};
  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

// Shannon vertex-switching game state. Node ids are dense (0..N-1) and are
// re-packed in order after every deletion; labels follow their nodes.
class ShannonGraph {
 public:
  ShannonGraph() = default;

  // Terminals are the last two ids. Tile labels are synthetic (row = id).
  static ShannonGraph from_edges(int num_nodes,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges,
                                 NodeId t1, NodeId t2, Role to_move,
                                 Color perspective = Color::kRed);

  int num_nodes() const { return static_cast<int>(adj_.size()); }
  int num_edges() const;
  int num_playable() const { return num_nodes() - 2; }

  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
  bool adjacent(NodeId a, NodeId b) const;
  NodeId t1() const { return t1_; }
  NodeId t2() const { return t2_; }
  bool is_terminal(NodeId v) const { return v == t1_ || v == t2_; }
  bool contains(NodeId v) const { return v >= 0 && v < num_nodes(); }

  Role to_move() const { return to_move_; }
  void set_to_move(Role r) { to_move_ = r; }
  Color perspective() const { return perspective_; }

  const NodeLabel& label(NodeId v) const { return labels_[v]; }
  void set_cell_label(NodeId v, Cell cell) { labels_[v].cell = cell; }
  std::optional<NodeId> node_of(Cell cell) const;
  std::string label_string(NodeId v) const;

  std::vector<NodeId> playable_nodes() const;

  // Moves. Both throw kIllegalMove for terminals, missing nodes or the wrong
  // side to move, and flip the side to move.
  void apply_join(NodeId v);
  void apply_cut(NodeId v);
  ShannonGraph join(NodeId v) const;
  ShannonGraph cut(NodeId v) const;

  GameStatus status() const;

  // Low-level edits used by pruning and tests. None of them change to_move.
  void add_edge(NodeId a, NodeId b);
  void connect_all(std::span<const NodeId> nodes);
  // Deletes the given non-terminal nodes and re-packs ids.
  void remove_nodes(std::vector<NodeId> nodes);

  friend bool operator==(const ShannonGraph&, const ShannonGraph&) = default;

 private:
  friend ShannonGraph from_board(const HexBoard& board, Color perspective);

  std::vector<std::vector<NodeId>> adj_;
  std::vector<NodeLabel> labels_;
  NodeId t1_ = -1;
  NodeId t2_ = -1;
  Role to_move_ = Role::kShort;
  Color perspective_ = Color::kRed;
};

// One node per empty tile (row-major) followed by the two borders of the
// perspective color. Perspective-colored chains are contracted into cliques
// over their empty/border neighbours; opponent stones are dropped.
// Throws kInvalidState for won positions.
ShannonGraph from_board(const HexBoard& board, Color perspective);

inline Role role_of(Color mover, Color perspective) {
  return mover == perspective ? Role::kShort : Role::kCut;
}

struct GraphEncoding {
  int num_nodes = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;  // both directions
  std::vector<float> features;                  // num_nodes x 2: [is_t1, is_t2]
  Role to_move = Role::kShort;
};

GraphEncoding encode(const ShannonGraph& graph);

// {"nodes":[{"id","label","terminal"}],"edges":[[u,v]],"to_move","perspective"}
std::string graph_to_json(const ShannonGraph& graph);
ShannonGraph graph_from_json(std::string_view text);

}  // namespace hexgraph
