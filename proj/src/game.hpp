#pragma once

#include <optional>
#include <vector>

#include "graph_algorithms.hpp"
#include "hex_board.hpp"
#include "models.hpp"
#include "shannon_graph.hpp"

namespace hexgraph {

// A Hex position kept as a board and its Red-perspective graph (Red = Short).
// Actions are the graph's playable nodes in id order, which is row-major order
// of their cells. With pruning on, dead and captured cells are filled in on
// the board after every move, so the board's empty cells and the actions
// always coincide.
class GameState {
 public:
  explicit GameState(int size, bool prune = false);
  // Throws kInvalidState for won boards.
  explicit GameState(const HexBoard& board, bool prune = false);

  const HexBoard& board() const { return board_; }
  const ShannonGraph& graph() const { return graph_; }
  Position position() const { return {&graph_, &board_}; }
  bool prune() const { return prune_; }

  int size() const { return board_.size(); }
  Color to_move() const { return board_.to_move(); }
  int move_count() const { return board_.move_count(); }
  bool is_over() const { return winner_.has_value(); }
  std::optional<Color> winner() const { return winner_; }

  int num_actions() const { return static_cast<int>(actions_.size()); }
  const std::vector<Cell>& action_cells() const { return actions_; }
  Cell action_cell(int action) const;
  // -1 when the cell is not a legal action.
  int action_of(Cell cell) const;

  // Throws kGameOver after the end and kIllegalMove for bad actions.
  void play(int action);
  void play_cell(Cell cell);
  GameState after(int action) const;

  // Cells coloured by the last pruning step.
  const std::vector<std::pair<Cell, Stone>>& last_fill() const { return last_fill_; }

 private:
  void settle();

  HexBoard board_;
  ShannonGraph graph_;
  bool prune_ = false;
  std::optional<Color> winner_;
  std::vector<Cell> actions_;
  std::vector<std::pair<Cell, Stone>> last_fill_;
};

std::optional<Color> winner_of(GameStatus status);

}  // namespace hexgraph
