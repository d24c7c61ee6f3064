#include "game.hpp"

#include <algorithm>

namespace hexgraph {

std::optional<Color> winner_of(GameStatus status) {
  switch (status) {
    case GameStatus::kShortWins:
      return Color::kRed;
    case GameStatus::kCutWins:
      return Color::kBlue;
    case GameStatus::kOngoing:
      break;
  }
  return std::nullopt;
}

GameState::GameState(int size, bool prune) : GameState(HexBoard(size), prune) {}

GameState::GameState(const HexBoard& board, bool prune)
    : board_(board), graph_(from_board(board, Color::kRed)), prune_(prune) {
  settle();
}

Cell GameState::action_cell(int action) const {
  require(action >= 0 && action < num_actions(), ErrorCode::kIllegalMove,
          "action " + std::to_string(action) + " out of range");
  return actions_[action];
}

int GameState::action_of(Cell cell) const {
  auto it = std::lower_bound(actions_.begin(), actions_.end(), cell);
  if (it == actions_.end() || *it != cell) return -1;
  return static_cast<int>(it - actions_.begin());
}

void GameState::play(int action) {
  if (is_over()) fail(ErrorCode::kGameOver, "game is already won");
  const Cell cell = action_cell(action);
  const NodeId node = graph_.playable_nodes()[action];
  board_.play(cell);
  if (board_.to_move() == Color::kBlue) {
    graph_.apply_join(node);
  } else {
    graph_.apply_cut(node);
  }
  settle();
}

void GameState::play_cell(Cell cell) {
  if (is_over()) fail(ErrorCode::kGameOver, "game is already won");
  require(board_.in_bounds(cell), ErrorCode::kIllegalMove, "cell out of range");
  const int action = action_of(cell);
  if (action < 0) {
    fail(ErrorCode::kIllegalMove, "cell " + cell_to_string(cell) +
                                      (board_.is_empty(cell) ? " is decided" : " is occupied"));
  }
  play(action);
}

GameState GameState::after(int action) const {
  GameState next = *this;
  next.play(action);
  return next;
}

void GameState::settle() {
  last_fill_.clear();
  if (prune_ && graph_.status() == GameStatus::kOngoing) {
    PruneResult r = prune_all(graph_);
    for (NodeId v : r.removed) {
      const bool joined = std::binary_search(r.joined.begin(), r.joined.end(), v);
      const Cell cell = graph_.label(v).cell;
      const Stone stone = joined ? Stone::kRed : Stone::kBlue;
      last_fill_.emplace_back(cell, stone);
    }
    for (const auto& [cell, stone] : last_fill_) board_.fill(cell, stone);
    graph_ = std::move(r.graph);
  }
  winner_ = winner_of(graph_.status());
  actions_.clear();
  if (!winner_) {
    for (NodeId v : graph_.playable_nodes()) actions_.push_back(graph_.label(v).cell);
  }
}

}  // namespace hexgraph
