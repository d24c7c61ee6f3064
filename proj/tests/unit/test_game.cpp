#include <random>

#include "doctest.h"
#include "game.hpp"

using namespace hexgraph;

namespace {

bool same_graph(const ShannonGraph& a, const ShannonGraph& b) {
  return graph_to_json(a) == graph_to_json(b);
}

}  // namespace

TEST_CASE("actions are the empty cells in row-major order") {
  GameState s(4);
  CHECK(s.num_actions() == 16);
  CHECK(s.action_cell(0) == Cell{0, 0});
  CHECK(s.action_cell(5) == Cell{1, 1});
  CHECK(s.action_of(Cell{3, 3}) == 15);
  s.play_cell(Cell{1, 1});
  CHECK(s.num_actions() == 15);
  CHECK(s.action_of(Cell{1, 1}) == -1);
  CHECK(s.action_of(Cell{1, 2}) == 5);
  CHECK(s.to_move() == Color::kBlue);
}

TEST_CASE("illegal actions") {
  GameState s(3);
  s.play_cell(Cell{1, 1});
  CHECK_THROWS_AS(s.play(8), Error);
  CHECK_THROWS_AS(s.play(-1), Error);
  try {
    s.play_cell(Cell{1, 1});
    FAIL("occupied cell accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIllegalMove);
  }
}

TEST_CASE("board and graph stay in lockstep without pruning") {
  std::mt19937_64 rng(3);
  for (int game = 0; game < 200; ++game) {
    const int n = 3 + game % 5;
    GameState s(n);
    while (!s.is_over()) {
      s.play(static_cast<int>(rng() % s.num_actions()));
      if (!s.is_over()) {
        CHECK(same_graph(s.graph(), from_board(s.board(), Color::kRed)));
        CHECK(s.action_cells() == s.board().empty_cells());
      }
    }
    REQUIRE(s.board().is_over());
    CHECK(s.winner() == s.board().winner());
  }
}

TEST_CASE("pruned states equal the graph of the filled board") {
  std::mt19937_64 rng(4);
  int filled = 0;
  for (int game = 0; game < 200; ++game) {
    const int n = 3 + game % 5;
    GameState s(n, true);
    while (!s.is_over()) {
      CHECK(same_graph(s.graph(), from_board(s.board(), Color::kRed)));
      CHECK(s.action_cells() == s.board().empty_cells());
      s.play(static_cast<int>(rng() % s.num_actions()));
      filled += static_cast<int>(s.last_fill().size());
    }
    // Fill-in gives every decided cell its owner's colour, so the board is
    // won exactly when the graph is.
    CHECK(s.board().winner() == s.winner());
  }
  CHECK(filled > 0);
}

TEST_CASE("filled cells are on the board and no longer actions") {
  GameState s(3, true);
  s.play_cell(Cell{1, 1});
  for (const auto& [cell, stone] : s.last_fill()) {
    CHECK(s.board().at(cell) == stone);
    CHECK(s.action_of(cell) == -1);
  }
}

TEST_CASE("winner_of") {
  CHECK(winner_of(GameStatus::kShortWins) == Color::kRed);
  CHECK(winner_of(GameStatus::kCutWins) == Color::kBlue);
  CHECK_FALSE(winner_of(GameStatus::kOngoing).has_value());
}
