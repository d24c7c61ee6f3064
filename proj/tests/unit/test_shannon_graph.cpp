#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "graph_algorithms.hpp"
#include "shannon_graph.hpp"

using namespace hexgraph;

namespace {

using Edge = std::pair<std::string, std::string>;

std::set<Edge> labelled_edges(const ShannonGraph& g) {
  std::set<Edge> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.neighbors(v)) {
      auto a = g.label_string(v), b = g.label_string(u);
      if (a < b) out.emplace(a, b);
    }
  }
  return out;
}

HexBoard board_from_rows(const std::vector<std::string>& rows, Color to_move) {
  const int n = static_cast<int>(rows.size());
  std::vector<Stone> cells;
  for (const auto& r : rows) {
    for (char ch : r) cells.push_back(ch == 'R' ? Stone::kRed : ch == 'B' ? Stone::kBlue : Stone::kEmpty);
  }
  return HexBoard::from_setup(n, cells, to_move);
}

// t1 - v - t2 with ids v=0, t1=1, t2=2.
ShannonGraph path3(Role to_move) {
  return ShannonGraph::from_edges(3, {{1, 0}, {0, 2}}, 1, 2, to_move);
}

}  // namespace

TEST_CASE("empty 5x5 conversion") {
  ShannonGraph g = from_board(HexBoard(5), Color::kRed);
  CHECK(g.num_nodes() == 27);
  CHECK(g.neighbors(g.t1()).size() == 5);
  CHECK(g.neighbors(g.t2()).size() == 5);
  // Independent count: horizontal, vertical and anti-diagonal tile pairs plus
  // the terminal edges.
  int tile_edges = 0;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (c + 1 < 5) ++tile_edges;
      if (r + 1 < 5) ++tile_edges;
      if (r + 1 < 5 && c - 1 >= 0) ++tile_edges;
    }
  }
  CHECK(tile_edges == 56);
  CHECK(g.num_edges() == tile_edges + 10);
  CHECK(g.num_edges() == 66);
  CHECK(g.status() == GameStatus::kOngoing);
  CHECK(g.to_move() == Role::kShort);
  CHECK(from_board(HexBoard(5), Color::kBlue).to_move() == Role::kCut);

  GraphEncoding e = encode(g);
  CHECK(e.num_nodes == 27);
  CHECK(e.edges.size() == 132);
  int nonzero_rows = 0;
  for (int v = 0; v < 27; ++v) nonzero_rows += (e.features[2 * v] + e.features[2 * v + 1]) > 0;
  CHECK(nonzero_rows == 2);
  std::set<std::pair<int, int>> directed(e.edges.begin(), e.edges.end());
  for (auto [a, b] : e.edges) CHECK(directed.count({b, a}) == 1);
}

TEST_CASE("hand-built 3x3 conversion") {
  // Red on b2, blue on c1.
  HexBoard b = board_from_rows({"..B", ".R.", "..."}, Color::kRed);
  ShannonGraph g = from_board(b, Color::kRed);
  CHECK(g.num_nodes() == 9);
  const std::set<Edge> expected = {
      {"a1", "b1"}, {"a1", "a2"}, {"a2", "b1"}, {"a2", "a3"}, {"b3", "c2"},
      {"c2", "c3"}, {"a3", "b3"}, {"b3", "c3"},
      {"a1", "top"}, {"b1", "top"}, {"a3", "bottom"}, {"b3", "bottom"}, {"bottom", "c3"},
      {"b1", "c2"}, {"a3", "b1"}, {"b1", "b3"}, {"a2", "c2"}, {"a2", "b3"}, {"a3", "c2"}};
  CHECK(labelled_edges(g) == expected);

  // The same edge list entered by id is isomorphic.
  std::map<std::string, int> id = {{"a1", 0}, {"b1", 1}, {"a2", 2}, {"c2", 3}, {"a3", 4},
                                   {"b3", 5}, {"c3", 6}, {"top", 7}, {"bottom", 8}};
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [a, bb] : expected) edges.emplace_back(id[a], id[bb]);
  ShannonGraph hand = ShannonGraph::from_edges(9, edges, 7, 8, Role::kShort);
  CHECK(is_isomorphic(g, hand));
}

TEST_CASE("won positions are rejected") {
  HexBoard b = HexBoard::any_size(1);
  b.play({0, 0});
  try {
    from_board(b, Color::kRed);
    FAIL("expected invalid state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidState);
  }
}

TEST_CASE("join and cut") {
  ShannonGraph j = path3(Role::kShort).join(0);
  CHECK(j.num_nodes() == 2);
  CHECK(j.adjacent(j.t1(), j.t2()));
  CHECK(j.status() == GameStatus::kShortWins);
  CHECK(j.to_move() == Role::kCut);

  ShannonGraph c = path3(Role::kCut).cut(0);
  CHECK(c.status() == GameStatus::kCutWins);
  CHECK(c.to_move() == Role::kShort);

  // Star v -> {a,b,c}: joining v adds the triangle.
  ShannonGraph star = ShannonGraph::from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {3, 5}}, 4, 5,
                                               Role::kShort);
  ShannonGraph after = star.join(0);
  CHECK(after.num_nodes() == 5);
  CHECK(after.adjacent(0, 1));
  CHECK(after.adjacent(0, 2));
  CHECK(after.adjacent(1, 2));

  // Cutting a leaf off every terminal path leaves connectivity alone.
  ShannonGraph leafy = ShannonGraph::from_edges(5, {{0, 3}, {0, 4}, {1, 0}, {2, 1}}, 3, 4, Role::kCut);
  CHECK(leafy.cut(2).status() == leafy.status());
  CHECK(leafy.cut(2).num_nodes() == 4);

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code_of([] { path3(Role::kShort).join(1); }) == ErrorCode::kIllegalMove);
  CHECK(code_of([] { path3(Role::kShort).cut(0); }) == ErrorCode::kIllegalMove);
  CHECK(code_of([] { path3(Role::kCut).join(0); }) == ErrorCode::kIllegalMove);
  CHECK(code_of([] { path3(Role::kCut).cut(7); }) == ErrorCode::kIllegalMove);
}

TEST_CASE("status") {
  CHECK(ShannonGraph::from_edges(2, {{0, 1}}, 0, 1, Role::kShort).status() == GameStatus::kShortWins);
  CHECK(ShannonGraph::from_edges(4, {{0, 2}, {1, 3}}, 2, 3, Role::kShort).status() ==
        GameStatus::kCutWins);
}

TEST_CASE("grid play and graph play stay in lockstep") {
  std::mt19937_64 rng(5);
  for (int n = 3; n <= 7; ++n) {
    for (int t = 0; t < 200; ++t) {
      HexBoard b = HexBoard::any_size(n);
      ShannonGraph red = from_board(b, Color::kRed);
      ShannonGraph blue = from_board(b, Color::kBlue);
      int moves = 0;
      while (!b.is_over()) {
        auto empty = b.empty_cells();
        const Cell cell = empty[rng() % empty.size()];
        const bool red_moves = b.to_move() == Color::kRed;
        const NodeId vr = *red.node_of(cell);
        const NodeId vb = *blue.node_of(cell);
        if (red_moves) {
          red.apply_join(vr);
          blue.apply_cut(vb);
        } else {
          red.apply_cut(vr);
          blue.apply_join(vb);
        }
        b.play(cell);
        ++moves;
        REQUIRE(red.num_nodes() == n * n + 2 - moves);
        if (!b.is_over()) {
          REQUIRE(red == from_board(b, Color::kRed));
          REQUIRE(blue == from_board(b, Color::kBlue));
          REQUIRE(red.status() == GameStatus::kOngoing);
        }
      }
      const bool red_won = b.winner() == Color::kRed;
      CHECK(red.status() == (red_won ? GameStatus::kShortWins : GameStatus::kCutWins));
      CHECK(blue.status() == (red_won ? GameStatus::kCutWins : GameStatus::kShortWins));
    }
  }
}

TEST_CASE("graph dump round trip") {
  HexBoard b(4);
  b.play({1, 1});
  b.play({2, 2});
  ShannonGraph g = from_board(b, Color::kBlue);
  const std::string dump = graph_to_json(g);
  ShannonGraph back = graph_from_json(dump);
  CHECK(back == g);
  CHECK(graph_to_json(back) == dump);
  CHECK(dump.find("\"perspective\":\"blue\"") != std::string::npos);
  CHECK(dump.find("\"label\":\"left\"") != std::string::npos);
  CHECK_THROWS_AS(graph_from_json("{\"nodes\":[]"), Error);
  try {
    graph_from_json("{\"nodes\":[],\"edges\":[],\"to_move\":\"x\",\"perspective\":\"red\"}");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormatError);
  }
}

TEST_CASE("boards of different sizes with the same graph") {
  // Rows 0 and 3 red, three empty cells in the middle, blue elsewhere.
  HexBoard small = board_from_rows({"RRRR", "B..B", "B.BB", "RRRR"}, Color::kRed);
  // The same core framed by a red ring row and blue side columns on 6x6.
  HexBoard large = board_from_rows(
      {"RRRRRR", "BRRRRB", "BB..BB", "BB.BBB", "BRRRRB", "RRRRRR"}, Color::kRed);
  ShannonGraph gs = from_board(small, Color::kRed);
  ShannonGraph gl = from_board(large, Color::kRed);
  CHECK(gs.num_nodes() == 5);
  CHECK(gl.num_nodes() == 5);
  CHECK(canonical_hash(gs) == canonical_hash(gl));
  CHECK(is_isomorphic(gs, gl));
  CHECK(board_entropy(small) != board_entropy(large));
}
