#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace hexgraph {

// Red connects the top and bottom rows and moves first. Blue connects the
// left and right columns.
enum class Color : std::uint8_t { kRed = 0, kBlue = 1 };

enum class Stone : std::uint8_t { kEmpty = 0, kRed = 1, kBlue = 2 };

constexpr Color opponent(Color c) {
  return c == Color::kRed ? Color::kBlue : Color::kRed;
}
constexpr Stone stone_of(Color c) {
  return c == Color::kRed ? Stone::kRed : Stone::kBlue;
}
const char* color_name(Color c);
Color parse_color(std::string_view name);

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

// Hex adjacency in (row, col) offsets.
inline constexpr std::array<std::array<int, 2>, 6> kHexOffsets = {{
    {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}}};

// Letter for the column, 1-based number for the row: (row 3, col 2) is "c4".
std::string cell_to_string(Cell cell);
Cell parse_cell(std::string_view text, int board_size);

class HexBoard {
 public:
  static constexpr int kMinSize = 3;
  static constexpr int kMaxSize = 25;

  explicit HexBoard(int size);

  // Accepts 1 <= size <= kMaxSize. Small boards are only useful for analysis
  // and tests; normal play goes through the checked constructor.
  static HexBoard any_size(int size);

  // A problem diagram: arbitrary stones with an explicit side to move. Stone
  // counts are not required to be balanced. Throws if the position is won.
  static HexBoard from_setup(int size, const std::vector<Stone>& cells,
                             Color to_move);

  int size() const { return size_; }
  int num_cells() const { return size_ * size_; }
  Color to_move() const { return to_move_; }
  int move_count() const { return move_count_; }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < size_ && c.col >= 0 && c.col < size_;
  }
  int index(Cell c) const { return c.row * size_ + c.col; }
  Cell cell_at(int index) const { return {index / size_, index % size_}; }

  Stone at(Cell c) const { return cells_[index(c)]; }
  Stone at_index(int i) const { return cells_[i]; }
  const std::vector<Stone>& cells() const { return cells_; }
  bool is_empty(Cell c) const { return at(c) == Stone::kEmpty; }
  int count(Stone s) const;
  std::vector<Cell> empty_cells() const;

  bool is_over() const { return winner_.has_value(); }
  std::optional<Color> winner() const { return winner_; }

  // Throws kIllegalMove for occupied or out-of-range cells and kGameOver
  // once a side has connected.
  void play(Cell cell);
  HexBoard played(Cell cell) const;
  // Colours an empty cell without using a turn (fill-in of dead or captured
  // cells). The winner is updated; to_move and move_count are not.
  void fill(Cell cell, Stone stone);

  // Recomputes the winner from scratch with a flood fill. Used to cross-check
  // the incremental union-find.
  std::optional<Color> winner_by_search() const;

  friend bool operator==(const HexBoard& a, const HexBoard& b) {
    return a.size_ == b.size_ && a.cells_ == b.cells_ &&
           a.to_move_ == b.to_move_;
  }

 private:
  HexBoard(int size, bool checked);

  int find(int x) const;
  void unite(int a, int b);
  void place(int index, Stone s);

  // Union-find nodes: one per cell, then top, bottom, left, right borders.
  int top_node() const { return num_cells(); }
  int bottom_node() const { return num_cells() + 1; }
  int left_node() const { return num_cells() + 2; }
  int right_node() const { return num_cells() + 3; }

  int size_;
  std::vector<Stone> cells_;
  Color to_move_ = Color::kRed;
  int move_count_ = 0;
  std::optional<Color> winner_;
  mutable std::vector<int> parent_;
};

enum class OpeningSymmetry {
  kShortDiagonal,    // (i, j) -> (n-1-j, n-1-i)
  kWithRotation180,  // additionally (i, j) -> (n-1-i, n-1-j)
};

// One lexicographically smallest representative per symmetry orbit.
std::vector<Cell> unique_openings(
    int size, OpeningSymmetry symmetry = OpeningSymmetry::kShortDiagonal);

// Shannon entropy (natural log) of the empty/red/blue proportions.
double board_entropy(const HexBoard& board);

// Channels: red stones, blue stones, empty, side to move (1 when Blue is to
// move). With padding a one-cell ring is added: top/bottom rows red, left/right
// columns blue, corners both.
struct InputPlanes {
  static constexpr int kChannels = 4;
  int height = 0;
  int width = 0;
  bool padded = true;
  std::vector<float> data;  // [channel][y][x]

  float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

InputPlanes encode_planes(const HexBoard& board, bool padded = true);

struct GameRecord {
  int size = 0;
  std::vector<Cell> moves;
  std::optional<Color> winner;
};

// {"size": n, "moves": ["c4", ...], "winner": "red"|"blue"} on one line.
std::string game_record_to_json(const GameRecord& record);
GameRecord game_record_from_json(std::string_view line);

}  // namespace hexgraph
