#include "hex_board.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace hexgraph {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIllegalMove: return "illegal-move";
    case ErrorCode::kGameOver: return "game-over";
    case ErrorCode::kInvalidState: return "invalid-state";
    case ErrorCode::kResourceLimit: return "resource-limit";
    case ErrorCode::kFormatError: return "format-error";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

const char* color_name(Color c) { return c == Color::kRed ? "red" : "blue"; }

Color parse_color(std::string_view name) {
  if (name == "red") return Color::kRed;
  if (name == "blue") return Color::kBlue;
  fail(ErrorCode::kInvalidArgument, "unknown color '" + std::string(name) + "'");
}

std::string cell_to_string(Cell cell) {
  std::string out(1, static_cast<char>('a' + cell.col));
  out += std::to_string(cell.row + 1);
  return out;
}

Cell parse_cell(std::string_view text, int board_size) {
  const std::string bad = "bad cell '" + std::string(text) + "'";
  if (text.size() < 2 || text[0] < 'a' || text[0] > 'z') {
    fail(ErrorCode::kInvalidArgument, bad);
  }
  int row = 0;
  for (char ch : text.substr(1)) {
    if (ch < '0' || ch > '9') fail(ErrorCode::kInvalidArgument, bad);
    row = row * 10 + (ch - '0');
    if (row > 100) fail(ErrorCode::kInvalidArgument, bad);
  }
  Cell cell{row - 1, text[0] - 'a'};
  if (cell.row < 0 || cell.row >= board_size || cell.col >= board_size) {
    fail(ErrorCode::kInvalidArgument, bad + " for board size " +
                                          std::to_string(board_size));
  }
  return cell;
}

HexBoard::HexBoard(int size) : HexBoard(size, true) {}

HexBoard::HexBoard(int size, bool checked) : size_(size) {
  const int lo = checked ? kMinSize : 1;
  if (size < lo || size > kMaxSize) {
    fail(ErrorCode::kInvalidArgument,
         "board size " + std::to_string(size) + " outside [" +
             std::to_string(lo) + ", " + std::to_string(kMaxSize) + "]");
  }
  cells_.assign(static_cast<std::size_t>(size) * size, Stone::kEmpty);
  parent_.resize(cells_.size() + 4);
  std::iota(parent_.begin(), parent_.end(), 0);
}

HexBoard HexBoard::any_size(int size) { return HexBoard(size, false); }

HexBoard HexBoard::from_setup(int size, const std::vector<Stone>& cells,
                              Color to_move) {
  HexBoard board(size, false);
  if (cells.size() != board.cells_.size()) {
    fail(ErrorCode::kInvalidArgument, "setup has wrong number of cells");
  }
  for (int i = 0; i < board.num_cells(); ++i) {
    if (cells[i] != Stone::kEmpty) {
      board.place(i, cells[i]);
      ++board.move_count_;
    }
  }
  board.to_move_ = to_move;
  if (board.winner_) {
    fail(ErrorCode::kInvalidState, "setup position is already won");
  }
  return board;
}

int HexBoard::count(Stone s) const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), s));
}

std::vector<Cell> HexBoard::empty_cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < num_cells(); ++i) {
    if (cells_[i] == Stone::kEmpty) out.push_back(cell_at(i));
  }
  return out;
}

int HexBoard::find(int x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void HexBoard::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a != b) parent_[std::max(a, b)] = std::min(a, b);
}

void HexBoard::place(int idx, Stone s) {
  cells_[idx] = s;
  const Cell c = cell_at(idx);
  for (const auto& [dr, dc] : kHexOffsets) {
    const Cell n{c.row + dr, c.col + dc};
    if (in_bounds(n) && at(n) == s) unite(idx, index(n));
  }
  if (s == Stone::kRed) {
    if (c.row == 0) unite(idx, top_node());
    if (c.row == size_ - 1) unite(idx, bottom_node());
    if (find(top_node()) == find(bottom_node())) winner_ = Color::kRed;
  } else {
    if (c.col == 0) unite(idx, left_node());
    if (c.col == size_ - 1) unite(idx, right_node());
    if (find(left_node()) == find(right_node())) winner_ = Color::kBlue;
  }
}

void HexBoard::play(Cell cell) {
  if (winner_) fail(ErrorCode::kGameOver, "game is already won");
  if (!in_bounds(cell)) {
    fail(ErrorCode::kIllegalMove, "cell out of range");
  }
  if (!is_empty(cell)) {
    fail(ErrorCode::kIllegalMove, "cell " + cell_to_string(cell) + " is occupied");
  }
  place(index(cell), stone_of(to_move_));
  to_move_ = opponent(to_move_);
  ++move_count_;
}

void HexBoard::fill(Cell cell, Stone stone) {
  require(stone != Stone::kEmpty, ErrorCode::kInvalidArgument, "fill needs a colour");
  require(in_bounds(cell) && is_empty(cell), ErrorCode::kIllegalMove,
          "fill-in cell must be empty");
  place(index(cell), stone);
}

HexBoard HexBoard::played(Cell cell) const {
  HexBoard next = *this;
  next.play(cell);
  return next;
}

std::optional<Color> HexBoard::winner_by_search() const {
  auto connects = [&](Stone s) {
    std::vector<char> seen(cells_.size(), 0);
    std::vector<int> stack;
    for (int k = 0; k < size_; ++k) {
      const Cell start = s == Stone::kRed ? Cell{0, k} : Cell{k, 0};
      if (at(start) == s) {
        seen[index(start)] = 1;
        stack.push_back(index(start));
      }
    }
    while (!stack.empty()) {
      const Cell c = cell_at(stack.back());
      stack.pop_back();
      if ((s == Stone::kRed ? c.row : c.col) == size_ - 1) return true;
      for (const auto& [dr, dc] : kHexOffsets) {
        const Cell n{c.row + dr, c.col + dc};
        if (in_bounds(n) && at(n) == s && !seen[index(n)]) {
          seen[index(n)] = 1;
          stack.push_back(index(n));
        }
      }
    }
    return false;
  };
  if (connects(Stone::kRed)) return Color::kRed;
  if (connects(Stone::kBlue)) return Color::kBlue;
  return std::nullopt;
}

std::vector<Cell> unique_openings(int size, OpeningSymmetry symmetry) {
  require(size >= 1 && size <= HexBoard::kMaxSize, ErrorCode::kInvalidArgument,
          "opening enumeration needs 1 <= size <= 25");
  std::vector<Cell> out;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const Cell c{i, j};
      std::vector<Cell> orbit = {c, {size - 1 - j, size - 1 - i}};
      if (symmetry == OpeningSymmetry::kWithRotation180) {
        orbit.push_back({size - 1 - i, size - 1 - j});
        orbit.push_back({j, i});
      }
      if (*std::min_element(orbit.begin(), orbit.end()) == c) out.push_back(c);
    }
  }
  return out;
}

double board_entropy(const HexBoard& board) {
  const double total = board.num_cells();
  double h = 0.0;
  for (Stone s : {Stone::kEmpty, Stone::kRed, Stone::kBlue}) {
    const double p = board.count(s) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

InputPlanes encode_planes(const HexBoard& board, bool padded) {
  const int n = board.size();
  const int pad = padded ? 1 : 0;
  InputPlanes planes;
  planes.height = n + 2 * pad;
  planes.width = n + 2 * pad;
  planes.padded = padded;
  const std::size_t plane = static_cast<std::size_t>(planes.height) * planes.width;
  planes.data.assign(InputPlanes::kChannels * plane, 0.0f);
  auto set = [&](int c, int y, int x, float v) {
    planes.data[c * plane + static_cast<std::size_t>(y) * planes.width + x] = v;
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Stone s = board.at({r, c});
      const int ch = s == Stone::kRed ? 0 : s == Stone::kBlue ? 1 : 2;
      set(ch, r + pad, c + pad, 1.0f);
    }
  }
  if (padded) {
    const int last = planes.height - 1;
    for (int k = 0; k < planes.width; ++k) {
      set(0, 0, k, 1.0f);
      set(0, last, k, 1.0f);
      set(1, k, 0, 1.0f);
      set(1, k, last, 1.0f);
    }
  }
  if (board.to_move() == Color::kBlue) {
    std::fill(planes.data.begin() + 3 * plane, planes.data.end(), 1.0f);
  }
  return planes;
}

std::string game_record_to_json(const GameRecord& record) {
  nlohmann::json j;
  j["size"] = record.size;
  j["moves"] = nlohmann::json::array();
  for (const Cell& c : record.moves) j["moves"].push_back(cell_to_string(c));
  if (record.winner) {
    j["winner"] = color_name(*record.winner);
  } else {
    j["winner"] = nullptr;
  }
  return j.dump();
}

GameRecord game_record_from_json(std::string_view line) {
  GameRecord record;
  try {
    const auto j = nlohmann::json::parse(line);
    record.size = j.at("size").get<int>();
    for (const auto& m : j.at("moves")) {
      record.moves.push_back(parse_cell(m.get<std::string>(), record.size));
    }
    if (!j.at("winner").is_null()) {
      record.winner = parse_color(j.at("winner").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("bad game record: ") + e.what());
  }
  return record;
}

}  // namespace hexgraph
