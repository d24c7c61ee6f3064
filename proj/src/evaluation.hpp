#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "agents.hpp"
#include "azero.hpp"
#include "game.hpp"
#include "json.hpp"

namespace hexgraph {

// ------------------------------------------------------------ long range

enum class Polarity { kPositive, kNegative };

// The mover's opponent has a chain running along one of the mover's borders
// that is completed by decision_cell at one end and toggle_cell at the other.
// Positive: toggle_cell already holds an opponent stone, so decision_cell is
// a forced block. Negative: toggle_cell is empty, the opponent still needs two
// moves and a move at decision_cell wastes a tempo. The rest of the board is
// a ladder of mover bridges that gives the mover a safe connection once the
// edge is settled.
//
// For Red the chain lies along the top row, decision_cell = (0, n-1) and
// toggle_cell = (0, 0). Blue instances are the transpose with colours
// swapped, which puts decision_cell at (n-1, 0), the bottom-left corner.
struct LongRangeProblem {
  HexBoard board{HexBoard::kMinSize};
  Cell decision_cell;
  Cell toggle_cell;
  Polarity polarity = Polarity::kPositive;
  Color color = Color::kRed;  // the side to move

  bool must_play() const { return polarity == Polarity::kPositive; }
  std::string name() const;  // "red positive", ...
};

inline constexpr int kLongRangeMinSize = 6;

// Throws kInvalidArgument outside 6..25.
LongRangeProblem gen_long_range(int size, Color color, Polarity polarity);

// The four problems of one size in table order: red positive, red negative,
// blue positive, blue negative.
std::vector<LongRangeProblem> long_range_set(int size);

struct LongRangeCheck {
  bool decision_wins = false;
  bool decision_only_win = false;
  bool other_move_wins = false;
  // Positive: decision_cell is the only winning move. Negative: some other
  // move wins as well, so decision_cell is not forced.
  bool consistent = false;
};
LongRangeCheck verify_long_range(const LongRangeProblem& problem, const SolveOptions& options = {});

struct LongRangeRow {
  int size = 0;
  std::vector<int> errors;  // per problem in long_range_set order
  int total = 0;
};

struct LongRangeTable {
  std::vector<LongRangeRow> rows;
  int total = 0;
  int errors_above(int size) const;    // errors on sizes > size
  int problems_above(int size) const;  // problem count on sizes > size
};

// An error is playing anywhere but decision_cell on a positive problem, or
// playing decision_cell on a negative one.
bool long_range_error(const LongRangeProblem& problem, const Agent& agent);
LongRangeTable eval_long_range(const Agent& agent, const std::vector<int>& sizes);

std::string long_range_csv(const LongRangeTable& table);
nlohmann::json long_range_json(const LongRangeTable& table);

// ------------------------------------------------------------ tournaments

struct TournamentResult {
  int size = 0;
  std::vector<std::string> names;
  std::vector<std::vector<int>> wins;   // wins[i][j]: games i won against j
  std::vector<std::vector<int>> games;  // games[i][j]: games between i and j
  std::vector<GameRecord> records;
  int total_games = 0;

  double win_rate(int i, int j) const;
};

// Every unordered pair plays each unique opening twice, each side taking Red
// once. The opening cell is Red's first move. max_openings > 0 truncates the
// opening list.
TournamentResult tournament(const std::vector<const Agent*>& agents, int size,
                            std::uint64_t seed = 0, int max_openings = 0, bool prune = false);

// Number of games one pairing plays on an n x n board.
int games_per_pairing(int size);

std::string tournament_csv(const TournamentResult& result);
nlohmann::json tournament_json(const TournamentResult& result);

// ------------------------------------------------------------ supervised

struct TeacherDataset {
  int size = 0;
  std::vector<AzSample> train;
  std::vector<AzSample> validation;
  int train_games = 0;
  int validation_games = 0;
};

struct TeacherOptions {
  int games = 2500;
  double validation_fraction = 0.2;
  // Positions kept per game, chosen uniformly; 0 keeps all.
  int positions_per_game = 0;
  // Random moves at the start of each game for variety.
  int random_opening_moves = 1;
};

// The teacher's visit shares (or a one-hot of its move when it has none)
// become pi; z is the final result for the mover. Games are split, not
// positions, so no game feeds both sides of the split.
TeacherDataset gen_teacher_dataset(const Agent& teacher, int size, const TeacherOptions& options,
                                   std::mt19937_64& rng);

struct SupervisedConfig {
  int epochs = 30;
  int batch_size = 64;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
};

struct SupervisedMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_policy_accuracy = 0.0;
  double train_value_sign_accuracy = 0.0;
  double validation_policy_accuracy = 0.0;
  double validation_value_sign_accuracy = 0.0;
  nlohmann::json to_json() const;
};

struct Accuracy {
  double policy = 0.0;
  double value_sign = 0.0;
};
// Policy: the argmax of the outputs is one of the maxima of pi, so tied
// teacher visits do not depend on tie-breaking. Value sign: v > 0 iff z = +1.
Accuracy supervised_accuracy(const Net<float>& net, const std::vector<AzSample>& samples);

std::vector<SupervisedMetrics> supervised_train(
    Net<float>& net, const TeacherDataset& data, const SupervisedConfig& config,
    const std::function<void(const SupervisedMetrics&)>& on_epoch = {});

}  // namespace hexgraph
