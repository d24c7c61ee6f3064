#include "evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hexgraph {

// ------------------------------------------------------------ long range

std::string LongRangeProblem::name() const {
  return std::string(color_name(color)) + (must_play() ? " positive" : " negative");
}

namespace {

// Red to move; Red joins top and bottom.
std::vector<Stone> red_layout(int n, Polarity polarity) {
  std::vector<Stone> cells(static_cast<std::size_t>(n) * n, Stone::kBlue);
  auto at = [&](int r, int c) -> Stone& { return cells[static_cast<std::size_t>(r) * n + c]; };
  at(0, 0) = polarity == Polarity::kPositive ? Stone::kBlue : Stone::kEmpty;
  at(0, n - 1) = Stone::kEmpty;
  for (int c = 0; c < n - 1; ++c) at(1, c) = Stone::kRed;
  int r = 1;
  int c = n - 2;
  while (r + 2 <= n - 1) {
    at(r + 1, c - 1) = Stone::kEmpty;
    at(r + 1, c) = Stone::kEmpty;
    r += 2;
    c -= 1;
    at(r, c) = Stone::kRed;
  }
  if (r == n - 2) {
    at(n - 1, c - 1) = Stone::kEmpty;
    at(n - 1, c) = Stone::kEmpty;
  }
  return cells;
}

Stone swap_colour(Stone s) {
  if (s == Stone::kRed) return Stone::kBlue;
  if (s == Stone::kBlue) return Stone::kRed;
  return s;
}

}  // namespace

LongRangeProblem gen_long_range(int size, Color color, Polarity polarity) {
  require(size >= kLongRangeMinSize && size <= HexBoard::kMaxSize, ErrorCode::kInvalidArgument,
          "long range problems need 6 <= size <= 25");
  std::vector<Stone> cells = red_layout(size, polarity);
  LongRangeProblem p;
  p.polarity = polarity;
  p.color = color;
  p.toggle_cell = {0, 0};
  if (color == Color::kRed) {
    p.decision_cell = {0, size - 1};
  } else {
    std::vector<Stone> t(cells.size());
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) t[c * size + r] = swap_colour(cells[r * size + c]);
    }
    cells = std::move(t);
    p.decision_cell = {size - 1, 0};
  }
  p.board = HexBoard::from_setup(size, cells, color);
  return p;
}

std::vector<LongRangeProblem> long_range_set(int size) {
  return {gen_long_range(size, Color::kRed, Polarity::kPositive),
          gen_long_range(size, Color::kRed, Polarity::kNegative),
          gen_long_range(size, Color::kBlue, Polarity::kPositive),
          gen_long_range(size, Color::kBlue, Polarity::kNegative)};
}

LongRangeCheck verify_long_range(const LongRangeProblem& problem, const SolveOptions& options) {
  const GameState state(problem.board);
  LongRangeCheck check;
  int wins = 0;
  for (NodeId node : winning_moves(state.graph(), options)) {
    ++wins;
    const Cell cell = state.action_cell(action_of_node(state.graph(), node));
    if (cell == problem.decision_cell) {
      check.decision_wins = true;
    } else {
      check.other_move_wins = true;
    }
  }
  check.decision_only_win = check.decision_wins && wins == 1;
  check.consistent = problem.must_play() ? check.decision_only_win : check.other_move_wins;
  return check;
}

bool long_range_error(const LongRangeProblem& problem, const Agent& agent) {
  const GameState state(problem.board);
  std::mt19937_64 rng(0);
  const Cell played = state.action_cell(agent.decide(state, rng).action);
  const bool at_decision = played == problem.decision_cell;
  return problem.must_play() ? !at_decision : at_decision;
}

int LongRangeTable::errors_above(int size) const {
  int total_errors = 0;
  for (const LongRangeRow& row : rows) {
    if (row.size > size) total_errors += row.total;
  }
  return total_errors;
}

int LongRangeTable::problems_above(int size) const {
  int n = 0;
  for (const LongRangeRow& row : rows) {
    if (row.size > size) n += static_cast<int>(row.errors.size());
  }
  return n;
}

LongRangeTable eval_long_range(const Agent& agent, const std::vector<int>& sizes) {
  LongRangeTable table;
  for (int size : sizes) {
    LongRangeRow row;
    row.size = size;
    for (const LongRangeProblem& p : long_range_set(size)) {
      const int e = long_range_error(p, agent) ? 1 : 0;
      row.errors.push_back(e);
      row.total += e;
    }
    table.total += row.total;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string long_range_csv(const LongRangeTable& table) {
  std::ostringstream out;
  out << "size,red_positive,red_negative,blue_positive,blue_negative,errors\n";
  for (const LongRangeRow& row : table.rows) {
    out << row.size;
    for (int e : row.errors) out << ',' << e;
    out << ',' << row.total << '\n';
  }
  out << "sum,,,,," << table.total << '\n';
  return out.str();
}

nlohmann::json long_range_json(const LongRangeTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LongRangeRow& row : table.rows) {
    rows.push_back({{"size", row.size},
                    {"red_positive", row.errors.at(0)},
                    {"red_negative", row.errors.at(1)},
                    {"blue_positive", row.errors.at(2)},
                    {"blue_negative", row.errors.at(3)},
                    {"errors", row.total}});
  }
  return {{"rows", rows}, {"sum_of_errors", table.total}};
}

// ------------------------------------------------------------ tournaments

double TournamentResult::win_rate(int i, int j) const {
  const int g = games.at(i).at(j);
  return g == 0 ? 0.0 : static_cast<double>(wins[i][j]) / g;
}

int games_per_pairing(int size) { return 2 * static_cast<int>(unique_openings(size).size()); }

TournamentResult tournament(const std::vector<const Agent*>& agents, int size, std::uint64_t seed,
                            int max_openings, bool prune) {
  require(agents.size() >= 2, ErrorCode::kInvalidArgument, "a tournament needs two agents");
  std::vector<Cell> openings = unique_openings(size);
  if (max_openings > 0 && static_cast<int>(openings.size()) > max_openings) {
    openings.resize(max_openings);
  }
  const std::size_t k = agents.size();
  TournamentResult result;
  result.size = size;
  for (const Agent* a : agents) result.names.push_back(a->name());
  result.wins.assign(k, std::vector<int>(k, 0));
  result.games.assign(k, std::vector<int>(k, 0));
  std::uint64_t game_index = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (Cell opening : openings) {
        for (int swap = 0; swap < 2; ++swap) {
          const std::size_t red = swap == 0 ? i : j;
          const std::size_t blue = swap == 0 ? j : i;
          std::mt19937_64 rng(seed + game_index++);
          GameState s(size, prune);
          GameRecord record;
          record.size = size;
          record.moves.push_back(opening);
          s.play_cell(opening);
          while (!s.is_over()) {
            const Agent& mover = *agents[s.to_move() == Color::kRed ? red : blue];
            const int action = mover.decide(s, rng).action;
            record.moves.push_back(s.action_cell(action));
            s.play(action);
          }
          record.winner = s.winner();
          const std::size_t winner = *s.winner() == Color::kRed ? red : blue;
          const std::size_t loser = winner == i ? j : i;
          ++result.wins[winner][loser];
          ++result.games[i][j];
          ++result.games[j][i];
          ++result.total_games;
          result.records.push_back(std::move(record));
        }
      }
    }
  }
  return result;
}

std::string tournament_csv(const TournamentResult& result) {
  std::ostringstream out;
  out << "agent";
  for (const std::string& n : result.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < result.names.size(); ++i) {
    out << result.names[i];
    for (std::size_t j = 0; j < result.names.size(); ++j) {
      out << ',';
      if (i != j) out << result.win_rate(static_cast<int>(i), static_cast<int>(j));
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json tournament_json(const TournamentResult& result) {
  nlohmann::json rates = nlohmann::json::array();
  for (std::size_t i = 0; i < result.names.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < result.names.size(); ++j) {
      if (i == j) {
        row.push_back(nullptr);
      } else {
        row.push_back(result.win_rate(static_cast<int>(i), static_cast<int>(j)));
      }
    }
    rates.push_back(row);
  }
  return {{"size", result.size},
          {"agents", result.names},
          {"wins", result.wins},
          {"games", result.games},
          {"win_rate", rates},
          {"total_games", result.total_games}};
}

// ------------------------------------------------------------ supervised

TeacherDataset gen_teacher_dataset(const Agent& teacher, int size, const TeacherOptions& options,
                                   std::mt19937_64& rng) {
  require(options.games >= 1, ErrorCode::kInvalidArgument, "need at least one game");
  require(options.validation_fraction >= 0.0 && options.validation_fraction < 1.0,
          ErrorCode::kInvalidArgument, "validation_fraction must be in [0, 1)");
  require(options.positions_per_game >= 0 && options.random_opening_moves >= 0,
          ErrorCode::kInvalidArgument, "bad teacher options");
  TeacherDataset data;
  data.size = size;
  const int validation_games =
      static_cast<int>(std::lround(options.games * options.validation_fraction));
  data.train_games = options.games - validation_games;
  data.validation_games = validation_games;
  for (int g = 0; g < options.games; ++g) {
    GameState s(size);
    for (int m = 0; m < options.random_opening_moves && !s.is_over(); ++m) {
      std::uniform_int_distribution<int> pick(0, s.num_actions() - 1);
      s.play(pick(rng));
    }
    std::vector<AzSample> game;
    std::vector<Color> movers;
    while (!s.is_over()) {
      Decision d = teacher.decide(s, rng);
      std::vector<double> pi(s.num_actions(), 0.0);
      const int total_visits = std::accumulate(d.eval.visits.begin(), d.eval.visits.end(), 0);
      if (total_visits > 0 && static_cast<int>(d.eval.visits.size()) == s.num_actions()) {
        for (int a = 0; a < s.num_actions(); ++a) {
          pi[a] = static_cast<double>(d.eval.visits[a]) / total_visits;
        }
      } else {
        pi[d.action] = 1.0;
      }
      movers.push_back(s.to_move());
      game.push_back({s, std::move(pi), 0.0});
      s.play(d.action);
    }
    for (std::size_t i = 0; i < game.size(); ++i) {
      game[i].z = movers[i] == *s.winner() ? 1.0 : -1.0;
    }
    if (options.positions_per_game > 0 &&
        static_cast<int>(game.size()) > options.positions_per_game) {
      std::vector<AzSample> kept;
      std::sample(std::make_move_iterator(game.begin()), std::make_move_iterator(game.end()),
                  std::back_inserter(kept), options.positions_per_game, rng);
      game = std::move(kept);
    }
    auto& target = g < data.train_games ? data.train : data.validation;
    for (AzSample& sample : game) target.push_back(std::move(sample));
  }
  return data;
}

nlohmann::json SupervisedMetrics::to_json() const {
  return {{"epoch", epoch},
          {"train_loss", train_loss},
          {"train_policy_accuracy", train_policy_accuracy},
          {"train_value_sign_accuracy", train_value_sign_accuracy},
          {"validation_policy_accuracy", validation_policy_accuracy},
          {"validation_value_sign_accuracy", validation_value_sign_accuracy}};
}

Accuracy supervised_accuracy(const Net<float>& net, const std::vector<AzSample>& samples) {
  Accuracy acc;
  if (samples.empty()) return acc;
  constexpr std::size_t kChunk = 256;
  int policy_hits = 0;
  int value_hits = 0;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t end = std::min(samples.size(), start + kChunk);
    std::vector<Position> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(samples[i].state.position());
    const NetOutput<float> out = net.forward(batch);
    for (std::size_t i = start; i < end; ++i) {
      const AzSample& s = samples[i];
      const auto& q = out.action[i - start];
      const auto predicted = std::max_element(q.begin(), q.end()) - q.begin();
      if (s.pi[predicted] == *std::max_element(s.pi.begin(), s.pi.end())) ++policy_hits;
      if ((out.value[i - start] > 0.0f) == (s.z > 0.0)) ++value_hits;
    }
  }
  acc.policy = static_cast<double>(policy_hits) / samples.size();
  acc.value_sign = static_cast<double>(value_hits) / samples.size();
  return acc;
}

std::vector<SupervisedMetrics> supervised_train(
    Net<float>& net, const TeacherDataset& data, const SupervisedConfig& config,
    const std::function<void(const SupervisedMetrics&)>& on_epoch) {
  require(config.epochs >= 0 && config.batch_size >= 1, ErrorCode::kInvalidArgument,
          "bad supervised config");
  require(!data.train.empty(), ErrorCode::kInvalidArgument, "empty training set");
  std::mt19937_64 rng(config.seed);
  Adam<float> adam(AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay});
  std::vector<SupervisedMetrics> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const AzLoss loss = train_epoch(net, adam, data.train, {config.batch_size, 1}, rng);
    const Accuracy train = supervised_accuracy(net, data.train);
    const Accuracy val = supervised_accuracy(net, data.validation);
    history.push_back({epoch, loss.total, train.policy, train.value_sign, val.policy,
                       val.value_sign});
    if (on_epoch) on_epoch(history.back());
  }
  return history;
}

}  // namespace hexgraph
