// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   acceptance            run 1..13
//   acceptance 1 4 7      run the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "azero.hpp"
#include "dqn.hpp"
#include "evaluation.hpp"
#include "graph_algorithms.hpp"
#include "run_config.hpp"

using namespace hexgraph;

namespace {

// ------------------------------------------------------------ budgets

// Learning experiments. Each is sized for one commodity core.
constexpr int kDqn5Steps = 6'000;
constexpr std::uint64_t kSeeds[] = {1, 2, 3};

constexpr int kLongRangeSteps = 20'000;

constexpr int kTeacherGames = 2'000;
constexpr int kTeacherValidationGames = 500;
constexpr int kTeacherSimulations = 512;
constexpr int kTeacherPositionsPerGame = 0;
constexpr int kSupervisedEpochs = 30;

constexpr int kAzEpochs = 5;
constexpr int kAzGames = 200;
constexpr int kAzSimulations = 64;

// ------------------------------------------------------------ reporting

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Progress goes to stderr so stdout holds only the verdict lines.
template <class... Args>
void progress(const Args&... args) {
  std::ostringstream s;
  (s << ... << args);
  std::cerr << "  " << s.str() << std::endl;
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

// ------------------------------------------------------------ helpers

HexBoard random_position(int n, int stones, std::mt19937_64& rng) {
  while (true) {
    HexBoard b = HexBoard::any_size(n);
    for (int k = 0; k < stones && !b.is_over(); ++k) {
      auto empty = b.empty_cells();
      b.play(empty[rng() % empty.size()]);
    }
    if (!b.is_over()) return b;
  }
}

Mat<double> random_mat(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Mat<double> m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng);
  return m;
}

std::vector<std::pair<int, int>> random_edges(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coin(rng)) {
        e.emplace_back(a, b);
        e.emplace_back(b, a);
      }
    }
  }
  return e;
}

template <class T>
void randomise_biases(Net<T>& net, std::mt19937_64& rng) {
  // Zero biases put featureless nodes exactly on the ReLU kink.
  std::normal_distribution<double> d;
  for (auto* p : net.parameters()) {
    if (p->name.size() > 2 && p->name.substr(p->name.size() - 2) == ".b") {
      for (Eigen::Index k = 0; k < p->value.size(); ++k) p->value.data()[k] = 0.3 * d(rng);
    }
  }
}

using Checked = std::vector<std::pair<Mat<double>*, const Mat<double>*>>;

template <class T>
Checked all_params(Net<T>& net) {
  Checked c;
  for (auto* p : net.parameters()) c.emplace_back(&p->value, &p->grad);
  return c;
}

// Gradient of sum(outputs * r) through a whole net, so both heads are hit.
double net_grad_error(Net<double>& net, const std::vector<Position>& batch, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  NetOutput<double> r = net.forward(batch);
  for (auto& a : r.action) {
    for (auto& x : a) x = d(rng);
  }
  for (auto& v : r.value) v = d(rng);
  auto loss = [&] {
    auto o = net.forward(batch);
    double s = 0;
    for (std::size_t i = 0; i < o.action.size(); ++i) {
      for (std::size_t k = 0; k < o.action[i].size(); ++k) s += o.action[i][k] * r.action[i][k];
      s += o.value[i] * r.value[i];
    }
    return s;
  };
  auto backprop = [&] {
    zero_grads(net.parameters());
    net.forward_train(batch);
    net.backward(r);
  };
  return grad_check(all_params(net), loss, backprop);
}

std::vector<AzSample> random_az_samples(int count, int n, std::mt19937_64& rng) {
  std::vector<AzSample> out;
  while (static_cast<int>(out.size()) < count) {
    GameState s(n);
    const int moves = static_cast<int>(rng() % (n * n / 2));
    for (int k = 0; k < moves && !s.is_over(); ++k) s.play(static_cast<int>(rng() % s.num_actions()));
    if (s.is_over()) continue;
    std::vector<double> pi(s.num_actions());
    std::gamma_distribution<double> g(1.0, 1.0);
    for (double& p : pi) p = g(rng);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& p : pi) p /= total;
    out.push_back({s, pi, rng() % 2 ? 1.0 : -1.0});
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------ 1

Outcome grid_graph_equivalence() {
  std::mt19937_64 rng(1);
  int games = 0, mismatches = 0;
  for (int n = 3; n <= 7; ++n) {
    for (int t = 0; t < 10'000; ++t) {
      HexBoard b = HexBoard::any_size(n);
      ShannonGraph red = from_board(b, Color::kRed);
      ShannonGraph blue = from_board(b, Color::kBlue);
      bool ok = true;
      while (!b.is_over()) {
        auto empty = b.empty_cells();
        const Cell cell = empty[rng() % empty.size()];
        const NodeId vr = *red.node_of(cell);
        const NodeId vb = *blue.node_of(cell);
        if (b.to_move() == Color::kRed) {
          red.apply_join(vr);
          blue.apply_cut(vb);
        } else {
          red.apply_cut(vr);
          blue.apply_join(vb);
        }
        b.play(cell);
        if (!b.is_over()) {
          ok = ok && red.status() == GameStatus::kOngoing && blue.status() == GameStatus::kOngoing;
        }
      }
      // Union-find winner, checked against a flood fill.
      const Color w = *b.winner();
      ok = ok && b.winner_by_search() == w;
      const bool red_won = w == Color::kRed;
      ok = ok && red.status() == (red_won ? GameStatus::kShortWins : GameStatus::kCutWins);
      ok = ok && blue.status() == (red_won ? GameStatus::kCutWins : GameStatus::kShortWins);
      ++games;
      if (!ok) ++mismatches;
    }
  }
  return {mismatches == 0,
          std::to_string(games) + " playouts on n=3..7, " + std::to_string(mismatches) + " mismatches"};
}

// ------------------------------------------------------------ 2

// Every non-terminal position reachable from the empty 3x3 board by
// alternating play.
std::vector<HexBoard> reachable_3x3() {
  std::vector<HexBoard> out;
  std::set<std::vector<Stone>> seen;
  std::vector<HexBoard> stack = {HexBoard::any_size(3)};
  while (!stack.empty()) {
    HexBoard b = stack.back();
    stack.pop_back();
    if (!seen.insert(b.cells()).second) continue;
    if (b.is_over()) continue;
    out.push_back(b);
    for (Cell c : b.empty_cells()) stack.push_back(b.played(c));
  }
  return out;
}

// Table-free minimax, an oracle independent of the solver.
bool mover_wins(const ShannonGraph& g) {
  for (NodeId v : g.playable_nodes()) {
    const ShannonGraph c = g.to_move() == Role::kShort ? g.join(v) : g.cut(v);
    const GameStatus s = c.status();
    const bool won = g.to_move() == Role::kShort ? s == GameStatus::kShortWins
                                                   : s == GameStatus::kCutWins;
    if (won) return true;
    if (s == GameStatus::kOngoing && !mover_wins(c)) return true;
  }
  return false;
}

Outcome pruning_soundness() {
  std::mt19937_64 rng(2);
  int checked3 = 0, checked4 = 0, changed = 0, wrong = 0, oracle_disagree = 0;
  auto check = [&](const HexBoard& b, bool small) {
    for (Color perspective : {Color::kRed, Color::kBlue}) {
      ShannonGraph g = from_board(b, perspective);
      for (Role r : {Role::kShort, Role::kCut}) {
        g.set_to_move(r);
        const GameStatus before = solve(g).value;
        const PruneResult p = prune_all(g, &rng);
        if (!p.removed.empty()) ++changed;
        GameStatus after = p.graph.status();
        if (after == GameStatus::kOngoing) after = solve(p.graph).value;
        if (after != before) ++wrong;
        if (small) {
          const bool short_wins = (r == Role::kShort) == mover_wins(g);
          if (short_wins != (before == GameStatus::kShortWins)) ++oracle_disagree;
        }
        (small ? checked3 : checked4) += 1;
      }
    }
  };
  const std::vector<HexBoard> all3 = reachable_3x3();
  for (const HexBoard& b : all3) check(b, true);
  for (int t = 0; t < 500; ++t) check(random_position(4, static_cast<int>(rng() % 10), rng), false);
  std::ostringstream d;
  d << all3.size() << " 3x3 positions (" << checked3 << " graphs), 500 4x4 positions ("
    << checked4 << " graphs); " << changed << " graphs pruned, " << wrong
    << " value changes, solver vs minimax disagreements " << oracle_disagree;
  return {wrong == 0 && oracle_disagree == 0 && changed > 0, d.str()};
}

// ------------------------------------------------------------ 3

Outcome opening_counts() {
  // Orbits of the reflection (i, j) -> (n-1-j, n-1-i): n fixed cells plus
  // (n^2 - n) / 2 pairs.
  auto orbits = [](int n) { return n + (n * n - n) / 2; };
  RandomAgent a, b;
  const TournamentResult t8 = tournament({&a, &b}, 8, 3);
  const TournamentResult t11 = tournament({&a, &b}, 11, 3);
  const int o8 = static_cast<int>(unique_openings(8).size());
  const int o11 = static_cast<int>(unique_openings(11).size());
  const bool pass = o8 == 36 && orbits(8) == 36 && games_per_pairing(8) == 72 &&
                    t8.games[0][1] == 72 && o11 == 66 && orbits(11) == 66 &&
                    games_per_pairing(11) == 132 && t11.games[0][1] == 132;
  std::ostringstream d;
  d << "openings(8)=" << o8 << ", games(8)=" << t8.games[0][1] << ", openings(11)=" << o11
    << ", games(11)=" << t11.games[0][1];
  return {pass, d.str()};
}

// ------------------------------------------------------------ 4

Outcome numerics() {
  std::mt19937_64 rng(4);
  std::map<std::string, double> err;

  {
    Dense<double> d("d", 5, 4);
    d.init(rng);
    d.b.value = random_mat(1, 4, rng);
    Mat<double> x = random_mat(6, 5, rng), r = random_mat(6, 4, rng), dx;
    err["dense"] = grad_check(
        {{&d.w.value, &d.w.grad}, {&d.b.value, &d.b.grad}, {&x, &dx}},
        [&] { return (d.forward(x, nullptr).array() * r.array()).sum(); },
        [&] {
          zero_grads(d.parameters());
          Dense<double>::Cache c;
          d.forward(x, &c);
          dx = d.backward(r, c);
        });
  }
  {
    ImageShape s{2, 5, 5};
    Conv2d<double> c("c", 4, 3, 3);
    c.init(rng);
    c.b.value = random_mat(3, 1, rng);
    Mat<double> x = random_mat(4, s.pixels(), rng), r = random_mat(3, s.pixels(), rng), dx;
    err["conv2d"] = grad_check(
        {{&c.w.value, &c.w.grad}, {&c.b.value, &c.b.grad}, {&x, &dx}},
        [&] { return (c.forward(x, s, nullptr).array() * r.array()).sum(); },
        [&] {
          zero_grads(c.parameters());
          Conv2d<double>::Cache cache;
          c.forward(x, s, &cache);
          dx = c.backward(r, s, cache);
        });
  }
  {
    Csr g = Csr::from_edges(10, random_edges(10, 0.3, rng));
    SageConv<double> s("s", 3, 4);
    s.init(rng);
    s.b.value = random_mat(1, 4, rng);
    Mat<double> h = random_mat(10, 3, rng), r = random_mat(10, 4, rng), dh;
    err["sage_conv"] = grad_check(
        {{&s.w_self.value, &s.w_self.grad}, {&s.w_neigh.value, &s.w_neigh.grad},
         {&s.b.value, &s.b.grad}, {&h, &dh}},
        [&] { return (s.forward(g, h, nullptr).array() * r.array()).sum(); },
        [&] {
          zero_grads(s.parameters());
          SageConv<double>::Cache c;
          s.forward(g, h, &c);
          dh = s.backward(g, r, c);
        });
  }
  {
    Mat<double> h = random_mat(7, 3, rng), r = random_mat(2, 12, rng), dh;
    const std::vector<int> offsets = {0, 3, 7};
    err["readout"] = grad_check(
        {{&h, &dh}},
        [&] { return (Readout<double>::forward(h, offsets, nullptr).array() * r.array()).sum(); },
        [&] {
          Readout<double>::Cache c;
          Readout<double>::forward(h, offsets, &c);
          dh = Readout<double>::backward(r, c, 7);
        });
  }

  // Whole nets, which covers the dueling and policy heads of both families.
  std::vector<HexBoard> boards;
  std::vector<ShannonGraph> graphs;
  for (int i = 0; i < 3; ++i) boards.push_back(random_position(4, 3 + i, rng));
  for (const HexBoard& b : boards) graphs.push_back(from_board(b, Color::kRed));
  std::vector<Position> batch;
  for (std::size_t i = 0; i < boards.size(); ++i) batch.push_back({&graphs[i], &boards[i]});
  const nlohmann::json small_graph = {{"type", "graphnet"}, {"layers", 3}, {"width", 5},
                                      {"value_hidden", {6, 4}}};
  const nlohmann::json small_gao = {{"type", "gao"}, {"channels", 4}, {"blocks", 1}};
  for (const char* head : {"dueling", "policy"}) {
    nlohmann::json ga = small_graph, ca = small_gao;
    ga["head"] = head;
    ca["head"] = head;
    auto g = make_net<double>(ga, 5);
    randomise_biases(*g, rng);
    err[std::string("graph heads ") + head] = net_grad_error(*g, batch, rng);
    auto c = make_net<double>(ca, 6);
    randomise_biases(*c, rng);
    err[std::string("gao heads ") + head] = net_grad_error(*c, batch, rng);
  }
  {
    nlohmann::json pa = small_graph;
    pa["head"] = "policy";
    auto net = make_net<double>(pa, 7);
    randomise_biases(*net, rng);
    const std::vector<AzSample> samples = random_az_samples(4, 4, rng);
    std::vector<const AzSample*> ptrs;
    for (const auto& s : samples) ptrs.push_back(&s);
    err["alphazero loss"] = grad_check(
        all_params(*net), [&] { return az_loss(*net, ptrs, false).total; },
        [&] {
          zero_grads(net->parameters());
          az_loss(*net, ptrs, true);
        });
  }

  // Permutation equivariance of sage_conv at f32.
  SageConv<float> s("s", 6, 8);
  s.init(rng);
  double equivariance = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng() % 20);
    const auto e = random_edges(n, 0.3, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> pe;
    for (auto [a, b] : e) pe.emplace_back(perm[a], perm[b]);
    Mat<float> h = random_mat(n, 6, rng).cast<float>();
    Mat<float> ph(n, 6);
    for (int i = 0; i < n; ++i) ph.row(perm[i]) = h.row(i);
    Mat<float> y = s.forward(Csr::from_edges(n, e), h, nullptr);
    Mat<float> py = s.forward(Csr::from_edges(n, pe), ph, nullptr);
    for (int i = 0; i < n; ++i) {
      equivariance = std::max(
          equivariance, static_cast<double>((py.row(perm[i]) - y.row(i)).cwiseAbs().maxCoeff()));
    }
  }

  double worst = 0.0;
  std::ostringstream d;
  for (const auto& [name, e] : err) {
    worst = std::max(worst, e);
    d << name << " " << sci(e) << ", ";
  }
  d << "equivariance " << sci(equivariance);
  return {worst < 1e-4 && equivariance < 1e-5, d.str()};
}

// ------------------------------------------------------------ 5

Outcome dueling_identities() {
  std::mt19937_64 rng(5);
  GraphNet<float> net(GraphNetConfig{}, 7);
  // Larger weights keep the heads away from zero.
  for (auto* p : net.parameters()) p->value *= 3.0f;
  int checked = 0, bad_max = 0, bad_argmax = 0;
  while (checked < 1000) {
    std::vector<HexBoard> boards;
    std::vector<ShannonGraph> graphs;
    for (int i = 0; i < 50; ++i) {
      const int n = 3 + static_cast<int>(rng() % 5);
      boards.push_back(random_position(n, static_cast<int>(rng() % (n * n / 2)), rng));
    }
    for (const HexBoard& b : boards) graphs.push_back(from_board(b, Color::kRed));
    std::vector<Position> batch;
    for (std::size_t i = 0; i < boards.size(); ++i) batch.push_back({&graphs[i], &boards[i]});
    const NetOutput<float> out = net.forward(batch);
    for (std::size_t i = 0; i < batch.size(); ++i, ++checked) {
      const auto& q = out.action[i];
      const auto [adv, v] = net.advantage_and_value(batch[i]);
      const float qmax = *std::max_element(q.begin(), q.end());
      if (qmax != out.value[i] || v != out.value[i]) ++bad_max;
      const auto qa = std::max_element(q.begin(), q.end()) - q.begin();
      const auto aa = std::max_element(adv.begin(), adv.end()) - adv.begin();
      if (qa != aa) ++bad_argmax;
    }
  }
  return {bad_max == 0 && bad_argmax == 0,
          std::to_string(checked) + " states, max Q != V: " + std::to_string(bad_max) +
              ", argmax Q != argmax A: " + std::to_string(bad_argmax)};
}

// ------------------------------------------------------------ 6

Outcome q_target_cases() {
  auto online = make_net<float>(default_graph_arch(), 1);
  auto target = make_net<float>(default_graph_arch(), 2);
  const Transition win{GameState(3), 0, 1.0, 0.0, std::nullopt, true};
  const Transition loss{GameState(3), 0, 0.0, 1.0, std::nullopt, true};
  const Transition ongoing{GameState(3), 0, 0.0, 0.0, GameState(3), false};
  const double y_win = q_target(win, *online, *target, 0.98);
  const double y_loss = q_target(loss, *online, *target, 0.98);
  const double y_boot = q_target_value(ongoing, 0.98, 0.5);
  std::ostringstream d;
  d << "win " << y_win << ", loss " << y_loss << ", bootstrap " << y_boot;
  return {y_win == 1.0 && y_loss == -1.0 && y_boot == 0.49, d.str()};
}

// ------------------------------------------------------------ 7

Outcome desk_dqn() {
  double sum_random = 0.0, sum_initial = 0.0, worst_minutes = 0.0;
  std::ostringstream d;
  for (std::uint64_t seed : kSeeds) {
    const auto t0 = std::chrono::steady_clock::now();
    DqnConfig c;
    c.size = 5;
    c.seed = seed;
    c.total_steps = kDqn5Steps;
    c.epsilon_decay_steps = kDqn5Steps / 2;
    c.log_interval = kDqn5Steps;
    c.probe_games = 2;
    DqnResult r = train_dqn(c);
    const double minutes = seconds_since(t0) / 60.0;
    worst_minutes = std::max(worst_minutes, minutes);
    std::shared_ptr<const Net<float>> fin(std::move(r.net)), ini(std::move(r.initial));
    GreedyAgent final_agent(fin, "final"), initial_agent(ini, "initial");
    const double vs_random = winrate_vs_random(final_agent, 5, 30, 1000 + seed);
    const TournamentResult t = tournament({&final_agent, &initial_agent}, 5, seed);
    const double vs_initial = t.win_rate(0, 1);
    sum_random += vs_random;
    sum_initial += vs_initial;
    progress("seed ", seed, ": vs random ", fmt(vs_random), ", vs initial ", fmt(vs_initial),
             " (", t.games[0][1], " games), ", fmt(minutes, 1), " min");
    d << "seed " << seed << " " << fmt(vs_random, 2) << "/" << fmt(vs_initial, 2) << "; ";
  }
  const double n = static_cast<double>(std::size(kSeeds));
  const double mean_random = sum_random / n, mean_initial = sum_initial / n;
  d << "mean vs random " << fmt(mean_random) << ", mean vs initial " << fmt(mean_initial)
    << ", slowest run " << fmt(worst_minutes, 1) << " min";
  return {mean_random >= 0.9 && mean_initial > 0.6 && worst_minutes <= 30.0, d.str()};
}

// ------------------------------------------------------------ 8

Outcome long_range() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> sizes = {6, 7, 8, 9, 10, 11, 12, 13};
  int gnn_better = 0, gnn_above = 0, above_problems = 0;
  bool above_ok = true;
  std::ostringstream d;
  for (std::uint64_t seed : kSeeds) {
    int totals[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      DqnConfig c;
      c.size = 7;
      c.seed = seed;
      c.total_steps = kLongRangeSteps;
      c.epsilon_decay_steps = kLongRangeSteps / 2;
      c.log_interval = kLongRangeSteps;
      c.probe_games = 2;
      c.arch = k == 0 ? default_graph_arch() : default_gao_arch();
      DqnResult r = train_dqn(c);
      std::shared_ptr<const Net<float>> net(std::move(r.net));
      GreedyAgent agent(net, k == 0 ? "gnn" : "gao");
      const LongRangeTable table = eval_long_range(agent, sizes);
      totals[k] = table.total;
      if (k == 0) {
        gnn_above = table.errors_above(7);
        above_problems = table.problems_above(7);
        above_ok = above_ok && gnn_above * 4 <= above_problems;
      }
      progress("seed ", seed, " ", agent.name(), ": ", table.total, " errors, ",
               table.errors_above(7), "/", table.problems_above(7), " above 7, ",
               fmt(seconds_since(t0) / 60.0, 1), " min elapsed");
    }
    if (totals[0] < totals[1]) ++gnn_better;
    d << "seed " << seed << " gnn " << totals[0] << " (" << gnn_above << "/" << above_problems
      << " above 7) vs gao " << totals[1] << "; ";
  }
  const double minutes = seconds_since(t0) / 60.0;
  d << "gnn better in " << gnn_better << "/3, " << fmt(minutes, 1) << " min";
  return {gnn_better >= 2 && above_ok && minutes < 120.0, d.str()};
}

// ------------------------------------------------------------ 9

Outcome overfitting() {
  const auto t0 = std::chrono::steady_clock::now();
  RolloutMctsAgent teacher(kTeacherSimulations);
  TeacherOptions options;
  options.games = kTeacherGames;
  options.validation_fraction = static_cast<double>(kTeacherValidationGames) / kTeacherGames;
  options.positions_per_game = kTeacherPositionsPerGame;
  std::mt19937_64 rng(9);
  const TeacherDataset data = gen_teacher_dataset(teacher, 7, options, rng);
  progress("teacher set: ", data.train_games, "/", data.validation_games, " games, ",
           data.train.size(), "/", data.validation.size(), " positions, ",
           fmt(seconds_since(t0) / 60.0, 1), " min");

  int cnn_wider = 0;
  std::ostringstream d;
  d << data.train_games << "/" << data.validation_games << " games; ";
  for (std::uint64_t seed : kSeeds) {
    double gaps[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      auto net = make_net<float>(
          k == 0 ? default_graph_arch(HeadMode::kPolicy) : default_gao_arch(HeadMode::kPolicy), seed);
      SupervisedConfig c;
      c.epochs = kSupervisedEpochs;
      c.seed = seed;
      const auto metrics = supervised_train(*net, data, c, [&](const SupervisedMetrics& m) {
        if (m.epoch % 5 == 0) {
          progress("  epoch ", m.epoch, ": value sign train ", fmt(m.train_value_sign_accuracy),
                   " validation ", fmt(m.validation_value_sign_accuracy), ", ",
                   fmt(seconds_since(t0) / 60.0, 1), " min elapsed");
        }
      });
      const SupervisedMetrics& last = metrics.back();
      gaps[k] = last.train_value_sign_accuracy - last.validation_value_sign_accuracy;
      progress("seed ", seed, " ", k == 0 ? "gnn" : "gao", ": value sign train ",
               fmt(last.train_value_sign_accuracy), " validation ",
               fmt(last.validation_value_sign_accuracy), ", ",
               fmt(seconds_since(t0) / 60.0, 1), " min elapsed");
    }
    if (gaps[1] > gaps[0]) ++cnn_wider;
    d << "seed " << seed << " gap gnn " << fmt(gaps[0]) << " gao " << fmt(gaps[1]) << "; ";
  }
  d << "cnn gap wider in " << cnn_wider << "/3";
  return {cnn_wider >= 2, d.str()};
}

// ------------------------------------------------------------ 10

Outcome mcts_invariants() {
  std::mt19937_64 rng(10);
  const nlohmann::json arch = {{"type", "graphnet"}, {"layers", 3}, {"width", 16},
                               {"head", "policy"}, {"value_hidden", {16, 8}}};
  auto net = make_net<float>(arch, 3);
  int searches = 0, broken = 0;
  for (int n : {3, 4, 5, 6}) {
    for (int t = 0; t < 10; ++t) {
      GameState s(n);
      const int moves = static_cast<int>(rng() % (n * n / 2));
      for (int k = 0; k < moves && !s.is_over(); ++k) s.play(static_cast<int>(rng() % s.num_actions()));
      if (s.is_over()) continue;
      for (bool noise : {false, true}) {
        MctsConfig config{2 + static_cast<int>(rng() % 100)};
        config.root_noise = noise;
        const std::uint64_t seed = rng();
        std::mt19937_64 a(seed), b(seed);
        const MctsResult ra = mcts(s, *net, config, a);
        const MctsResult rb = mcts(s, *net, config, b);
        const double mass = std::accumulate(ra.pi.begin(), ra.pi.end(), 0.0);
        const bool ok = visits_conserved(ra.tree) && std::abs(mass - 1.0) < 1e-12 &&
                        ra.tree.nodes[0].visits == config.simulations &&
                        ra.visits == rb.visits && ra.pi == rb.pi &&
                        ra.root_value == rb.root_value;
        ++searches;
        if (!ok) ++broken;
      }
    }
  }
  const GateResult gate = gate_evaluate(*net, *net, 5, MctsConfig{32});
  std::ostringstream d;
  d << searches << " searches, " << broken << " violations; self gate " << gate.candidate_wins
    << "/" << gate.games << " = " << gate.win_rate;
  return {broken == 0 && gate.win_rate == 0.5 && !gate.replace, d.str()};
}

// ------------------------------------------------------------ 11

Outcome desk_azero() {
  const auto t0 = std::chrono::steady_clock::now();
  AzConfig c;
  c.size = 5;
  c.seed = 11;
  c.epochs = kAzEpochs;
  c.games_per_epoch = kAzGames;
  c.simulations = kAzSimulations;
  c.gate_simulations = kAzSimulations;
  const AzResult r = train_azero(c, nullptr, "", [](const nlohmann::json& j) {
    if (j.contains("gate_games")) progress(j.dump());
  });
  const GateResult g = gate_evaluate(*r.best, *r.initial, 5, MctsConfig{kAzSimulations});
  int promotions = 0;
  for (const auto& e : r.lineage) promotions += e.value("replaced", false) ? 1 : 0;
  std::ostringstream d;
  d << "final vs initial " << g.candidate_wins << "/" << g.games << " = " << fmt(g.win_rate)
    << ", " << promotions << " promotions, " << fmt(seconds_since(t0) / 60.0, 1) << " min";
  return {g.win_rate > 0.55, d.str()};
}

// ------------------------------------------------------------ 12

Outcome entropy() {
  const double empty = board_entropy(HexBoard(5));
  const std::vector<Stone> thirds = {Stone::kRed,   Stone::kBlue,  Stone::kEmpty,
                                     Stone::kBlue,  Stone::kEmpty, Stone::kRed,
                                     Stone::kEmpty, Stone::kRed,   Stone::kBlue};
  const double third = board_entropy(HexBoard::from_setup(3, thirds, Color::kRed));
  std::ostringstream d;
  d.precision(17);
  d << "empty " << empty << ", thirds " << third << " (ln 3 = " << std::log(3.0) << ")";
  return {empty == 0.0 && std::abs(third - std::log(3.0)) < 1e-9, d.str()};
}

// ------------------------------------------------------------ 13

Outcome checkpoint_round_trip() {
  std::mt19937_64 rng(13);
  const std::string path =
      (std::filesystem::temp_directory_path() / "hexgraph_acceptance_ckpt.json").string();
  int inputs = 0, differing = 0;
  for (const auto& arch : {default_graph_arch(), default_graph_arch(HeadMode::kPolicy),
                           default_gao_arch(), default_gao_arch(HeadMode::kPolicy)}) {
    auto net = make_net<float>(arch, rng());
    save_checkpoint(*net, path, {});
    const Checkpoint back = load_checkpoint(path);
    for (int t = 0; t < 100; ++t) {
      const int n = 3 + static_cast<int>(rng() % 6);
      const HexBoard b = random_position(n, static_cast<int>(rng() % (n * n / 2)), rng);
      const ShannonGraph g = from_board(b, Color::kRed);
      const auto x = net->forward({{&g, &b}});
      const auto y = back.net->forward({{&g, &b}});
      ++inputs;
      if (x.action != y.action || x.value != y.value) ++differing;
    }
  }
  std::remove(path.c_str());
  return {differing == 0, std::to_string(inputs) + " inputs over 4 archs, " +
                              std::to_string(differing) + " differ"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> all = {
      {1, {"grid/graph equivalence", grid_graph_equivalence}},
      {2, {"pruning soundness", pruning_soundness}},
      {3, {"opening counts", opening_counts}},
      {4, {"numerics", numerics}},
      {5, {"dueling identities", dueling_identities}},
      {6, {"q-target cases", q_target_cases}},
      {7, {"desk GraphDQN on 5x5", desk_dqn}},
      {8, {"long-range GNN vs CNN", long_range}},
      {9, {"overfitting GNN vs CNN", overfitting}},
      {10, {"mcts invariants", mcts_invariants}},
      {11, {"desk GraphAra on 5x5", desk_azero}},
      {12, {"entropy", entropy}},
      {13, {"checkpoint round trip", checkpoint_round_trip}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (!criteria().count(k)) {
      std::cerr << "unknown criterion '" << argv[i] << "'; expected 1..13" << std::endl;
      return 2;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (const auto& [k, _] : criteria()) selected.push_back(k);
  }

  int failed = 0;
  for (int k : selected) {
    const auto& [name, run] = criteria().at(k);
    std::cerr << "criterion " << k << " (" << name << ")" << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << " [" << name << "] "
              << o.detail << " (" << fmt(seconds_since(t0), 1) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
