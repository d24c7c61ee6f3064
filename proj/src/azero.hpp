#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "agents.hpp"
#include "game.hpp"
#include "json.hpp"
#include "mcts.hpp"
#include "models.hpp"

namespace hexgraph {

struct AzSample {
  GameState state;
  std::vector<double> pi;
  double z = 0.0;  // +1 when the mover at `state` went on to win
};

struct AzGame {
  std::vector<AzSample> samples;
  GameRecord record;
};

struct SelfPlayOptions {
  MctsConfig mcts;
  // Moves sampled from pi before switching to argmax. 0 reproduces the
  // argmax-only schedule.
  int temperature_moves = 6;
  bool prune = false;
};

AzGame self_play_game(const Net<float>& net, int size, const SelfPlayOptions& options,
                      std::mt19937_64& rng);

struct AzLoss {
  double total = 0.0;
  double value = 0.0;   // mean (z - v)^2
  double policy = 0.0;  // mean -pi . log p
};

// Mean combined loss over samples and, when `backprop` is set, its gradient
// accumulated into the network. The L2 term is left to the optimizer's
// decoupled weight decay.
template <class T>
AzLoss az_loss(Net<T>& net, const std::vector<const AzSample*>& batch, bool backprop);

struct TrainEpochOptions {
  int batch_size = 64;
  int passes = 1;  // sweeps over the dataset
};

// One epoch of minibatch Adam on the combined loss. Returns the mean loss.
AzLoss train_epoch(Net<float>& net, Adam<float>& adam, const std::vector<AzSample>& dataset,
                   const TrainEpochOptions& options, std::mt19937_64& rng);

struct GateResult {
  int games = 0;
  int candidate_wins = 0;
  double win_rate = 0.0;
  bool replace = false;
};

// Strict: a candidate at exactly the threshold keeps the incumbent.
inline bool gate_replaces(double win_rate, double threshold = 0.5) { return win_rate > threshold; }

// Paired openings: every unique opening twice, each side playing Red once.
// Both sides use MCTS without noise, so identical nets split exactly 50/50.
GateResult gate_evaluate(const Net<float>& candidate, const Net<float>& best, int size,
                         const MctsConfig& mcts, int max_openings = 0);

struct AzConfig {
  int size = 5;
  std::uint64_t seed = 0;
  nlohmann::json arch;  // empty: default policy-head graph net
  int simulations = 64;
  double c_puct = 1.5;
  double dirichlet_alpha = 0.0;
  double dirichlet_epsilon = 0.25;
  bool root_noise = true;
  int temperature_moves = 6;
  int games_per_epoch = 200;
  int epochs = 5;
  int batch_size = 64;
  int train_passes = 4;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int gate_simulations = 64;
  int gate_openings = 0;  // 0: all unique openings
  double gate_threshold = 0.5;
  bool prune = false;

  nlohmann::json to_json() const;
  static AzConfig from_json(const nlohmann::json& j);
  void validate() const;
  MctsConfig mcts() const;
};

struct AzResult {
  std::unique_ptr<Net<float>> initial;
  std::unique_ptr<Net<float>> best;
  std::vector<nlohmann::json> lineage;
};

// Self-play with the best net, training of a candidate
// that persists across epochs, gating against the best. `init` replaces the
// random initial network (a supervised checkpoint, for instance).
AzResult train_azero(const AzConfig& config, const Net<float>* init = nullptr,
                     const std::string& out_dir = "",
                     const std::function<void(const nlohmann::json&)>& on_log = {});

// {"graph": dump, "pi": [...], "z": +-1}
std::string az_sample_to_json(const AzSample& sample);

}  // namespace hexgraph
