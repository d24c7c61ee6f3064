#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "agents.hpp"
#include "game.hpp"
#include "json.hpp"
#include "models.hpp"

namespace hexgraph {

// One decision of one player with the position after the opponent's reply.
// done means the game ended at t or t+1, in which case s2 is empty. r_t is
// the reward of the mover at t, r_t1 that of the opponent at t+1.
struct Transition {
  GameState s;
  int action = 0;
  double r_t = 0.0;
  double r_t1 = 0.0;
  std::optional<GameState> s2;
  bool done = false;
};

// Target r_t - r_{t+1} + gamma * Q_target(s2, argmax_a Q_online(s2, a)),
// reduced to r_t - r_{t+1} when done. The bootstrap Q is passed in so the
// formula can be checked on its own.
double q_target_value(const Transition& t, double gamma, double bootstrap_q);
// Full target with the double-Q selection done by the two networks.
double q_target(const Transition& t, const Net<float>& online, const Net<float>& target,
                double gamma);
// Batched form; one target per transition.
std::vector<double> q_targets(const std::vector<const Transition*>& batch,
                              const Net<float>& online, const Net<float>& target, double gamma);

// Proportional prioritized replay over a sum tree with FIFO eviction.
class PriorityBuffer {
 public:
  PriorityBuffer(std::size_t capacity, double alpha);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double alpha() const { return alpha_; }

  // New entries get the largest priority seen so far.
  void push(Transition t);
  const Transition& at(std::size_t slot) const { return data_[slot]; }
  // Raw priority (before the alpha exponent) of a slot.
  double priority(std::size_t slot) const { return raw_[slot]; }
  double probability(std::size_t slot) const;

  struct Sample {
    std::vector<std::size_t> slots;
    std::vector<double> weights;  // (N P(i))^-beta / max_j w_j over the buffer
  };
  // Throws kInvalidState when fewer than k entries are stored.
  Sample sample(std::size_t k, double beta, std::mt19937_64& rng) const;
  // Priorities must be positive.
  void update(std::size_t slot, double priority);

 private:
  void set(std::size_t slot, double p_alpha);

  std::size_t capacity_;
  double alpha_;
  std::size_t tree_size_;
  std::vector<double> tree_;  // sums of p^alpha
  std::vector<double> min_tree_;
  std::vector<double> raw_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_priority_ = 1.0;
};

struct EpisodeResult {
  std::vector<Transition> transitions;
  GameRecord record;
};

// Self-play with one network for both sides. Each mover plays argmax Q with
// probability 1 - epsilon, otherwise a uniformly random action.
EpisodeResult self_play_episode(const Net<float>& net, double epsilon, std::mt19937_64& rng,
                                int size, bool prune = false,
                                std::optional<Cell> opening = std::nullopt);

struct DqnConfig {
  int size = 5;
  std::uint64_t seed = 0;
  nlohmann::json arch;  // empty: default graph net
  double gamma = 0.98;
  double lr = 1e-3;
  double weight_decay = 0.0;
  int batch_size = 64;
  int buffer_capacity = 50'000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 20'000;
  int target_sync = 500;
  double alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  int total_steps = 20'000;
  // Gradient steps per stored transition.
  double replay_ratio = 1.0;
  int learning_starts = 256;
  bool prune = false;
  int log_interval = 1'000;
  int checkpoint_interval = 0;  // 0: initial and final only
  int probe_games = 0;          // games vs random per log line; 0: 2 per opening
  double time_limit_seconds = 0.0;  // stop early when positive

  nlohmann::json to_json() const;
  static DqnConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct DqnResult {
  std::unique_ptr<Net<float>> initial;
  std::unique_ptr<Net<float>> net;
  std::vector<nlohmann::json> metrics;
  int steps = 0;
  int episodes = 0;
};

// Writes config.json, metrics.jsonl, games.jsonl and checkpoints into
// out_dir when it is not empty. The run is a pure function of the config.
DqnResult train_dqn(const DqnConfig& config, const std::string& out_dir = "",
                    const std::function<void(const nlohmann::json&)>& on_log = {});

// Games against a uniformly random opponent: each unique opening twice, once
// per colour, repeated until `games` games are played. Returns the win rate.
double winrate_vs_random(const Agent& agent, int size, int games, std::uint64_t seed,
                         bool prune = false);

}  // namespace hexgraph
