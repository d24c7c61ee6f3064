#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "game.hpp"
#include "mcts.hpp"
#include "models.hpp"

namespace hexgraph {

// What an agent saw when it chose a move. action_values has one entry per
// action of the state: Q values, policy probabilities, visit shares or solver
// values depending on `kind`.
struct Evaluation {
  std::string kind;
  std::vector<double> action_values;
  std::vector<int> visits;  // mcts agents only
  std::optional<double> value;
};

struct Decision {
  int action = -1;
  Evaluation eval;
};

// Agents are immutable once built; decide() may run concurrently on distinct
// rngs.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual Decision decide(const GameState& state, std::mt19937_64& rng) const = 0;
};

class RandomAgent final : public Agent {
 public:
  std::string name() const override { return "random"; }
  Decision decide(const GameState& state, std::mt19937_64& rng) const override;
};

// Plays the action with the largest network output, lowest index on ties.
class GreedyAgent final : public Agent {
 public:
  GreedyAgent(std::shared_ptr<const Net<float>> net, std::string name = "greedy");
  std::string name() const override { return name_; }
  Decision decide(const GameState& state, std::mt19937_64& rng) const override;

 private:
  std::shared_ptr<const Net<float>> net_;
  std::string name_;
};

// Plays argmax of the visit distribution.
class MctsAgent final : public Agent {
 public:
  MctsAgent(std::shared_ptr<const Net<float>> net, MctsConfig config, std::string name = "mcts");
  std::string name() const override { return name_; }
  Decision decide(const GameState& state, std::mt19937_64& rng) const override;

 private:
  std::shared_ptr<const Net<float>> net_;
  MctsConfig config_;
  std::string name_;
};

// Exact play on small graphs: values are +1 for winning moves and -1 for
// losing ones; the lowest winning action is played.
class SolverAgent final : public Agent {
 public:
  explicit SolverAgent(SolveOptions options = {}) : options_(options) {}
  std::string name() const override { return "solver"; }
  Decision decide(const GameState& state, std::mt19937_64& rng) const override;

 private:
  SolveOptions options_;
};

// UCT search with uniformly random playouts on the board. Needs no network,
// which makes it usable as a fixed teacher.
class RolloutMctsAgent final : public Agent {
 public:
  explicit RolloutMctsAgent(int simulations, double exploration = 1.0)
      : simulations_(simulations), exploration_(exploration) {}
  std::string name() const override { return "rollout-mcts"; }
  Decision decide(const GameState& state, std::mt19937_64& rng) const override;

 private:
  int simulations_;
  double exploration_;
};

// Index of graph node `node` among the playable nodes, i.e. its action index.
int action_of_node(const ShannonGraph& graph, NodeId node);

}  // namespace hexgraph
