#pragma once

#include <random>
#include <vector>

#include "game.hpp"
#include "models.hpp"

namespace hexgraph {

struct MctsConfig {
  int simulations = 64;
  double c_puct = 1.5;
  bool root_noise = false;
  // 0 picks 10 / (average number of legal moves), taken as half the cells.
  double dirichlet_alpha = 0.0;
  double dirichlet_epsilon = 0.25;
};

struct SearchEdge {
  int action = 0;
  double prior = 0.0;
  int visits = 0;
  double value_sum = 0.0;  // from the parent's mover's point of view
  int child = -1;
};

struct SearchNode {
  GameState state;
  bool expanded = false;
  int visits = 0;
  double value_sum = 0.0;  // from this node's mover's point of view
  std::vector<SearchEdge> edges;
};

struct SearchTree {
  std::vector<SearchNode> nodes;  // nodes[0] is the root
};

struct MctsResult {
  std::vector<double> pi;   // per action of the root state
  std::vector<int> visits;  // per action
  double root_value = 0.0;  // mean backed-up value for the root mover
  SearchTree tree;
};

// Priors are the softmax of the net's action outputs and leaves are scored by
// its value output. The root evaluation uses one simulation, so the root
// children receive simulations - 1 visits in total. Throws kInvalidState for
// finished games and kInvalidArgument for fewer than 2 simulations.
MctsResult mcts(const GameState& root, const Net<float>& net, const MctsConfig& config,
                std::mt19937_64& rng);

// Checks N(node) == sum of child visits + 1 at every expanded node.
bool visits_conserved(const SearchTree& tree);

// Lowest index among the maxima.
int argmax_index(const std::vector<double>& values);

}  // namespace hexgraph
