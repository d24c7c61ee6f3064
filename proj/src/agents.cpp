#include "agents.hpp"

#include <algorithm>
#include <cmath>

namespace hexgraph {

int action_of_node(const ShannonGraph& graph, NodeId node) {
  require(graph.contains(node) && !graph.is_terminal(node), ErrorCode::kInvalidArgument,
          "node is not playable");
  return node - (graph.t1() < node ? 1 : 0) - (graph.t2() < node ? 1 : 0);
}

Decision RandomAgent::decide(const GameState& state, std::mt19937_64& rng) const {
  require(!state.is_over(), ErrorCode::kInvalidState, "game is over");
  const int n = state.num_actions();
  Decision d;
  d.action = std::uniform_int_distribution<int>(0, n - 1)(rng);
  d.eval.kind = "random";
  d.eval.action_values.assign(n, 1.0 / n);
  return d;
}

GreedyAgent::GreedyAgent(std::shared_ptr<const Net<float>> net, std::string name)
    : net_(std::move(net)), name_(std::move(name)) {
  require(net_ != nullptr, ErrorCode::kInvalidArgument, "greedy agent needs a network");
}

Decision GreedyAgent::decide(const GameState& state, std::mt19937_64&) const {
  require(!state.is_over(), ErrorCode::kInvalidState, "game is over");
  NetOutput<float> out = net_->forward({state.position()});
  Decision d;
  d.eval.kind = net_->arch().value("head", "dueling") == "policy" ? "policy" : "q";
  d.eval.action_values.assign(out.action[0].begin(), out.action[0].end());
  d.eval.value = out.value[0];
  d.action = argmax_index(d.eval.action_values);
  return d;
}

MctsAgent::MctsAgent(std::shared_ptr<const Net<float>> net, MctsConfig config, std::string name)
    : net_(std::move(net)), config_(config), name_(std::move(name)) {
  require(net_ != nullptr, ErrorCode::kInvalidArgument, "mcts agent needs a network");
}

Decision MctsAgent::decide(const GameState& state, std::mt19937_64& rng) const {
  MctsResult r = mcts(state, *net_, config_, rng);
  Decision d;
  d.eval.kind = "mcts";
  d.eval.action_values = r.pi;
  d.eval.visits = r.visits;
  d.eval.value = r.root_value;
  d.action = argmax_index(r.pi);
  return d;
}

Decision SolverAgent::decide(const GameState& state, std::mt19937_64&) const {
  require(!state.is_over(), ErrorCode::kInvalidState, "game is over");
  std::vector<NodeId> wins = winning_moves(state.graph(), options_);
  Decision d;
  d.eval.kind = "solver";
  d.eval.action_values.assign(state.num_actions(), -1.0);
  for (NodeId v : wins) d.eval.action_values[action_of_node(state.graph(), v)] = 1.0;
  d.eval.value = wins.empty() ? -1.0 : 1.0;
  d.action = argmax_index(d.eval.action_values);
  return d;
}

namespace {

struct UctNode {
  std::vector<int> cells;  // untried and tried moves, as board indices
  std::vector<int> child;
  std::vector<int> visits;
  std::vector<double> wins;  // for the player moving at this node
  int total = 0;
};

// Fills the empty cells in random order, alternating colours from the side to
// move, and returns the winner. On a full board exactly one side connects.
Color random_playout(HexBoard board, std::vector<int>& scratch, std::mt19937_64& rng) {
  scratch.clear();
  for (int i = 0; i < board.num_cells(); ++i) {
    if (board.at_index(i) == Stone::kEmpty) scratch.push_back(i);
  }
  std::shuffle(scratch.begin(), scratch.end(), rng);
  for (int i : scratch) {
    if (board.is_over()) break;
    board.play(board.cell_at(i));
  }
  return *board.winner();
}

}  // namespace

Decision RolloutMctsAgent::decide(const GameState& state, std::mt19937_64& rng) const {
  require(!state.is_over(), ErrorCode::kInvalidState, "game is over");
  require(simulations_ >= 1, ErrorCode::kInvalidArgument, "rollout mcts needs simulations");
  const HexBoard& root_board = state.board();
  std::vector<UctNode> nodes;
  std::vector<HexBoard> boards;
  auto make_node = [&](const HexBoard& b) {
    UctNode n;
    if (!b.is_over()) {
      for (int i = 0; i < b.num_cells(); ++i) {
        if (b.at_index(i) == Stone::kEmpty) n.cells.push_back(i);
      }
    }
    n.child.assign(n.cells.size(), -1);
    n.visits.assign(n.cells.size(), 0);
    n.wins.assign(n.cells.size(), 0.0);
    nodes.push_back(std::move(n));
    boards.push_back(b);
    return static_cast<int>(nodes.size()) - 1;
  };
  make_node(root_board);
  // Only moves that are actions of the state are searched at the root.
  {
    UctNode& root = nodes[0];
    std::vector<int> keep;
    for (Cell c : state.action_cells()) keep.push_back(root_board.index(c));
    root.cells = keep;
    root.child.assign(keep.size(), -1);
    root.visits.assign(keep.size(), 0);
    root.wins.assign(keep.size(), 0.0);
  }

  std::vector<int> scratch;
  std::vector<std::pair<int, int>> path;
  for (int sim = 0; sim < simulations_; ++sim) {
    path.clear();
    int current = 0;
    Color winner;
    while (true) {
      UctNode& node = nodes[current];
      const HexBoard& board = boards[current];
      if (board.is_over()) {
        winner = *board.winner();
        break;
      }
      int pick = -1;
      double best = -1e300;
      const double log_total = std::log(static_cast<double>(node.total) + 1.0);
      for (int k = 0; k < static_cast<int>(node.cells.size()); ++k) {
        if (node.visits[k] == 0) {
          pick = k;
          break;
        }
        const double score =
            node.wins[k] / node.visits[k] + exploration_ * std::sqrt(log_total / node.visits[k]);
        if (score > best) {
          best = score;
          pick = k;
        }
      }
      path.emplace_back(current, pick);
      if (node.child[pick] >= 0) {
        current = node.child[pick];
        continue;
      }
      HexBoard next = board.played(board.cell_at(node.cells[pick]));
      const int id = make_node(next);
      nodes[path.back().first].child[pick] = id;
      winner = next.is_over() ? *next.winner() : random_playout(next, scratch, rng);
      break;
    }
    for (auto [n, k] : path) {
      UctNode& node = nodes[n];
      node.total += 1;
      node.visits[k] += 1;
      if (boards[n].to_move() == winner) node.wins[k] += 1.0;
    }
  }

  const UctNode& root = nodes[0];
  Decision d;
  d.eval.kind = "mcts";
  d.eval.visits.assign(state.num_actions(), 0);
  d.eval.action_values.assign(state.num_actions(), 0.0);
  double wins = 0.0;
  for (std::size_t k = 0; k < root.cells.size(); ++k) {
    d.eval.visits[k] = root.visits[k];
    d.eval.action_values[k] = static_cast<double>(root.visits[k]) / root.total;
    wins += root.wins[k];
  }
  d.eval.value = 2.0 * wins / root.total - 1.0;
  d.action = argmax_index(d.eval.action_values);
  return d;
}

}  // namespace hexgraph
