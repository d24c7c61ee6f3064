#include "mcts.hpp"

#include <cmath>

namespace hexgraph {

int argmax_index(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "argmax of an empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace {

// Expands a non-terminal node and returns its value for its own mover.
double expand(SearchNode& node, const Net<float>& net) {
  NetOutput<float> out = net.forward({node.state.position()});
  std::vector<double> logits(out.action[0].begin(), out.action[0].end());
  std::vector<double> priors = softmax(logits);
  node.edges.resize(priors.size());
  for (std::size_t a = 0; a < priors.size(); ++a) {
    node.edges[a].action = static_cast<int>(a);
    node.edges[a].prior = priors[a];
  }
  node.expanded = true;
  return out.value[0];
}

void add_noise(SearchNode& root, const MctsConfig& config, std::mt19937_64& rng) {
  const int cells = root.state.size() * root.state.size();
  const double alpha =
      config.dirichlet_alpha > 0 ? config.dirichlet_alpha : 10.0 / std::max(1.0, cells / 2.0);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> noise(root.edges.size());
  double total = 0.0;
  for (double& x : noise) {
    x = gamma(rng);
    total += x;
  }
  if (total <= 0.0) return;
  const double eps = config.dirichlet_epsilon;
  for (std::size_t a = 0; a < noise.size(); ++a) {
    root.edges[a].prior = (1.0 - eps) * root.edges[a].prior + eps * noise[a] / total;
  }
}

int select(const SearchNode& node, double c_puct) {
  const double scale = std::sqrt(static_cast<double>(node.visits));
  int best = 0;
  double best_score = -1e300;
  for (int a = 0; a < static_cast<int>(node.edges.size()); ++a) {
    const SearchEdge& e = node.edges[a];
    const double q = e.visits > 0 ? e.value_sum / e.visits : 0.0;
    const double score = q + c_puct * e.prior * scale / (1.0 + e.visits);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

}  // namespace

MctsResult mcts(const GameState& root, const Net<float>& net, const MctsConfig& config,
                std::mt19937_64& rng) {
  require(!root.is_over(), ErrorCode::kInvalidState, "search from a finished game");
  require(config.simulations >= 2, ErrorCode::kInvalidArgument, "mcts needs at least 2 simulations");
  MctsResult result;
  auto& nodes = result.tree.nodes;
  nodes.reserve(config.simulations);
  nodes.push_back(SearchNode{root, false, 0, 0.0, {}});
  const double root_value = expand(nodes[0], net);
  nodes[0].visits = 1;
  nodes[0].value_sum = root_value;
  if (config.root_noise) add_noise(nodes[0], config, rng);

  std::vector<std::pair<int, int>> path;  // (node, edge)
  for (int sim = 1; sim < config.simulations; ++sim) {
    path.clear();
    int current = 0;
    double value = 0.0;  // for the mover at the leaf
    while (true) {
      SearchNode& node = nodes[current];
      if (node.state.is_over()) {
        // The previous mover has just won.
        value = -1.0;
        break;
      }
      const int a = select(node, config.c_puct);
      path.emplace_back(current, a);
      const int child = nodes[current].edges[a].child;
      if (child >= 0) {
        current = child;
        continue;
      }
      SearchNode leaf{nodes[current].state.after(a), false, 0, 0.0, {}};
      value = leaf.state.is_over() ? -1.0 : expand(leaf, net);
      nodes.push_back(std::move(leaf));
      current = static_cast<int>(nodes.size()) - 1;
      nodes[path.back().first].edges[a].child = current;
      break;
    }
    nodes[current].visits += 1;
    nodes[current].value_sum += value;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      value = -value;
      SearchEdge& e = nodes[it->first].edges[it->second];
      e.visits += 1;
      e.value_sum += value;
      nodes[it->first].visits += 1;
      nodes[it->first].value_sum += value;
    }
  }

  const SearchNode& r = nodes[0];
  result.visits.resize(r.edges.size());
  result.pi.resize(r.edges.size());
  int total = 0;
  for (std::size_t a = 0; a < r.edges.size(); ++a) {
    result.visits[a] = r.edges[a].visits;
    total += r.edges[a].visits;
  }
  for (std::size_t a = 0; a < r.edges.size(); ++a) {
    result.pi[a] = static_cast<double>(result.visits[a]) / total;
  }
  result.root_value = r.value_sum / r.visits;
  return result;
}

bool visits_conserved(const SearchTree& tree) {
  for (const SearchNode& node : tree.nodes) {
    if (!node.expanded) continue;
    int sum = 0;
    for (const SearchEdge& e : node.edges) {
      sum += e.visits;
      if (e.child >= 0 && tree.nodes[e.child].visits != e.visits) return false;
      if (e.child < 0 && e.visits != 0) return false;
    }
    if (node.visits != sum + 1) return false;
  }
  return true;
}

}  // namespace hexgraph
