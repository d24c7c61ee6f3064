#include "shannon_graph.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace hexgraph {

const char* role_name(Role r) { return r == Role::kShort ? "short" : "cut"; }

namespace {

void insert_sorted(std::vector<NodeId>& v, NodeId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

const char* border_name(Color perspective, int terminal) {
  if (perspective == Color::kRed) return terminal == 1 ? "top" : "bottom";
  return terminal == 1 ? "left" : "right";
}

}  // namespace

ShannonGraph ShannonGraph::from_edges(
    int num_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges,
    NodeId t1, NodeId t2, Role to_move, Color perspective) {
  require(num_nodes >= 2, ErrorCode::kInvalidArgument, "graph needs two terminals");
  require(t1 != t2 && t1 >= 0 && t2 >= 0 && t1 < num_nodes && t2 < num_nodes,
          ErrorCode::kInvalidArgument, "bad terminal ids");
  ShannonGraph g;
  g.adj_.resize(num_nodes);
  g.labels_.resize(num_nodes);
  for (int v = 0; v < num_nodes; ++v) g.labels_[v].cell = {v, 0};
  g.labels_[t1] = {1, {}};
  g.labels_[t2] = {2, {}};
  g.t1_ = t1;
  g.t2_ = t2;
  g.to_move_ = to_move;
  g.perspective_ = perspective;
  for (auto [a, b] : edges) {
    require(a >= 0 && b >= 0 && a < num_nodes && b < num_nodes, ErrorCode::kInvalidArgument,
            "edge endpoint out of range");
    g.add_edge(a, b);
  }
  return g;
}

int ShannonGraph::num_edges() const {
  std::size_t deg = 0;
  for (const auto& n : adj_) deg += n.size();
  return static_cast<int>(deg / 2);
}

bool ShannonGraph::adjacent(NodeId a, NodeId b) const {
  const auto& n = adj_[a];
  return std::binary_search(n.begin(), n.end(), b);
}

std::optional<NodeId> ShannonGraph::node_of(Cell cell) const {
  for (int v = 0; v < num_nodes(); ++v) {
    if (labels_[v].terminal == 0 && labels_[v].cell == cell) return v;
  }
  return std::nullopt;
}

std::string ShannonGraph::label_string(NodeId v) const {
  const NodeLabel& l = labels_[v];
  if (l.terminal != 0) return border_name(perspective_, l.terminal);
  return cell_to_string(l.cell);
}

std::vector<NodeId> ShannonGraph::playable_nodes() const {
  std::vector<NodeId> out;
  out.reserve(adj_.size());
  for (int v = 0; v < num_nodes(); ++v) {
    if (!is_terminal(v)) out.push_back(v);
  }
  return out;
}

void ShannonGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) return;
  insert_sorted(adj_[a], b);
  insert_sorted(adj_[b], a);
}

void ShannonGraph::connect_all(std::span<const NodeId> nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) add_edge(nodes[i], nodes[j]);
  }
}

void ShannonGraph::remove_nodes(std::vector<NodeId> nodes) {
  if (nodes.empty()) return;
  std::vector<NodeId> remap(adj_.size(), 0);
  for (NodeId v : nodes) {
    require(contains(v) && !is_terminal(v), ErrorCode::kInvalidArgument,
            "cannot remove node " + std::to_string(v));
    remap[v] = -1;
  }
  NodeId next = 0;
  for (std::size_t v = 0; v < adj_.size(); ++v) {
    if (remap[v] != -1) remap[v] = next++;
  }
  std::vector<std::vector<NodeId>> adj(next);
  std::vector<NodeLabel> labels(next);
  for (std::size_t v = 0; v < adj_.size(); ++v) {
    if (remap[v] == -1) continue;
    auto& out = adj[remap[v]];
    out.reserve(adj_[v].size());
    for (NodeId u : adj_[v]) {
      if (remap[u] != -1) out.push_back(remap[u]);  // order preserved
    }
    labels[remap[v]] = labels_[v];
  }
  adj_ = std::move(adj);
  labels_ = std::move(labels);
  t1_ = remap[t1_];
  t2_ = remap[t2_];
}

void ShannonGraph::apply_join(NodeId v) {
  require(contains(v) && !is_terminal(v), ErrorCode::kIllegalMove,
          "join needs a non-terminal node");
  require(to_move_ == Role::kShort, ErrorCode::kIllegalMove, "it is Cut's move");
  const std::vector<NodeId> hood = adj_[v];
  connect_all(hood);
  remove_nodes({v});
  to_move_ = Role::kCut;
}

void ShannonGraph::apply_cut(NodeId v) {
  require(contains(v) && !is_terminal(v), ErrorCode::kIllegalMove,
          "cut needs a non-terminal node");
  require(to_move_ == Role::kCut, ErrorCode::kIllegalMove, "it is Short's move");
  remove_nodes({v});
  to_move_ = Role::kShort;
}

ShannonGraph ShannonGraph::join(NodeId v) const {
  ShannonGraph g = *this;
  g.apply_join(v);
  return g;
}

ShannonGraph ShannonGraph::cut(NodeId v) const {
  ShannonGraph g = *this;
  g.apply_cut(v);
  return g;
}

GameStatus ShannonGraph::status() const {
  if (adjacent(t1_, t2_)) return GameStatus::kShortWins;
  std::vector<char> seen(adj_.size(), 0);
  std::vector<NodeId> stack = {t1_};
  seen[t1_] = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : adj_[v]) {
      if (u == t2_) return GameStatus::kOngoing;
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return GameStatus::kCutWins;
}

ShannonGraph from_board(const HexBoard& board, Color perspective) {
  if (board.is_over()) fail(ErrorCode::kInvalidState, "position is already won");
  const int n = board.size();
  const int cells = board.num_cells();
  const Stone own = stone_of(perspective);

  // Union-find over own stones.
  std::vector<int> parent(cells);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto on_border = [&](Cell c, int which) {
    if (perspective == Color::kRed) return which == 1 ? c.row == 0 : c.row == n - 1;
    return which == 1 ? c.col == 0 : c.col == n - 1;
  };
  for (int i = 0; i < cells; ++i) {
    if (board.at_index(i) != own) continue;
    const Cell c = board.cell_at(i);
    for (const auto& [dr, dc] : kHexOffsets) {
      const Cell nb{c.row + dr, c.col + dc};
      if (board.in_bounds(nb) && board.at(nb) == own) parent[find(i)] = find(board.index(nb));
    }
  }

  ShannonGraph g;
  std::vector<int> node_of_cell(cells, -1);
  for (int i = 0; i < cells; ++i) {
    if (board.at_index(i) == Stone::kEmpty) {
      node_of_cell[i] = static_cast<int>(g.labels_.size());
      g.labels_.push_back({0, board.cell_at(i)});
    }
  }
  const int num_tiles = static_cast<int>(g.labels_.size());
  g.t1_ = num_tiles;
  g.t2_ = num_tiles + 1;
  g.labels_.push_back({1, {}});
  g.labels_.push_back({2, {}});
  g.adj_.resize(num_tiles + 2);
  g.perspective_ = perspective;
  g.to_move_ = role_of(board.to_move(), perspective);

  // Group root -> empty neighbours and touched borders, made into a clique.
  std::vector<std::vector<NodeId>> group_hood(cells);
  for (int i = 0; i < cells; ++i) {
    const Cell c = board.cell_at(i);
    if (board.at_index(i) == own) {
      auto& hood = group_hood[find(i)];
      if (on_border(c, 1)) hood.push_back(g.t1_);
      if (on_border(c, 2)) hood.push_back(g.t2_);
      continue;
    }
    if (node_of_cell[i] < 0) continue;
    const NodeId v = node_of_cell[i];
    if (on_border(c, 1)) g.add_edge(v, g.t1_);
    if (on_border(c, 2)) g.add_edge(v, g.t2_);
    for (const auto& [dr, dc] : kHexOffsets) {
      const Cell nb{c.row + dr, c.col + dc};
      if (!board.in_bounds(nb)) continue;
      const int j = board.index(nb);
      if (node_of_cell[j] >= 0) {
        g.add_edge(v, node_of_cell[j]);
      } else if (board.at_index(j) == own) {
        group_hood[find(j)].push_back(v);
      }
    }
  }
  for (auto& hood : group_hood) {
    if (hood.size() < 2) continue;
    std::sort(hood.begin(), hood.end());
    hood.erase(std::unique(hood.begin(), hood.end()), hood.end());
    g.connect_all(hood);
  }
  return g;
}

GraphEncoding encode(const ShannonGraph& graph) {
  GraphEncoding e;
  e.num_nodes = graph.num_nodes();
  e.to_move = graph.to_move();
  e.features.assign(static_cast<std::size_t>(e.num_nodes) * 2, 0.0f);
  e.features[graph.t1() * 2] = 1.0f;
  e.features[graph.t2() * 2 + 1] = 1.0f;
  e.edges.reserve(static_cast<std::size_t>(graph.num_edges()) * 2);
  for (NodeId v = 0; v < e.num_nodes; ++v) {
    for (NodeId u : graph.neighbors(v)) e.edges.emplace_back(v, u);
  }
  return e;
}

std::string graph_to_json(const ShannonGraph& graph) {
  nlohmann::json j;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    nodes.push_back({{"id", v},
                     {"label", graph.label_string(v)},
                     {"terminal", graph.label(v).terminal}});
  }
  auto& edges = j["edges"] = nlohmann::json::array();
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    for (NodeId u : graph.neighbors(v)) {
      if (v < u) edges.push_back({v, u});
    }
  }
  j["to_move"] = role_name(graph.to_move());
  j["perspective"] = color_name(graph.perspective());
  return j.dump();
}

ShannonGraph graph_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& nodes = j.at("nodes");
    const int n = static_cast<int>(nodes.size());
    const Color perspective = parse_color(j.at("perspective").get<std::string>());
    NodeId t1 = -1, t2 = -1;
    std::vector<NodeLabel> labels(n);
    for (const auto& node : nodes) {
      const int id = node.at("id").get<int>();
      require(id >= 0 && id < n, ErrorCode::kFormatError, "node id out of range");
      const int term = node.at("terminal").get<int>();
      labels[id].terminal = term;
      if (term == 1) t1 = id;
      if (term == 2) t2 = id;
      if (term == 0) {
        const std::string label = node.at("label").get<std::string>();
        labels[id].cell = parse_cell(label, HexBoard::kMaxSize);
      }
    }
    require(t1 >= 0 && t2 >= 0, ErrorCode::kFormatError, "graph dump lacks terminals");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    const std::string mover = j.at("to_move").get<std::string>();
    require(mover == "short" || mover == "cut", ErrorCode::kFormatError, "bad to_move");
    ShannonGraph g = ShannonGraph::from_edges(
        n, edges, t1, t2, mover == "short" ? Role::kShort : Role::kCut, perspective);
    for (NodeId v = 0; v < n; ++v) {
      if (labels[v].terminal == 0) g.set_cell_label(v, labels[v].cell);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("bad graph dump: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::kFormatError, e.what());
  }
}

}  // namespace hexgraph
