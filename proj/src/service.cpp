#include "service.hpp"

#include <filesystem>

#include "httplib.h"
#include "mcts.hpp"

namespace hexgraph {

namespace {

HttpReply error_reply(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIllegalMove:
    case ErrorCode::kGameOver:
      return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kFormatError:
    case ErrorCode::kResourceLimit:
      return 400;
    default:
      return 500;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json eval_payload(const GameState& state, const Decision& decision) {
  const auto& values = decision.eval.action_values;
  require(static_cast<int>(values.size()) == state.num_actions(), ErrorCode::kInvalidState,
          "evaluation does not match the position");
  const ShannonGraph& g = state.graph();
  const std::vector<NodeId> nodes = g.playable_nodes();
  nlohmann::json per_node = nlohmann::json::array();
  nlohmann::json per_cell = nlohmann::json::object();
  nlohmann::json visits = nlohmann::json::object();
  for (int a = 0; a < state.num_actions(); ++a) {
    const std::string cell = cell_to_string(state.action_cell(a));
    nlohmann::json entry = {{"node", nodes[a]}, {"cell", cell}, {"value", values[a]}};
    if (!decision.eval.visits.empty()) {
      entry["visits"] = decision.eval.visits[a];
      visits[cell] = decision.eval.visits[a];
    }
    per_node.push_back(std::move(entry));
    per_cell[cell] = values[a];
  }
  nlohmann::json out = {
      {"kind", decision.eval.kind},
      {"to_move", color_name(state.to_move())},
      {"move_number", state.move_count()},
      {"value", optional_number(decision.eval.value)},
      {"per_node", std::move(per_node)},
      {"per_cell", std::move(per_cell)},
      {"best", decision.action >= 0 ? cell_to_string(state.action_cell(decision.action)) : ""},
  };
  if (!decision.eval.visits.empty()) out["visits"] = std::move(visits);
  return out;
}

nlohmann::json state_payload(const GameState& state) {
  const HexBoard& b = state.board();
  nlohmann::json board = nlohmann::json::array();
  for (int r = 0; r < b.size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < b.size(); ++c) row.push_back(static_cast<int>(b.at({r, c})));
    board.push_back(std::move(row));
  }
  nlohmann::json legal = nlohmann::json::array();
  if (!state.is_over()) {
    for (Cell c : state.action_cells()) legal.push_back(cell_to_string(c));
  }
  return {
      {"size", b.size()},
      {"board", std::move(board)},
      {"to_move", state.is_over() ? nlohmann::json(nullptr) : nlohmann::json(color_name(state.to_move()))},
      {"winner", state.winner() ? nlohmann::json(color_name(*state.winner())) : nlohmann::json(nullptr)},
      {"legal", std::move(legal)},
      {"graph", nlohmann::json::parse(graph_to_json(state.graph()))},
      {"node_count", state.graph().num_nodes()},
      {"prune", state.prune()},
  };
}

struct GameService::Session {
  std::mutex mutex;
  std::string id;
  GameState state;
  std::unique_ptr<Agent> agent;
  nlohmann::json agent_info;
  Color human = Color::kRed;
  std::vector<nlohmann::json> history;
  nlohmann::json last_eval;
  std::mt19937_64 rng;

  Session(std::string id_, GameState s, std::unique_ptr<Agent> a, nlohmann::json info, Color h,
          std::uint64_t seed)
      : id(std::move(id_)), state(std::move(s)), agent(std::move(a)), agent_info(std::move(info)),
        human(h), rng(seed) {}

  nlohmann::json payload() const {
    nlohmann::json out = state_payload(state);
    out["game_id"] = id;
    out["human_color"] = color_name(human);
    out["agent"] = agent_info;
    out["moves"] = history;
    out["eval"] = last_eval;
    return out;
  }

  void record(Cell cell, const std::string& by) {
    const Color mover = state.to_move();
    state.play_cell(cell);
    nlohmann::json entry = {{"cell", cell_to_string(cell)}, {"color", color_name(mover)}, {"by", by}};
    if (!state.last_fill().empty()) {
      nlohmann::json fill = nlohmann::json::array();
      for (const auto& [c, s] : state.last_fill()) {
        fill.push_back({{"cell", cell_to_string(c)}, {"stone", static_cast<int>(s)}});
      }
      entry["filled"] = std::move(fill);
    }
    history.push_back(std::move(entry));
    if (!state.is_over()) {
      require(from_board(state.board(), Color::kRed) == state.graph(), ErrorCode::kInvalidState,
              "session board and graph diverged");
    }
  }

  // Plays the agent's move when it is the agent's turn. Returns the move.
  nlohmann::json agent_turn() {
    if (state.is_over() || state.to_move() == human) return nullptr;
    const Decision d = agent->decide(state, rng);
    last_eval = eval_payload(state, d);
    const Cell cell = state.action_cell(d.action);
    record(cell, "agent");
    return cell_to_string(cell);
  }
};

GameService::GameService(ServiceOptions options) : options_(std::move(options)) {
  agents_["random"] = {"builtin", nullptr, {{"description", "uniformly random moves"}}};
  agents_["rollout"] = {"builtin", nullptr,
                        {{"description", "UCT with random playouts; uses simulations"}}};
  agents_["solver"] = {"builtin", nullptr,
                       {{"description", "exact play"}, {"max_size", options_.solver_max_size}}};
  if (options_.ckpt_dir.empty()) return;
  namespace fs = std::filesystem;
  require(fs::is_directory(options_.ckpt_dir), ErrorCode::kIoError,
          "checkpoint directory not found: " + options_.ckpt_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(options_.ckpt_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    Checkpoint ck;
    try {
      ck = load_checkpoint(f.string());
    } catch (const Error&) {
      continue;  // configs and metrics live next to checkpoints
    }
    std::string name = fs::relative(f, options_.ckpt_dir).replace_extension().generic_string();
    nlohmann::json meta = ck.meta;
    meta["file"] = f.string();
    add_network(name, std::shared_ptr<const Net<float>>(std::move(ck.net)), meta);
  }
}

void GameService::add_network(const std::string& name, std::shared_ptr<const Net<float>> net,
                              nlohmann::json meta) {
  require(net != nullptr, ErrorCode::kInvalidArgument, "null network");
  meta["arch"] = net->arch();
  std::lock_guard lock(mutex_);
  agents_[name] = {"network", std::move(net), std::move(meta)};
}

std::size_t GameService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

HttpReply GameService::handle(const std::string& method, const std::string& path,
                              const std::string& body) {
  const std::vector<std::string> parts = split_path(path);
  try {
    nlohmann::json request = nlohmann::json::object();
    if (method == "POST" && !body.empty()) {
      request = nlohmann::json::parse(body, nullptr, false);
      if (request.is_discarded() || !request.is_object()) {
        return error_reply(400, "bad-request", "body must be a JSON object");
      }
    }
    if (parts.size() == 1 && parts[0] == "agents" && method == "GET") return list_agents();
    if (parts.size() == 1 && parts[0] == "games" && method == "POST") return create_game(request);
    if (parts.size() == 2 && parts[0] == "games") {
      if (method == "GET") return get_game(parts[1]);
      if (method == "DELETE") return delete_game(parts[1]);
    }
    if (parts.size() == 3 && parts[0] == "games" && parts[2] == "move" && method == "POST") {
      return play_move(parts[1], request);
    }
    return error_reply(404, "not-found", method + " " + path);
  } catch (const Error& e) {
    return error_reply(status_of(e.code()), error_code_name(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, "bad-request", e.what());
  }
}

HttpReply GameService::list_agents() const {
  nlohmann::json list = nlohmann::json::array();
  std::lock_guard lock(mutex_);
  for (const auto& [name, entry] : agents_) {
    nlohmann::json modes = entry.kind == "network" ? nlohmann::json{"greedy", "mcts"}
                                                   : nlohmann::json{"default"};
    list.push_back({{"name", name}, {"kind", entry.kind}, {"modes", modes}, {"meta", entry.meta}});
  }
  return {200, {{"agents", list}}};
}

std::unique_ptr<Agent> GameService::build_agent(const std::string& name, const std::string& mode,
                                                int simulations, int size) const {
  AgentEntry entry;
  {
    std::lock_guard lock(mutex_);
    auto it = agents_.find(name);
    if (it == agents_.end()) fail(ErrorCode::kInvalidArgument, "unknown agent '" + name + "'");
    entry = it->second;
  }
  require(simulations >= 2 && simulations <= options_.max_simulations,
          ErrorCode::kInvalidArgument,
          "simulations must be in [2, " + std::to_string(options_.max_simulations) + "]");
  if (entry.kind == "network") {
    if (mode == "greedy") return std::make_unique<GreedyAgent>(entry.net, name);
    if (mode == "mcts") {
      MctsConfig c;
      c.simulations = simulations;
      return std::make_unique<MctsAgent>(entry.net, c, name);
    }
    fail(ErrorCode::kInvalidArgument, "mode must be greedy or mcts");
  }
  if (name == "random") return std::make_unique<RandomAgent>();
  if (name == "rollout") return std::make_unique<RolloutMctsAgent>(simulations);
  require(size <= options_.solver_max_size, ErrorCode::kInvalidArgument,
          "solver agent is limited to size " + std::to_string(options_.solver_max_size));
  return std::make_unique<SolverAgent>();
}

HttpReply GameService::create_game(const nlohmann::json& request) {
  const int size = request.value("size", 7);
  require(size >= HexBoard::kMinSize && size <= HexBoard::kMaxSize, ErrorCode::kInvalidArgument,
          "size must be in [3, 25]");
  const std::string agent_name = request.value("agent", "random");
  const std::string mode = request.value("mode", "greedy");
  const int simulations = request.value("simulations", 200);
  const Color human = parse_color(request.value("human_color", "red"));
  const bool prune = request.value("prune", false);
  std::unique_ptr<Agent> agent = build_agent(agent_name, mode, simulations, size);
  nlohmann::json info = {{"name", agent_name}, {"mode", mode}, {"simulations", simulations}};

  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    require(static_cast<int>(sessions_.size()) < options_.max_sessions,
            ErrorCode::kResourceLimit, "too many sessions");
    const std::uint64_t n = next_id_++;
    s = std::make_shared<Session>("g" + std::to_string(n), GameState(size, prune),
                                  std::move(agent), info, human, options_.seed + n);
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mutex);
  const nlohmann::json agent_move = s->agent_turn();
  nlohmann::json state = s->payload();
  return {201, {{"game_id", s->id}, {"agent_move", agent_move}, {"state", std::move(state)}}};
}

std::shared_ptr<GameService::Session> GameService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

HttpReply GameService::get_game(const std::string& id) const {
  auto s = find(id);
  if (!s) return error_reply(404, "unknown-game", "no game '" + id + "'");
  std::lock_guard lock(s->mutex);
  return {200, s->payload()};
}

HttpReply GameService::play_move(const std::string& id, const nlohmann::json& request) {
  auto s = find(id);
  if (!s) return error_reply(404, "unknown-game", "no game '" + id + "'");
  if (!request.contains("cell") || !request["cell"].is_string()) {
    return error_reply(400, "bad-request", "expected {\"cell\": \"c4\"}");
  }
  const std::string text = request["cell"].get<std::string>();
  Cell cell;
  try {
    cell = parse_cell(text, 26);
  } catch (const Error& e) {
    return error_reply(400, "bad-request", e.what());
  }
  std::lock_guard lock(s->mutex);
  if (s->state.is_over()) return error_reply(409, "game-over", "the game is over");
  if (s->state.to_move() != s->human) return error_reply(409, "not-your-turn", "agent to move");
  if (!s->state.board().in_bounds(cell)) {
    return error_reply(409, "illegal-move", text + " is off the board");
  }
  if (s->state.action_of(cell) < 0) {
    return error_reply(409, "illegal-move", text + " is not empty");
  }
  s->record(cell, "human");
  const nlohmann::json agent_move = s->agent_turn();
  return {200,
          {{"human_move", text}, {"agent_move", agent_move}, {"eval", s->last_eval},
           {"state", s->payload()}}};
}

HttpReply GameService::delete_game(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) return error_reply(404, "unknown-game", "no game '" + id + "'");
  return {200, {{"deleted", id}}};
}

// ------------------------------------------------------------------ HTTP

struct HttpServer::Impl {
  GameService& service;
  httplib::Server server;
  explicit Impl(GameService& s) : service(s) {}
};

HttpServer::HttpServer(GameService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  GameService& svc = service;
  svr.set_default_headers({
      {"Access-Control-Allow-Origin", svc.options().cors_origin},
      {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type"},
  });
  auto route = [&svc](const httplib::Request& req, httplib::Response& res) {
    const HttpReply r = svc.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  svr.Get(".*", route);
  svr.Post(".*", route);
  svr.Delete(".*", route);
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  require(bound > 0, ErrorCode::kIoError,
          "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace hexgraph
