#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "agents.hpp"
#include "game.hpp"
#include "json.hpp"
#include "models.hpp"

namespace hexgraph {

// Q (or pi, visit share, solver value) of every action, keyed both by graph
// node id and by board cell, plus visit counts for search agents.
nlohmann::json eval_payload(const GameState& state, const Decision& decision);

// Board matrix (0 empty, 1 red, 2 blue), graph dump, history and winner.
nlohmann::json state_payload(const GameState& state);

struct ServiceOptions {
  std::string ckpt_dir;  // every *.json checkpoint in it becomes an agent
  std::uint64_t seed = 0;
  std::string cors_origin = "*";
  int max_sessions = 1024;
  int max_simulations = 5000;
  int solver_max_size = 4;
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent game service. Sessions live in memory; checkpoints are
// loaded once and shared read-only. Moves of one session are serialised,
// different sessions run concurrently.
class GameService {
 public:
  explicit GameService(ServiceOptions options = {});

  // Registers a network under `name`, replacing a builtin of the same name.
  void add_network(const std::string& name, std::shared_ptr<const Net<float>> net,
                   nlohmann::json meta = nlohmann::json::object());

  HttpReply handle(const std::string& method, const std::string& path,
                   const std::string& body);

  const ServiceOptions& options() const { return options_; }
  std::size_t session_count() const;

 private:
  struct Session;
  struct AgentEntry {
    std::string kind;  // "network" or "builtin"
    std::shared_ptr<const Net<float>> net;
    nlohmann::json meta;
  };

  HttpReply list_agents() const;
  HttpReply create_game(const nlohmann::json& request);
  HttpReply get_game(const std::string& id) const;
  HttpReply play_move(const std::string& id, const nlohmann::json& request);
  HttpReply delete_game(const std::string& id);

  std::shared_ptr<Session> find(const std::string& id) const;
  std::unique_ptr<Agent> build_agent(const std::string& name, const std::string& mode,
                                     int simulations, int size) const;

  ServiceOptions options_;
  std::map<std::string, AgentEntry> agents_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

// Blocking HTTP front end with CORS headers on every response.
class HttpServer {
 public:
  explicit HttpServer(GameService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // port 0 picks a free port. Returns the bound port; throws kIoError.
  int bind(const std::string& host, int port);
  // Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hexgraph
