#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agents.hpp"
#include "json.hpp"

namespace hexgraph {

// Entry points behind the command line and the C API. Each takes a fully
// merged flat config, validates it and returns a JSON summary.

using LogFn = std::function<void(const nlohmann::json&)>;

// Agent specs:
//   random | solver | rollout[:simulations]
//   <checkpoint.json>                 greedy on the network output
//   <checkpoint.json>:mcts[:simulations]
std::unique_ptr<Agent> agent_from_spec(const std::string& spec);

// "6..13", "8", "6,7,9" or a mix such as "6..8,11".
std::vector<int> parse_sizes(const std::string& text);

// "graph" and "gao" in a config's arch stand for the default architectures.
nlohmann::json run_train_dqn(const nlohmann::json& config, const std::string& run_dir,
                             const LogFn& log = {});
// init_checkpoint may be empty.
nlohmann::json run_train_azero(const nlohmann::json& config, const std::string& init_checkpoint,
                               const std::string& run_dir, const LogFn& log = {});

nlohmann::json supervised_defaults();
// Generates a teacher set, trains one network on it and writes metrics.jsonl,
// initial.json and final.json into run_dir.
nlohmann::json run_supervised(const nlohmann::json& config, const std::string& run_dir,
                              const LogFn& log = {});

nlohmann::json selfplay_defaults();
// One JSON sample per line: {"graph", "pi", "z"}. With a checkpoint the game
// records go to <out>.games.jsonl; without one a rollout teacher plays.
nlohmann::json run_selfplay_data(const nlohmann::json& config, const std::string& out_path,
                                 const LogFn& log = {});

// port, host, ckpt_dir, seed, cors_origin.
nlohmann::json serve_defaults();

// Exact value of the position reached by `moves` from the empty board.
nlohmann::json run_solve(int size, const std::vector<std::string>& moves, bool prune = false);

struct TextReport {
  std::string csv;
  nlohmann::json json;
};
TextReport run_eval_long_range(const std::string& agent_spec, const std::vector<int>& sizes);
TextReport run_tournament(const std::vector<std::string>& agent_specs, int size,
                          std::uint64_t seed, int max_openings = 0, bool prune = false);

}  // namespace hexgraph
