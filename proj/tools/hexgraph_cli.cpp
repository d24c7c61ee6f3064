// Command line front end. Talks to the engine only through the C API.

#include <csignal>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hexgraph/hexgraph.h"
#include "json.hpp"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct Failure {
  hg_status status;
  std::string message;
};

void check(hg_status s) {
  if (s != HG_OK) throw Failure{s, hg_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  hg_string_free(s);
  return out;
}

void print_line(const char* line, void*) {
  std::cerr << line << std::endl;
}

// Shared by the training subcommands: --config, --set and the typed flags
// collected into flat key = value lines.
struct RunOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_root = "runs";
  bool quiet = false;
  std::map<std::string, std::string> flags;

  std::string flag_lines() const {
    std::string text;
    for (const auto& [k, v] : flags) text += k + " = " + v + "\n";
    for (const std::string& kv : sets) text += kv + "\n";
    if (seed) text += "seed = " + std::to_string(*seed) + "\n";
    return text;
  }
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--seed", o.seed, "Random seed (required)")->required();
  cmd->add_option("--config", o.config_file, "Config file: flat key = value, or .json")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets, "Override one key, e.g. --set lr=0.0005");
  cmd->add_option("--out", o.out_root, "Root directory for run directories");
  cmd->add_flag("--quiet", o.quiet, "Do not print progress lines");
}

// Typed flag stored as a config key when given.
template <class T>
void keyed(CLI::App* cmd, RunOptions& o, const std::string& flag, const std::string& key,
           const std::string& help) {
  cmd->add_option_function<T>(
      flag, [&o, key](const T& v) {
        if constexpr (std::is_same_v<T, std::string>) {
          o.flags[key] = v;
        } else {
          o.flags[key] = std::to_string(v);
        }
      },
      help);
}

std::string resolve(const char* kind, const RunOptions& o) {
  char* out = nullptr;
  check(hg_resolve_config(kind, o.config_file.c_str(), o.flag_lines().c_str(), &out));
  return take(out);
}

std::string new_run_dir(const RunOptions& o) {
  char* out = nullptr;
  check(hg_make_run_dir(o.out_root.c_str(), *o.seed, &out));
  return take(out);
}

hg_service* active_service = nullptr;

void on_signal(int) {
  if (active_service) hg_service_stop(active_service);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hex self-play engine on Shannon vertex-switching graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hg_version()));

  RunOptions dqn, az, sup;
  std::string az_init;

  auto* train_dqn = app.add_subcommand("train-dqn", "Train a Q network by self-play");
  add_run_options(train_dqn, dqn);
  keyed<int>(train_dqn, dqn, "--size", "size", "Board size");
  keyed<int>(train_dqn, dqn, "--steps", "total_steps", "Gradient steps");
  keyed<std::string>(train_dqn, dqn, "--arch", "arch", "graph, gao or an arch JSON object");
  keyed<double>(train_dqn, dqn, "--lr", "lr", "Adam learning rate");

  auto* train_az = app.add_subcommand("train-azero", "AlphaZero-style training with gating");
  add_run_options(train_az, az);
  keyed<int>(train_az, az, "--size", "size", "Board size");
  keyed<int>(train_az, az, "--epochs", "epochs", "Self-play/train/gate epochs");
  keyed<int>(train_az, az, "--games", "games_per_epoch", "Self-play games per epoch");
  keyed<int>(train_az, az, "--simulations", "simulations", "MCTS simulations per move");
  keyed<std::string>(train_az, az, "--arch", "arch", "graph, gao or an arch JSON object");
  train_az->add_option("--init", az_init, "Initial checkpoint")->check(CLI::ExistingFile);

  auto* supervised = app.add_subcommand("supervised", "Imitation of a teacher agent");
  add_run_options(supervised, sup);
  keyed<int>(supervised, sup, "--size", "size", "Board size");
  keyed<int>(supervised, sup, "--games", "games", "Teacher games (train + validation)");
  keyed<int>(supervised, sup, "--epochs", "epochs", "Training epochs");
  keyed<std::string>(supervised, sup, "--arch", "arch", "graph, gao or an arch JSON object");
  keyed<std::string>(supervised, sup, "--teacher", "teacher", "Teacher agent spec");

  std::string lr_agent, lr_sizes = "6..13";
  bool lr_json = false;
  auto* eval_lr = app.add_subcommand("eval-longrange", "Score an agent on long-range problems");
  eval_lr->add_option("--ckpt,--agent", lr_agent,
                      "Checkpoint or agent spec: random | solver | rollout[:n] | "
                      "<ckpt.json>[:mcts[:n]]")
      ->required();
  eval_lr->add_option("--sizes", lr_sizes, "Sizes, e.g. 6..13 or 8,9");
  eval_lr->add_flag("--json", lr_json, "Print JSON instead of CSV");

  std::string t_agents;
  int t_size = 8, t_openings = 0;
  std::uint64_t t_seed = 0;
  bool t_prune = false, t_json = false;
  auto* tour = app.add_subcommand("tournament", "Round robin over all unique openings");
  tour->add_option("--agents", t_agents, "Comma-separated agent specs")->required();
  tour->add_option("--size", t_size, "Board size");
  tour->add_option("--seed", t_seed, "Random seed");
  tour->add_option("--max-openings", t_openings, "Use only the first n openings");
  tour->add_flag("--prune", t_prune, "Fill dead and captured cells after every move");
  tour->add_flag("--json", t_json, "Print JSON instead of CSV");

  RunOptions sp;
  std::string sp_out;
  auto* selfplay = app.add_subcommand("selfplay-data", "Write self-play training samples");
  selfplay->add_option("--seed", sp.seed, "Random seed");
  selfplay->add_option("--config", sp.config_file, "Config file")->check(CLI::ExistingFile);
  selfplay->add_option("--set", sp.sets, "Override one key");
  selfplay->add_option("--out", sp_out, "Output JSONL file")->required();
  keyed<std::string>(selfplay, sp, "--ckpt", "checkpoint", "Network; omit for a rollout teacher");
  keyed<int>(selfplay, sp, "--size", "size", "Board size");
  keyed<int>(selfplay, sp, "--games", "games", "Number of games");
  keyed<int>(selfplay, sp, "--simulations", "simulations", "Search simulations per move");

  int s_size = 3;
  std::string s_moves;
  bool s_prune = false;
  auto* solve = app.add_subcommand("solve", "Exact value of a position");
  solve->add_option("--size", s_size, "Board size")->required();
  solve->add_option("--moves", s_moves, "Moves from the empty board, e.g. a1,b2");
  solve->add_flag("--prune", s_prune, "Fill dead and captured cells after every move");

  RunOptions sv;
  auto* serve = app.add_subcommand("serve", "HTTP game service");
  keyed<int>(serve, sv, "--port", "port", "TCP port");
  keyed<std::string>(serve, sv, "--host", "host", "Bind address");
  keyed<std::string>(serve, sv, "--ckpt-dir", "ckpt_dir", "Directory of checkpoints");
  keyed<std::string>(serve, sv, "--cors-origin", "cors_origin", "Allowed browser origin");
  serve->add_option("--seed", sv.seed, "Random seed for agents");
  serve->add_option("--config", sv.config_file, "Config file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    auto train = [](const char* kind, const RunOptions& o, auto&& start) {
      hg_tune_allocator();
      const std::string config = resolve(kind, o);
      const std::string dir = new_run_dir(o);
      std::cerr << "run directory " << dir << std::endl;
      char* summary = nullptr;
      check(start(config, dir, o.quiet ? nullptr : print_line, &summary));
      std::cout << take(summary) << std::endl;
    };
    if (*train_dqn) {
      train("dqn", dqn, [](const std::string& c, const std::string& d, hg_log_fn log, char** s) {
        return hg_train_dqn(c.c_str(), d.c_str(), log, nullptr, s);
      });
    } else if (*train_az) {
      train("azero", az, [&](const std::string& c, const std::string& d, hg_log_fn log, char** s) {
        return hg_train_azero(c.c_str(), az_init.c_str(), d.c_str(), log, nullptr, s);
      });
    } else if (*supervised) {
      train("supervised", sup,
            [](const std::string& c, const std::string& d, hg_log_fn log, char** s) {
              return hg_supervised(c.c_str(), d.c_str(), log, nullptr, s);
            });
    } else if (*eval_lr) {
      char *csv = nullptr, *json = nullptr;
      check(hg_eval_long_range(lr_agent.c_str(), lr_sizes.c_str(), &csv, &json));
      const std::string c = take(csv), j = take(json);
      std::cout << (lr_json ? j + "\n" : c);
    } else if (*tour) {
      char *csv = nullptr, *json = nullptr;
      check(hg_tournament(t_agents.c_str(), t_size, t_seed, t_openings, t_prune, &csv, &json));
      const std::string c = take(csv), j = take(json);
      std::cout << (t_json ? j + "\n" : c);
    } else if (*selfplay) {
      const std::string config = resolve("selfplay", sp);
      char* summary = nullptr;
      check(hg_selfplay_data(config.c_str(), sp_out.c_str(), nullptr, nullptr, &summary));
      std::cout << take(summary) << std::endl;
    } else if (*solve) {
      char* json = nullptr;
      check(hg_solve(s_size, s_moves.c_str(), s_prune, &json));
      std::cout << take(json) << std::endl;
    } else if (*serve) {
      char* out = nullptr;
      check(hg_resolve_config("serve", sv.config_file.c_str(), sv.flag_lines().c_str(), &out));
      nlohmann::json options = nlohmann::json::parse(take(out));
      const std::string host = options.at("host").get<std::string>();
      const int port = options.at("port").get<int>();
      options.erase("host");
      options.erase("port");

      hg_service* service = nullptr;
      check(hg_service_new(options.dump().c_str(), &service));
      char* agents = nullptr;
      int status = 0;
      check(hg_service_request(service, "GET", "/agents", "", &status, &agents));
      bool has_network = false;
      for (const auto& a : nlohmann::json::parse(take(agents))["agents"]) {
        has_network = has_network || a["kind"] == "network";
      }
      if (!has_network) {
        hg_service_free(service);
        throw Failure{HG_INVALID_ARGUMENT, "no loadable checkpoint; pass --ckpt-dir"};
      }
      int bound = 0;
      check(hg_service_bind(service, host.c_str(), port, &bound));
      std::cerr << "serving on http://" << host << ":" << bound << std::endl;
      active_service = service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const hg_status s = hg_service_listen(service);
      active_service = nullptr;
      hg_service_free(service);
      check(s);
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << hg_status_name(f.status) << "): " << f.message << std::endl;
    return f.status == HG_INVALID_ARGUMENT ? kUsageError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kRuntimeError;
  }
  return 0;
}
