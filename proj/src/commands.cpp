#include "commands.hpp"

#include <filesystem>
#include <fstream>

#include "azero.hpp"
#include "dqn.hpp"
#include "evaluation.hpp"
#include "graph_algorithms.hpp"
#include "run_config.hpp"

namespace hexgraph {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "bad " + what + " '" + text + "'");
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// Rejects keys that `defaults` does not know, then overlays.
nlohmann::json checked_merge(const nlohmann::json& defaults, const nlohmann::json& config,
                             const std::string& what) {
  require(config.is_object(), ErrorCode::kInvalidArgument, what + " config must be an object");
  nlohmann::json out = defaults;
  for (const auto& [key, value] : config.items()) {
    require(defaults.contains(key), ErrorCode::kInvalidArgument,
            "unknown " + what + " option '" + key + "'");
    out[key] = value;
  }
  return out;
}

nlohmann::json cells_of(const ShannonGraph& g, const std::vector<NodeId>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (NodeId v : nodes) out.push_back(cell_to_string(g.label(v).cell));
  return out;
}

nlohmann::json with_arch(nlohmann::json config, HeadMode head) {
  if (config.is_object() && config.contains("arch") && config["arch"].is_string()) {
    const std::string a = config["arch"].get<std::string>();
    if (a == "graph") config["arch"] = default_graph_arch(head);
    else if (a == "gao") config["arch"] = default_gao_arch(head);
    else fail(ErrorCode::kInvalidArgument, "arch must be graph, gao or an arch object");
  }
  return config;
}

}  // namespace

std::unique_ptr<Agent> agent_from_spec(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  const std::string& head = parts[0];
  require(!head.empty(), ErrorCode::kInvalidArgument, "empty agent spec");
  if (head == "random" && parts.size() == 1) return std::make_unique<RandomAgent>();
  if (head == "solver" && parts.size() == 1) return std::make_unique<SolverAgent>();
  if (head == "rollout" && parts.size() <= 2) {
    const int sims = parts.size() == 2 ? parse_int(parts[1], "simulations") : 200;
    require(sims >= 1, ErrorCode::kInvalidArgument, "rollout needs simulations >= 1");
    return std::make_unique<RolloutMctsAgent>(sims);
  }
  require(parts.size() <= 3, ErrorCode::kInvalidArgument, "bad agent spec '" + spec + "'");
  std::shared_ptr<const Net<float>> net(load_checkpoint(head).net);
  if (parts.size() == 1) return std::make_unique<GreedyAgent>(net, stem(head));
  require(parts[1] == "mcts", ErrorCode::kInvalidArgument,
          "bad agent mode '" + parts[1] + "' (expected mcts)");
  MctsConfig c;
  if (parts.size() == 3) c.simulations = parse_int(parts[2], "simulations");
  return std::make_unique<MctsAgent>(net, c, stem(head) + ":mcts");
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  for (const std::string& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      sizes.push_back(parse_int(item, "size"));
      continue;
    }
    const int lo = parse_int(item.substr(0, dots), "size");
    const int hi = parse_int(item.substr(dots + 2), "size");
    require(lo <= hi, ErrorCode::kInvalidArgument, "empty size range '" + item + "'");
    for (int n = lo; n <= hi; ++n) sizes.push_back(n);
  }
  return sizes;
}

nlohmann::json run_train_dqn(const nlohmann::json& config, const std::string& run_dir,
                             const LogFn& log) {
  const DqnConfig c = DqnConfig::from_json(with_arch(config, HeadMode::kDueling));
  DqnResult r = train_dqn(c, run_dir, log);
  nlohmann::json out = {{"run_dir", run_dir}, {"steps", r.steps}, {"episodes", r.episodes},
                        {"final_hash", content_hash(*r.net)}};
  if (!r.metrics.empty()) out["last_metrics"] = r.metrics.back();
  return out;
}

nlohmann::json run_train_azero(const nlohmann::json& config, const std::string& init_checkpoint,
                               const std::string& run_dir, const LogFn& log) {
  const AzConfig c = AzConfig::from_json(with_arch(config, HeadMode::kPolicy));
  std::unique_ptr<Net<float>> init;
  if (!init_checkpoint.empty()) init = load_checkpoint(init_checkpoint).net;
  AzResult r = train_azero(c, init.get(), run_dir, log);
  return {{"run_dir", run_dir}, {"epochs", c.epochs}, {"best_hash", content_hash(*r.best)},
          {"lineage", r.lineage}};
}

nlohmann::json supervised_defaults() {
  return {{"size", 7},
          {"seed", 0},
          {"teacher", "rollout:512"},
          {"games", 2500},
          {"validation_fraction", 0.2},
          {"positions_per_game", 0},
          {"random_opening_moves", 1},
          {"arch", "graph"},
          {"epochs", 30},
          {"batch_size", 64},
          {"lr", 1e-3},
          {"weight_decay", 1e-4}};
}

nlohmann::json run_supervised(const nlohmann::json& config, const std::string& run_dir,
                              const LogFn& log) {
  const nlohmann::json c = checked_merge(supervised_defaults(), config, "supervised");
  try {
    const std::uint64_t seed = c.at("seed").get<std::uint64_t>();
    nlohmann::json arch = c.at("arch");
    if (arch == "graph") arch = default_graph_arch(HeadMode::kPolicy);
    if (arch == "gao") arch = default_gao_arch(HeadMode::kPolicy);
    require(arch.is_object(), ErrorCode::kInvalidArgument,
            "arch must be graph, gao or an arch object");
    TeacherOptions t;
    t.games = c.at("games").get<int>();
    t.validation_fraction = c.at("validation_fraction").get<double>();
    t.positions_per_game = c.at("positions_per_game").get<int>();
    t.random_opening_moves = c.at("random_opening_moves").get<int>();
    SupervisedConfig s{c.at("epochs").get<int>(), c.at("batch_size").get<int>(),
                       c.at("lr").get<double>(), c.at("weight_decay").get<double>(), seed};

    const std::unique_ptr<Agent> teacher = agent_from_spec(c.at("teacher").get<std::string>());
    std::mt19937_64 rng(seed);
    const TeacherDataset data = gen_teacher_dataset(*teacher, c.at("size").get<int>(), t, rng);
    if (log) {
      log({{"event", "dataset"}, {"train_positions", data.train.size()},
           {"validation_positions", data.validation.size()}, {"train_games", data.train_games},
           {"validation_games", data.validation_games}});
    }
    auto net = make_net<float>(arch, seed);
    std::ofstream metrics;
    if (!run_dir.empty()) {
      write_config(run_dir, c);
      save_checkpoint(*net, run_dir + "/initial.json", {{"epoch", 0}});
      metrics.open(run_dir + "/metrics.jsonl");
      require(metrics.good(), ErrorCode::kIoError, "cannot write into " + run_dir);
    }
    const auto history = supervised_train(*net, data, s, [&](const SupervisedMetrics& m) {
      if (metrics.is_open()) metrics << m.to_json().dump() << std::endl;
      if (log) log(m.to_json());
    });
    if (!run_dir.empty()) save_checkpoint(*net, run_dir + "/final.json", {{"epoch", s.epochs}});
    nlohmann::json out = {{"run_dir", run_dir},
                          {"train_positions", data.train.size()},
                          {"validation_positions", data.validation.size()},
                          {"final_hash", content_hash(*net)}};
    if (!history.empty()) out["last_metrics"] = history.back().to_json();
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad supervised config: ") + e.what());
  }
}

nlohmann::json selfplay_defaults() {
  return {{"size", 5},        {"seed", 0},          {"games", 100},
          {"checkpoint", ""}, {"simulations", 64},  {"temperature_moves", 6},
          {"prune", false}};
}

nlohmann::json run_selfplay_data(const nlohmann::json& config, const std::string& out_path,
                                 const LogFn& log) {
  const nlohmann::json c = checked_merge(selfplay_defaults(), config, "selfplay");
  try {
    const std::string ckpt = c.at("checkpoint").get<std::string>();
    const int size = c.at("size").get<int>();
    const int games = c.at("games").get<int>();
    require(games >= 1, ErrorCode::kInvalidArgument, "games must be positive");
    require(!out_path.empty(), ErrorCode::kInvalidArgument, "selfplay needs an output path");
    std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
    std::ofstream samples(out_path);
    require(samples.good(), ErrorCode::kIoError, "cannot write " + out_path);
    int positions = 0;
    if (ckpt.empty()) {
      // Without a network the rollout teacher plays both sides.
      RolloutMctsAgent teacher(c.at("simulations").get<int>());
      TeacherOptions t;
      t.games = games;
      t.validation_fraction = 0.0;
      const TeacherDataset d = gen_teacher_dataset(teacher, size, t, rng);
      for (const AzSample& s : d.train) samples << az_sample_to_json(s) << "\n";
      positions = static_cast<int>(d.train.size());
    } else {
      const Checkpoint ck = load_checkpoint(ckpt);
      std::ofstream records(out_path + ".games.jsonl");
      require(records.good(), ErrorCode::kIoError, "cannot write " + out_path + ".games.jsonl");
      SelfPlayOptions o;
      o.mcts.simulations = c.at("simulations").get<int>();
      o.mcts.root_noise = true;
      o.temperature_moves = c.at("temperature_moves").get<int>();
      o.prune = c.at("prune").get<bool>();
      for (int g = 0; g < games; ++g) {
        const AzGame game = self_play_game(*ck.net, size, o, rng);
        for (const AzSample& s : game.samples) samples << az_sample_to_json(s) << "\n";
        records << game_record_to_json(game.record) << "\n";
        positions += static_cast<int>(game.samples.size());
        if (log) log({{"game", g + 1}, {"positions", positions}});
      }
    }
    return {{"out", out_path}, {"games", games}, {"positions", positions}};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad selfplay config: ") + e.what());
  }
}

nlohmann::json serve_defaults() {
  return {{"port", 8080}, {"host", "127.0.0.1"}, {"ckpt_dir", ""}, {"seed", 0},
          {"cors_origin", "*"}};
}

nlohmann::json run_solve(int size, const std::vector<std::string>& moves, bool prune) {
  GameState s(size, prune);
  nlohmann::json played = nlohmann::json::array();
  for (const std::string& m : moves) {
    s.play_cell(parse_cell(m, size));
    played.push_back(m);
  }
  nlohmann::json out = {{"size", size}, {"moves", played}};
  if (s.is_over()) {
    out["to_move"] = nullptr;
    out["winner"] = color_name(*s.winner());
    out["winning_moves"] = nlohmann::json::array();
    return out;
  }
  const ShannonGraph& g = s.graph();
  const SolveResult r = solve(g);
  const Color short_color = g.perspective();
  const Color winner = r.value == GameStatus::kShortWins ? short_color : opponent(short_color);
  out["to_move"] = color_name(s.to_move());
  out["winner"] = color_name(winner);
  out["mover_wins"] = winner == s.to_move();
  out["winning_moves"] = cells_of(g, winning_moves(g));
  out["nodes"] = r.nodes;
  return out;
}

TextReport run_eval_long_range(const std::string& agent_spec, const std::vector<int>& sizes) {
  const std::unique_ptr<Agent> agent = agent_from_spec(agent_spec);
  const LongRangeTable t = eval_long_range(*agent, sizes);
  nlohmann::json j = long_range_json(t);
  j["agent"] = agent->name();
  return {long_range_csv(t), j};
}

TextReport run_tournament(const std::vector<std::string>& agent_specs, int size,
                          std::uint64_t seed, int max_openings, bool prune) {
  require(agent_specs.size() >= 2, ErrorCode::kInvalidArgument, "a tournament needs 2 agents");
  std::vector<std::unique_ptr<Agent>> owned;
  std::vector<const Agent*> agents;
  for (const std::string& spec : agent_specs) {
    owned.push_back(agent_from_spec(spec));
    agents.push_back(owned.back().get());
  }
  const TournamentResult r = tournament(agents, size, seed, max_openings, prune);
  return {tournament_csv(r), tournament_json(r)};
}

}  // namespace hexgraph
