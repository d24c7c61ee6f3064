#include "azero.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace hexgraph {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AzConfig, size, seed, arch, simulations, c_puct,
                                                dirichlet_alpha, dirichlet_epsilon, root_noise,
                                                temperature_moves, games_per_epoch, epochs,
                                                batch_size, train_passes, lr, weight_decay,
                                                gate_simulations, gate_openings, gate_threshold,
                                                prune)

AzGame self_play_game(const Net<float>& net, int size, const SelfPlayOptions& options,
                      std::mt19937_64& rng) {
  AzGame game;
  game.record.size = size;
  GameState state(size, options.prune);
  std::vector<Color> movers;
  int move = 0;
  while (!state.is_over()) {
    MctsResult r = mcts(state, net, options.mcts, rng);
    int action;
    if (move < options.temperature_moves) {
      std::discrete_distribution<int> pick(r.pi.begin(), r.pi.end());
      action = pick(rng);
    } else {
      action = argmax_index(r.pi);
    }
    movers.push_back(state.to_move());
    game.samples.push_back({state, std::move(r.pi), 0.0});
    game.record.moves.push_back(state.action_cell(action));
    state.play(action);
    ++move;
  }
  game.record.winner = state.winner();
  for (std::size_t i = 0; i < game.samples.size(); ++i) {
    game.samples[i].z = movers[i] == *state.winner() ? 1.0 : -1.0;
  }
  return game;
}

template <class T>
AzLoss az_loss(Net<T>& net, const std::vector<const AzSample*>& batch, bool backprop) {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  std::vector<Position> positions;
  for (const AzSample* s : batch) positions.push_back(s->state.position());
  NetOutput<T> out = backprop ? net.forward_train(positions) : net.forward(positions);
  AzLoss loss;
  NetOutput<T> grad;
  grad.action.resize(batch.size());
  grad.value.resize(batch.size());
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const AzSample& s = *batch[i];
    require(s.pi.size() == out.action[i].size(), ErrorCode::kInvalidArgument,
            "pi does not match the number of actions");
    const std::vector<double> p = softmax(out.action[i]);
    const double v = out.value[i];
    loss.value += (s.z - v) * (s.z - v) * scale;
    double ce = 0.0;
    // log p computed from the logits keeps tiny probabilities finite.
    const double top = *std::max_element(out.action[i].begin(), out.action[i].end());
    double lse = 0.0;
    for (T x : out.action[i]) lse += std::exp(static_cast<double>(x) - top);
    lse = top + std::log(lse);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (s.pi[a] > 0.0) ce -= s.pi[a] * (static_cast<double>(out.action[i][a]) - lse);
    }
    loss.policy += ce * scale;
    grad.value[i] = static_cast<T>(2.0 * (v - s.z) * scale);
    grad.action[i].resize(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) {
      grad.action[i][a] = static_cast<T>((p[a] - s.pi[a]) * scale);
    }
  }
  loss.total = loss.value + loss.policy;
  if (backprop) net.backward(grad);
  return loss;
}

template AzLoss az_loss<float>(Net<float>&, const std::vector<const AzSample*>&, bool);
template AzLoss az_loss<double>(Net<double>&, const std::vector<const AzSample*>&, bool);

AzLoss train_epoch(Net<float>& net, Adam<float>& adam, const std::vector<AzSample>& dataset,
                   const TrainEpochOptions& options, std::mt19937_64& rng) {
  require(!dataset.empty(), ErrorCode::kInvalidArgument, "empty dataset");
  require(options.batch_size >= 1 && options.passes >= 1, ErrorCode::kInvalidArgument,
          "bad epoch options");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  AzLoss mean;
  int batches = 0;
  std::vector<const AzSample*> batch;
  for (int pass = 0; pass < options.passes; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      batch.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + options.batch_size); ++k) {
        batch.push_back(&dataset[order[k]]);
      }
      zero_grads(net.parameters());
      AzLoss l = az_loss(net, batch, true);
      adam.step(net.parameters());
      mean.total += l.total;
      mean.value += l.value;
      mean.policy += l.policy;
      ++batches;
    }
  }
  mean.total /= batches;
  mean.value /= batches;
  mean.policy /= batches;
  return mean;
}

GateResult gate_evaluate(const Net<float>& candidate, const Net<float>& best, int size,
                         const MctsConfig& mcts, int max_openings) {
  MctsConfig quiet = mcts;
  quiet.root_noise = false;
  // Non-owning views; both nets outlive the agents.
  MctsAgent cand(std::shared_ptr<const Net<float>>(&candidate, [](const Net<float>*) {}), quiet);
  MctsAgent incumbent(std::shared_ptr<const Net<float>>(&best, [](const Net<float>*) {}), quiet);
  std::vector<Cell> openings = unique_openings(size);
  if (max_openings > 0 && static_cast<int>(openings.size()) > max_openings) {
    openings.resize(max_openings);
  }
  std::mt19937_64 rng(0);
  GateResult r;
  for (Cell opening : openings) {
    for (Color cand_color : {Color::kRed, Color::kBlue}) {
      GameState s(size);
      s.play_cell(opening);
      while (!s.is_over()) {
        const Agent& mover = s.to_move() == cand_color ? static_cast<const Agent&>(cand) : incumbent;
        s.play(mover.decide(s, rng).action);
      }
      ++r.games;
      if (s.winner() == cand_color) ++r.candidate_wins;
    }
  }
  r.win_rate = static_cast<double>(r.candidate_wins) / r.games;
  r.replace = gate_replaces(r.win_rate);
  return r;
}

nlohmann::json AzConfig::to_json() const {
  nlohmann::json j = *this;
  return j;
}

AzConfig AzConfig::from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::kInvalidArgument, "azero config must be an object");
  const nlohmann::json known = AzConfig{}.to_json();
  for (const auto& [key, value] : j.items()) {
    require(known.contains(key), ErrorCode::kInvalidArgument,
            "unknown azero option '" + key + "'");
  }
  try {
    AzConfig c = j.get<AzConfig>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad azero config: ") + e.what());
  }
}

void AzConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kInvalidArgument, "azero config: " + what);
  };
  check(size >= HexBoard::kMinSize && size <= HexBoard::kMaxSize, "size out of range");
  check(simulations >= 2 && gate_simulations >= 2, "simulations must be at least 2");
  check(c_puct > 0.0, "c_puct must be positive");
  check(dirichlet_epsilon >= 0.0 && dirichlet_epsilon <= 1.0, "dirichlet_epsilon in [0, 1]");
  check(temperature_moves >= 0, "temperature_moves must be non-negative");
  check(games_per_epoch >= 1, "games_per_epoch must be positive");
  check(epochs >= 0, "epochs must be non-negative");
  check(batch_size >= 1 && train_passes >= 1, "batch_size and train_passes must be positive");
  check(lr > 0.0 && weight_decay >= 0.0, "bad optimizer settings");
  check(gate_threshold > 0.0 && gate_threshold < 1.0, "gate_threshold must be in (0, 1)");
}

MctsConfig AzConfig::mcts() const {
  return MctsConfig{simulations, c_puct, root_noise, dirichlet_alpha, dirichlet_epsilon};
}

std::string az_sample_to_json(const AzSample& sample) {
  nlohmann::json j = {{"graph", nlohmann::json::parse(graph_to_json(sample.state.graph()))},
                      {"pi", sample.pi},
                      {"z", sample.z}};
  return j.dump();
}

AzResult train_azero(const AzConfig& config, const Net<float>* init, const std::string& out_dir,
                     const std::function<void(const nlohmann::json&)>& on_log) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  AzResult result;
  if (init != nullptr) {
    result.initial = init->clone();
  } else {
    const nlohmann::json arch =
        config.arch.is_null() ? default_graph_arch(HeadMode::kPolicy) : config.arch;
    result.initial = make_net<float>(arch, config.seed);
  }
  result.best = result.initial->clone();
  std::unique_ptr<Net<float>> candidate = result.initial->clone();
  Adam<float> adam(AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay});

  std::ofstream lineage_file;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/config.json") << config.to_json().dump(2) << "\n";
    lineage_file.open(out_dir + "/lineage.jsonl");
    require(static_cast<bool>(lineage_file), ErrorCode::kIoError, "cannot write into " + out_dir);
    save_checkpoint(*result.best, out_dir + "/best_0.json",
                    {{"epoch", 0}, {"seed", config.seed}, {"trainer", "azero"}});
  }
  auto emit = [&](nlohmann::json line) {
    result.lineage.push_back(line);
    if (lineage_file) lineage_file << line.dump() << "\n" << std::flush;
    if (on_log) on_log(line);
  };
  emit({{"epoch", 0}, {"best_hash", content_hash(*result.best)}});

  SelfPlayOptions play{config.mcts(), config.temperature_moves, config.prune};
  MctsConfig gate_mcts = config.mcts();
  gate_mcts.simulations = config.gate_simulations;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<AzSample> dataset;
    std::ofstream shard;
    if (!out_dir.empty()) shard.open(out_dir + "/data_" + std::to_string(epoch) + ".jsonl");
    for (int g = 0; g < config.games_per_epoch; ++g) {
      AzGame game = self_play_game(*result.best, config.size, play, rng);
      for (AzSample& s : game.samples) {
        if (shard) shard << az_sample_to_json(s) << "\n";
        dataset.push_back(std::move(s));
      }
    }
    const AzLoss loss = train_epoch(*candidate, adam, dataset,
                                    {config.batch_size, config.train_passes}, rng);
    const GateResult gate = gate_evaluate(*candidate, *result.best, config.size, gate_mcts,
                                          config.gate_openings);
    const bool replace = gate_replaces(gate.win_rate, config.gate_threshold);
    if (replace) result.best->copy_from(*candidate);
    if (!out_dir.empty()) {
      save_checkpoint(*result.best, out_dir + "/best_" + std::to_string(epoch) + ".json",
                      {{"epoch", epoch}, {"seed", config.seed}, {"trainer", "azero"}});
    }
    emit({{"epoch", epoch},
          {"samples", dataset.size()},
          {"loss", loss.total},
          {"value_loss", loss.value},
          {"policy_loss", loss.policy},
          {"gate_games", gate.games},
          {"gate_win_rate", gate.win_rate},
          {"replaced", replace},
          {"best_hash", content_hash(*result.best)},
          {"candidate_hash", content_hash(*candidate)}});
  }
  return result;
}

}  // namespace hexgraph
