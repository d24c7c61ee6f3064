#include "dqn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace hexgraph {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DqnConfig, size, seed, arch, gamma, lr,
                                                weight_decay, batch_size, buffer_capacity,
                                                epsilon_start, epsilon_end, epsilon_decay_steps,
                                                target_sync, alpha, beta_start, beta_end,
                                                total_steps, replay_ratio, learning_starts, prune,
                                                log_interval, checkpoint_interval, probe_games,
                                                time_limit_seconds)

// ------------------------------------------------------------------- targets

double q_target_value(const Transition& t, double gamma, double bootstrap_q) {
  const double immediate = t.r_t - t.r_t1;
  return t.done ? immediate : immediate + gamma * bootstrap_q;
}

std::vector<double> q_targets(const std::vector<const Transition*>& batch,
                              const Net<float>& online, const Net<float>& target, double gamma) {
  std::vector<Position> next;
  for (const Transition* t : batch) {
    if (!t->done) {
      require(t->s2.has_value(), ErrorCode::kInvalidState, "transition without successor");
      next.push_back(t->s2->position());
    }
  }
  NetOutput<float> qo, qt;
  if (!next.empty()) {
    qo = online.forward(next);
    qt = target.forward(next);
  }
  std::vector<double> out;
  out.reserve(batch.size());
  std::size_t k = 0;
  for (const Transition* t : batch) {
    double bootstrap = 0.0;
    if (!t->done) {
      std::vector<double> q(qo.action[k].begin(), qo.action[k].end());
      bootstrap = qt.action[k][argmax_index(q)];
      ++k;
    }
    out.push_back(q_target_value(*t, gamma, bootstrap));
  }
  return out;
}

double q_target(const Transition& t, const Net<float>& online, const Net<float>& target,
                double gamma) {
  return q_targets({&t}, online, target, gamma)[0];
}

// -------------------------------------------------------------------- buffer

PriorityBuffer::PriorityBuffer(std::size_t capacity, double alpha)
    : capacity_(capacity), alpha_(alpha) {
  require(capacity >= 1, ErrorCode::kInvalidArgument, "buffer capacity must be positive");
  require(alpha >= 0.0, ErrorCode::kInvalidArgument, "alpha must be non-negative");
  tree_size_ = 1;
  while (tree_size_ < capacity) tree_size_ *= 2;
  tree_.assign(2 * tree_size_, 0.0);
  min_tree_.assign(2 * tree_size_, std::numeric_limits<double>::infinity());
  raw_.assign(capacity, 0.0);
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void PriorityBuffer::set(std::size_t slot, double p_alpha) {
  std::size_t i = tree_size_ + slot;
  tree_[i] = p_alpha;
  min_tree_[i] = p_alpha;
  for (i /= 2; i >= 1; i /= 2) {
    tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
    min_tree_[i] = std::min(min_tree_[2 * i], min_tree_[2 * i + 1]);
  }
}

void PriorityBuffer::push(Transition t) {
  const std::size_t slot = next_;
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[slot] = std::move(t);
  }
  raw_[slot] = max_priority_;
  set(slot, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

double PriorityBuffer::probability(std::size_t slot) const {
  require(slot < size_, ErrorCode::kInvalidArgument, "slot out of range");
  return tree_[tree_size_ + slot] / tree_[1];
}

void PriorityBuffer::update(std::size_t slot, double priority) {
  require(slot < size_, ErrorCode::kInvalidArgument, "slot out of range");
  require(priority > 0.0 && std::isfinite(priority), ErrorCode::kInvalidArgument,
          "priority must be positive");
  raw_[slot] = priority;
  max_priority_ = std::max(max_priority_, priority);
  set(slot, std::pow(priority, alpha_));
}

PriorityBuffer::Sample PriorityBuffer::sample(std::size_t k, double beta,
                                              std::mt19937_64& rng) const {
  require(k >= 1 && size_ >= k, ErrorCode::kInvalidState,
          "buffer holds " + std::to_string(size_) + " entries, " + std::to_string(k) + " requested");
  Sample out;
  const double total = tree_[1];
  const double segment = total / static_cast<double>(k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double n = static_cast<double>(size_);
  const double max_w = std::pow(n * min_tree_[1] / total, -beta);
  for (std::size_t j = 0; j < k; ++j) {
    double x = segment * (static_cast<double>(j) + u(rng));
    std::size_t i = 1;
    while (i < tree_size_) {
      if (x < tree_[2 * i] || tree_[2 * i + 1] <= 0.0) {
        i = 2 * i;
      } else {
        x -= tree_[2 * i];
        i = 2 * i + 1;
      }
    }
    std::size_t slot = std::min(i - tree_size_, size_ - 1);
    out.slots.push_back(slot);
    const double p = tree_[tree_size_ + slot] / total;
    out.weights.push_back(std::pow(n * p, -beta) / max_w);
  }
  return out;
}

// ----------------------------------------------------------------- self-play

EpisodeResult self_play_episode(const Net<float>& net, double epsilon, std::mt19937_64& rng,
                                int size, bool prune, std::optional<Cell> opening) {
  std::vector<GameState> states;
  std::vector<int> actions;
  states.emplace_back(size, prune);
  EpisodeResult result;
  result.record.size = size;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (opening) {
    const int a = states.back().action_of(*opening);
    require(a >= 0, ErrorCode::kIllegalMove, "opening is not a legal move");
    result.record.moves.push_back(*opening);
    states.push_back(states.back().after(a));
  }
  const std::size_t first = states.size() - 1;
  while (!states.back().is_over()) {
    const GameState& s = states.back();
    int a;
    if (coin(rng) < epsilon) {
      a = std::uniform_int_distribution<int>(0, s.num_actions() - 1)(rng);
    } else {
      NetOutput<float> out = net.forward({s.position()});
      std::vector<double> q(out.action[0].begin(), out.action[0].end());
      a = argmax_index(q);
    }
    actions.push_back(a);
    result.record.moves.push_back(s.action_cell(a));
    states.push_back(s.after(a));
  }
  result.record.winner = states.back().winner();

  const std::size_t moves = actions.size();
  // With pruning a move can decide the game against its own player, in which
  // case the final reward is -1.
  const double final_reward =
      moves > 0 && states[first + moves - 1].to_move() == *result.record.winner ? 1.0 : -1.0;
  for (std::size_t t = 0; t < moves; ++t) {
    Transition tr{states[first + t], actions[t], 0.0, 0.0, std::nullopt, false};
    tr.r_t = t + 1 == moves ? final_reward : 0.0;
    tr.r_t1 = t + 2 == moves ? final_reward : 0.0;
    tr.done = t + 2 >= moves;
    if (!tr.done) tr.s2 = states[first + t + 2];
    result.transitions.push_back(std::move(tr));
  }
  return result;
}

double winrate_vs_random(const Agent& agent, int size, int games, std::uint64_t seed,
                         bool prune) {
  require(games >= 1, ErrorCode::kInvalidArgument, "need at least one game");
  const std::vector<Cell> openings = unique_openings(size);
  RandomAgent random;
  std::mt19937_64 rng(seed);
  int wins = 0;
  for (int g = 0; g < games; ++g) {
    const Cell opening = openings[(g / 2) % openings.size()];
    const Color agent_color = g % 2 == 0 ? Color::kRed : Color::kBlue;
    GameState s(size, prune);
    s.play_cell(opening);
    while (!s.is_over()) {
      const Agent& mover = s.to_move() == agent_color ? agent : static_cast<const Agent&>(random);
      s.play(mover.decide(s, rng).action);
    }
    if (s.winner() == agent_color) ++wins;
  }
  return static_cast<double>(wins) / games;
}

// ------------------------------------------------------------------ training

nlohmann::json DqnConfig::to_json() const {
  nlohmann::json j = *this;
  return j;
}

DqnConfig DqnConfig::from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::kInvalidArgument, "dqn config must be an object");
  const nlohmann::json known = DqnConfig{}.to_json();
  for (const auto& [key, value] : j.items()) {
    require(known.contains(key), ErrorCode::kInvalidArgument, "unknown dqn option '" + key + "'");
  }
  try {
    DqnConfig c = j.get<DqnConfig>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad dqn config: ") + e.what());
  }
}

void DqnConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kInvalidArgument, "dqn config: " + what);
  };
  check(size >= HexBoard::kMinSize && size <= HexBoard::kMaxSize, "size out of range");
  check(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
  check(lr > 0.0, "lr must be positive");
  check(weight_decay >= 0.0, "weight_decay must be non-negative");
  check(batch_size >= 1, "batch_size must be positive");
  check(buffer_capacity >= batch_size, "buffer_capacity must hold a batch");
  check(epsilon_start >= 0 && epsilon_start <= 1 && epsilon_end >= 0 && epsilon_end <= 1,
        "epsilon must be in [0, 1]");
  check(epsilon_decay_steps >= 0, "epsilon_decay_steps must be non-negative");
  check(target_sync >= 1, "target_sync must be positive");
  check(alpha >= 0.0, "alpha must be non-negative");
  check(beta_start >= 0.0 && beta_end >= 0.0, "beta must be non-negative");
  check(total_steps >= 0, "total_steps must be non-negative");
  check(replay_ratio > 0.0, "replay_ratio must be positive");
  check(learning_starts >= 0, "learning_starts must be non-negative");
  check(log_interval >= 1, "log_interval must be positive");
  check(checkpoint_interval >= 0, "checkpoint_interval must be non-negative");
  check(probe_games >= 0, "probe_games must be non-negative");
}

namespace {

double huber_grad(double delta) { return std::clamp(delta, -1.0, 1.0); }

double huber(double delta) {
  const double a = std::abs(delta);
  return a <= 1.0 ? 0.5 * delta * delta : a - 0.5;
}

double linear(double from, double to, double fraction) {
  return from + (to - from) * std::clamp(fraction, 0.0, 1.0);
}

}  // namespace

DqnResult train_dqn(const DqnConfig& config, const std::string& out_dir,
                    const std::function<void(const nlohmann::json&)>& on_log) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const nlohmann::json arch = config.arch.is_null() ? default_graph_arch() : config.arch;
  std::mt19937_64 rng(config.seed);
  DqnResult result;
  result.net = make_net<float>(arch, config.seed);
  result.initial = result.net->clone();
  std::unique_ptr<Net<float>> target = result.net->clone();
  Adam<float> adam(AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay});
  PriorityBuffer buffer(config.buffer_capacity, config.alpha);

  std::ofstream metrics_file, games_file;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/config.json") << config.to_json().dump(2) << "\n";
    metrics_file.open(out_dir + "/metrics.jsonl");
    games_file.open(out_dir + "/games.jsonl");
    require(metrics_file && games_file, ErrorCode::kIoError, "cannot write into " + out_dir);
  }
  auto checkpoint = [&](const std::string& name) {
    if (out_dir.empty()) return;
    save_checkpoint(*result.net, out_dir + "/" + name,
                    {{"steps", result.steps}, {"episodes", result.episodes},
                     {"seed", config.seed}, {"trainer", "dqn"}, {"size", config.size}});
  };
  checkpoint("ckpt_0.json");

  const int probe_games =
      config.probe_games > 0 ? config.probe_games
                             : 2 * static_cast<int>(unique_openings(config.size).size());
  double loss_sum = 0.0;
  int loss_count = 0;
  double pending = 0.0;
  double epsilon = config.epsilon_start;
  auto out_of_time = [&] {
    if (config.time_limit_seconds <= 0.0) return false;
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - started;
    return d.count() >= config.time_limit_seconds;
  };

  auto log_line = [&] {
    GreedyAgent probe(std::shared_ptr<const Net<float>>(result.net->clone()));
    nlohmann::json line = {
        {"step", result.steps},
        {"loss", loss_count > 0 ? loss_sum / loss_count : 0.0},
        {"epsilon", epsilon},
        {"winrate_vs_random",
         winrate_vs_random(probe, config.size, probe_games, config.seed + result.steps,
                           config.prune)},
        {"buffer_size", buffer.size()},
        {"episodes", result.episodes}};
    loss_sum = 0.0;
    loss_count = 0;
    result.metrics.push_back(line);
    if (metrics_file) metrics_file << line.dump() << "\n" << std::flush;
    if (on_log) on_log(line);
  };

  std::vector<const Transition*> batch;
  std::vector<Position> positions;
  while (result.steps < config.total_steps && !out_of_time()) {
    epsilon = linear(config.epsilon_start, config.epsilon_end,
                     config.epsilon_decay_steps == 0
                         ? 1.0
                         : static_cast<double>(result.steps) / config.epsilon_decay_steps);
    EpisodeResult episode = self_play_episode(*result.net, epsilon, rng, config.size, config.prune);
    ++result.episodes;
    if (games_file) games_file << game_record_to_json(episode.record) << "\n";
    for (Transition& t : episode.transitions) buffer.push(std::move(t));
    pending += config.replay_ratio * static_cast<double>(episode.transitions.size());
    const std::size_t needed =
        std::max<std::size_t>(config.batch_size, static_cast<std::size_t>(config.learning_starts));
    if (buffer.size() < needed) {
      pending = 0.0;
      continue;
    }
    while (pending >= 1.0 && result.steps < config.total_steps) {
      pending -= 1.0;
      const double beta =
          linear(config.beta_start, config.beta_end,
                 static_cast<double>(result.steps) / std::max(1, config.total_steps));
      PriorityBuffer::Sample sample = buffer.sample(config.batch_size, beta, rng);
      batch.clear();
      positions.clear();
      for (std::size_t slot : sample.slots) {
        batch.push_back(&buffer.at(slot));
        positions.push_back(buffer.at(slot).s.position());
      }
      const std::vector<double> y = q_targets(batch, *result.net, *target, config.gamma);
      NetOutput<float> out = result.net->forward_train(positions);
      NetOutput<float> grad;
      grad.action.resize(batch.size());
      grad.value.assign(batch.size(), 0.0f);
      double loss = 0.0;
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const int a = batch[i]->action;
        const double delta = out.action[i][a] - y[i];
        loss += sample.weights[i] * huber(delta) * scale;
        grad.action[i].assign(out.action[i].size(), 0.0f);
        grad.action[i][a] = static_cast<float>(sample.weights[i] * huber_grad(delta) * scale);
        buffer.update(sample.slots[i], std::abs(delta) + 1e-3);
      }
      result.net->backward(grad);
      adam.step(result.net->parameters());
      ++result.steps;
      loss_sum += loss;
      ++loss_count;
      if (result.steps % config.target_sync == 0) target->copy_from(*result.net);
      if (result.steps % config.log_interval == 0) log_line();
      if (config.checkpoint_interval > 0 && result.steps % config.checkpoint_interval == 0) {
        checkpoint("ckpt_" + std::to_string(result.steps) + ".json");
      }
    }
  }
  if (result.metrics.empty() || result.metrics.back()["step"] != result.steps) log_line();
  if (result.steps > 0) checkpoint("final.json");
  return result;
}

}  // namespace hexgraph
