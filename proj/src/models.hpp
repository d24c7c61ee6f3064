#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hex_board.hpp"
#include "json.hpp"
#include "neural.hpp"
#include "shannon_graph.hpp"

namespace hexgraph {

// One network input. Actions are the playable nodes of `graph` in id order;
// each node's cell label locates it on `board`.
struct Position {
  const ShannonGraph* graph = nullptr;
  const HexBoard* board = nullptr;
};

// Per position: one output per action and a scalar value.
template <class T>
struct NetOutput {
  std::vector<std::vector<T>> action;
  std::vector<T> value;
};

enum class HeadMode { kDueling, kPolicy };

template <class T>
class Net {
 public:
  virtual ~Net() = default;

  virtual nlohmann::json arch() const = 0;
  virtual std::unique_ptr<Net> clone() const = 0;
  virtual std::vector<Param<T>*> parameters() = 0;

  // Read-only inference; safe to call concurrently.
  virtual NetOutput<T> forward(const std::vector<Position>& batch) const = 0;
  // Keeps activations for one following backward().
  virtual NetOutput<T> forward_train(const std::vector<Position>& batch) = 0;
  // Accumulates parameter gradients for d(loss)/d(outputs).
  virtual void backward(const NetOutput<T>& grad) = 0;

  std::size_t num_parameters();
  void copy_from(Net& other);
};

struct GraphNetConfig {
  int layers = 8;
  int width = 32;
  HeadMode head = HeadMode::kDueling;
  int value_hidden1 = 64;
  int value_hidden2 = 32;
  // Body layers after the first add their input back: h + relu(conv(h)).
  bool residual = false;
};

// Message-passing body shared by both roles; advantage/policy head and value
// MLP have one parameter set per role, picked by the side to move.
//   dueling: A = 2 tanh(a), Q = V + A - max A, action output = Q
//   policy:  action output = logits
template <class T>
class GraphNet final : public Net<T> {
 public:
  explicit GraphNet(const GraphNetConfig& config, std::uint64_t seed = 0);
  ~GraphNet() override;

  const GraphNetConfig& config() const { return config_; }
  nlohmann::json arch() const override;
  std::unique_ptr<Net<T>> clone() const override;
  std::vector<Param<T>*> parameters() override;
  NetOutput<T> forward(const std::vector<Position>& batch) const override;
  NetOutput<T> forward_train(const std::vector<Position>& batch) override;
  void backward(const NetOutput<T>& grad) override;

  // Dueling internals for one position, exposed for tests: per action A and
  // the scalar V.
  std::pair<std::vector<T>, T> advantage_and_value(const Position& p) const;

  struct Group;

 private:
  struct RoleHead {
    SageConv<T> conv;
    Dense<T> out;
    Dense<T> v1, v2, v3;
  };

  void run_group(Group& g, bool keep) const;
  void backward_group(Group& g, const NetOutput<T>& grad);

  GraphNetConfig config_;
  std::vector<SageConv<T>> body_;
  RoleHead heads_[2];
  std::vector<Group> cache_;
};

struct GaoNetConfig {
  int channels = 23;
  int blocks = 4;
  bool padding = true;
  // kDueling: action output is Q = 2 tanh(q). kPolicy: raw logits.
  HeadMode head = HeadMode::kDueling;
};

// Fully convolutional: input conv, residual tower, 1x1 Q head with 2 tanh over
// cells (or raw logits in policy mode), and a 1x1 value map averaged over the
// board then squashed by tanh.
template <class T>
class GaoNet final : public Net<T> {
 public:
  explicit GaoNet(const GaoNetConfig& config, std::uint64_t seed = 0);

  const GaoNetConfig& config() const { return config_; }
  nlohmann::json arch() const override;
  std::unique_ptr<Net<T>> clone() const override;
  std::vector<Param<T>*> parameters() override;
  NetOutput<T> forward(const std::vector<Position>& batch) const override;
  NetOutput<T> forward_train(const std::vector<Position>& batch) override;
  void backward(const NetOutput<T>& grad) override;

  // Q over every cell of each board (n x n, row-major), occupied cells
  // included. Used by translation tests.
  std::vector<std::vector<T>> q_map(const std::vector<Position>& batch) const;

  struct Cache;

 private:
  void run(const std::vector<Position>& batch, Cache& c, bool keep) const;

  GaoNetConfig config_;
  Conv2d<T> input_;
  std::vector<ResidualBlock<T>> blocks_;
  Conv2d<T> q_head_;
  Conv2d<T> v_head_;
  std::shared_ptr<Cache> cache_;
};

// Builds a network from its arch description.
template <class T>
std::unique_ptr<Net<T>> make_net(const nlohmann::json& arch, std::uint64_t seed);

// Parameter-matched desk defaults.
nlohmann::json default_graph_arch(HeadMode head = HeadMode::kDueling);
nlohmann::json default_gao_arch(HeadMode head = HeadMode::kDueling);

// ----------------------------------------------------------------- checkpoint

struct Checkpoint {
  std::unique_ptr<Net<float>> net;
  nlohmann::json meta;
};

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(std::string_view text);

// FNV-1a over parameter names and little-endian values.
std::string content_hash(Net<float>& net);

std::string checkpoint_to_string(Net<float>& net, const nlohmann::json& meta);
Checkpoint checkpoint_from_string(std::string_view text);
void save_checkpoint(Net<float>& net, const std::string& path, const nlohmann::json& meta);
// Throws kIoError for unreadable files and kFormatError for bad contents.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hexgraph
