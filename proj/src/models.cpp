#include "models.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hexgraph {

// Node type one-hot: t1, t2, playable.
constexpr int kNodeFeatures = 3;

namespace {

int role_index(Role r) { return r == Role::kShort ? 0 : 1; }

}  // namespace

template <class T>
std::size_t Net<T>::num_parameters() {
  std::size_t n = 0;
  for (auto* p : parameters()) n += static_cast<std::size_t>(p->value.size());
  return n;
}

template <class T>
void Net<T>::copy_from(Net& other) {
  auto dst = parameters();
  auto src = other.parameters();
  require(dst.size() == src.size(), ErrorCode::kInvalidArgument, "copy_from: architecture mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    require(dst[i]->value.rows() == src[i]->value.rows() &&
                dst[i]->value.cols() == src[i]->value.cols(),
            ErrorCode::kInvalidArgument, "copy_from: shape mismatch for " + dst[i]->name);
    dst[i]->value = src[i]->value;
  }
}

// ------------------------------------------------------------------- GraphNet

template <class T>
struct GraphNet<T>::Group {
  Role role = Role::kShort;
  std::vector<int> members;
  Csr csr;
  std::vector<int> offsets{0};
  std::vector<std::vector<int>> playable;  // global node rows per member
  Mat<T> x;
  std::vector<typename SageConv<T>::Cache> body;
  std::vector<Mat<T>> body_act;  // relu outputs, one per body layer
  Mat<T> h;
  typename SageConv<T>::Cache head_conv;
  Mat<T> head_hidden;
  typename Dense<T>::Cache head_out;
  Mat<T> a;
  typename Readout<T>::Cache readout;
  typename Dense<T>::Cache c1, c2, c3;
  Mat<T> z1, z2;
  Mat<T> v;
  std::vector<int> argmax;
  std::vector<std::vector<T>> adv;
};

template <class T>
GraphNet<T>::~GraphNet() = default;

template <class T>
GraphNet<T>::GraphNet(const GraphNetConfig& config, std::uint64_t seed) : config_(config) {
  require(config.layers >= 1 && config.width >= 1, ErrorCode::kInvalidArgument,
          "graph net needs at least one layer");
  std::mt19937_64 rng(seed);
  for (int l = 0; l < config.layers; ++l) {
    body_.emplace_back("body." + std::to_string(l), l == 0 ? kNodeFeatures : config.width,
                       config.width);
    // Smaller residual branches keep the summed activations near unit scale.
    const bool branch = config.residual && l > 0;
    body_.back().init(rng, branch ? 1.0 / std::sqrt(static_cast<double>(config.layers)) : 1.0);
  }
  const int f = config.width;
  for (Role r : {Role::kShort, Role::kCut}) {
    RoleHead& h = heads_[role_index(r)];
    const std::string tag = role_name(r);
    h.conv = SageConv<T>("head." + tag + ".conv", f, f);
    h.out = Dense<T>("head." + tag + ".out", f, 1);
    h.v1 = Dense<T>("value." + tag + ".l1", 4 * f, config.value_hidden1);
    h.v2 = Dense<T>("value." + tag + ".l2", config.value_hidden1, config.value_hidden2);
    h.v3 = Dense<T>("value." + tag + ".l3", config.value_hidden2, 1);
    h.conv.init(rng);
    h.out.init(rng, 0.1);
    h.v1.init(rng);
    h.v2.init(rng);
    h.v3.init(rng, 0.1);
  }
}

template <class T>
nlohmann::json GraphNet<T>::arch() const {
  return {{"type", "graphnet"},
          {"layers", config_.layers},
          {"width", config_.width},
          {"head", config_.head == HeadMode::kDueling ? "dueling" : "policy"},
          {"value_hidden", {config_.value_hidden1, config_.value_hidden2}},
          {"residual", config_.residual}};
}

template <class T>
std::unique_ptr<Net<T>> GraphNet<T>::clone() const {
  auto copy = std::make_unique<GraphNet<T>>(*this);
  copy->cache_.clear();
  return copy;
}

template <class T>
std::vector<Param<T>*> GraphNet<T>::parameters() {
  std::vector<Param<T>*> out;
  auto add = [&](std::vector<Param<T>*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  for (auto& layer : body_) add(layer.parameters());
  for (auto& h : heads_) {
    add(h.conv.parameters());
    add(h.out.parameters());
    add(h.v1.parameters());
    add(h.v2.parameters());
    add(h.v3.parameters());
  }
  return out;
}

namespace {

template <class T, class Group>
std::vector<Group> make_groups(const std::vector<Position>& batch) {
  std::vector<Group> groups(2);
  groups[0].role = Role::kShort;
  groups[1].role = Role::kCut;
  std::vector<std::pair<int, int>> edges[2];
  for (int i = 0; i < static_cast<int>(batch.size()); ++i) {
    const ShannonGraph& g = *batch[i].graph;
    require(g.num_playable() >= 1, ErrorCode::kInvalidState, "graph has no playable node");
    Group& grp = groups[role_index(g.to_move())];
    auto& e = edges[role_index(g.to_move())];
    const int base = grp.offsets.back();
    grp.members.push_back(i);
    std::vector<int> rows;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.is_terminal(v)) rows.push_back(base + v);
      for (NodeId u : g.neighbors(v)) e.emplace_back(base + v, base + u);
    }
    grp.playable.push_back(std::move(rows));
    grp.offsets.push_back(base + g.num_nodes());
  }
  for (int r = 0; r < 2; ++r) {
    Group& grp = groups[r];
    const int n = grp.offsets.back();
    grp.csr = Csr::from_edges(n, edges[r]);
    grp.x = Mat<T>::Zero(n, kNodeFeatures);
    grp.x.col(2).setOnes();
    for (std::size_t m = 0; m < grp.members.size(); ++m) {
      const ShannonGraph& g = *batch[grp.members[m]].graph;
      grp.x.row(grp.offsets[m] + g.t1()) << T(1), T(0), T(0);
      grp.x.row(grp.offsets[m] + g.t2()) << T(0), T(1), T(0);
    }
  }
  return groups;
}

}  // namespace

template <class T>
void GraphNet<T>::run_group(Group& g, bool keep) const {
  if (g.members.empty()) return;
  const RoleHead& head = heads_[role_index(g.role)];
  if (keep) {
    g.body.resize(body_.size());
    g.body_act.resize(body_.size());
  }
  Mat<T> h = g.x;
  for (std::size_t l = 0; l < body_.size(); ++l) {
    Mat<T> act = relu(body_[l].forward(g.csr, h, keep ? &g.body[l] : nullptr));
    if (config_.residual && l > 0) {
      h += act;
    } else {
      h = act;
    }
    if (keep) g.body_act[l] = std::move(act);
  }
  Mat<T> hidden = relu(head.conv.forward(g.csr, h, keep ? &g.head_conv : nullptr));
  g.a = head.out.forward(hidden, keep ? &g.head_out : nullptr);
  Mat<T> r = Readout<T>::forward(h, g.offsets, keep ? &g.readout : nullptr);
  Mat<T> z1 = relu(head.v1.forward(r, keep ? &g.c1 : nullptr));
  Mat<T> z2 = relu(head.v2.forward(z1, keep ? &g.c2 : nullptr));
  g.v = head.v3.forward(z2, keep ? &g.c3 : nullptr).array().tanh().matrix();
  require_finite(g.a, "graph net head");
  require_finite(g.v, "graph net value");
  if (keep) {
    g.h = std::move(h);
    g.head_hidden = std::move(hidden);
    g.z1 = std::move(z1);
    g.z2 = std::move(z2);
  }
  g.argmax.assign(g.members.size(), 0);
  g.adv.assign(g.members.size(), {});
  if (config_.head == HeadMode::kDueling) {
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      auto& adv = g.adv[m];
      for (int row : g.playable[m]) adv.push_back(T(2) * std::tanh(g.a(row, 0)));
      g.argmax[m] = static_cast<int>(std::max_element(adv.begin(), adv.end()) - adv.begin());
    }
  }
}

namespace {

template <class T, class Group>
void scatter_outputs(const Group& g, HeadMode mode, NetOutput<T>& out) {
  for (std::size_t m = 0; m < g.members.size(); ++m) {
    const int i = g.members[m];
    const T v = g.v(static_cast<Eigen::Index>(m), 0);
    out.value[i] = v;
    auto& act = out.action[i];
    act.clear();
    if (mode == HeadMode::kDueling) {
      const auto& adv = g.adv[m];
      const T amax = adv[g.argmax[m]];
      // a - amax <= 0 exactly, so max Q == V holds bit for bit.
      for (T a : adv) act.push_back(v + (a - amax));
    } else {
      for (int row : g.playable[m]) act.push_back(g.a(row, 0));
    }
  }
}

}  // namespace

template <class T>
NetOutput<T> GraphNet<T>::forward(const std::vector<Position>& batch) const {
  auto groups = make_groups<T, Group>(batch);
  NetOutput<T> out;
  out.action.resize(batch.size());
  out.value.resize(batch.size());
  for (auto& g : groups) {
    run_group(g, false);
    scatter_outputs(g, config_.head, out);
  }
  return out;
}

template <class T>
NetOutput<T> GraphNet<T>::forward_train(const std::vector<Position>& batch) {
  cache_ = make_groups<T, Group>(batch);
  NetOutput<T> out;
  out.action.resize(batch.size());
  out.value.resize(batch.size());
  for (auto& g : cache_) {
    run_group(g, true);
    scatter_outputs(g, config_.head, out);
  }
  return out;
}

template <class T>
void GraphNet<T>::backward_group(Group& g, const NetOutput<T>& grad) {
  if (g.members.empty()) return;
  RoleHead& head = heads_[role_index(g.role)];
  const Eigen::Index n = g.csr.num_nodes;
  const Eigen::Index b = static_cast<Eigen::Index>(g.members.size());
  Mat<T> da = Mat<T>::Zero(n, 1);
  Mat<T> dv = Mat<T>::Zero(b, 1);
  for (Eigen::Index m = 0; m < b; ++m) {
    const int i = g.members[m];
    T dvalue = grad.value.empty() ? T(0) : grad.value[i];
    const auto& dact = grad.action.empty() ? std::vector<T>{} : grad.action[i];
    const auto& rows = g.playable[m];
    if (!dact.empty()) {
      require(dact.size() == rows.size(), ErrorCode::kInvalidArgument,
              "graph net: action gradient size mismatch");
      if (config_.head == HeadMode::kDueling) {
        T total = T(0);
        for (T d : dact) total += d;
        dvalue += total;
        for (std::size_t k = 0; k < rows.size(); ++k) {
          T d_adv = dact[k] - (static_cast<int>(k) == g.argmax[m] ? total : T(0));
          const T t = g.adv[m][k] / T(2);
          da(rows[k], 0) = d_adv * T(2) * (T(1) - t * t);
        }
      } else {
        for (std::size_t k = 0; k < rows.size(); ++k) da(rows[k], 0) = dact[k];
      }
    }
    const T v = g.v(m, 0);
    dv(m, 0) = dvalue * (T(1) - v * v);
  }
  Mat<T> dz2 = relu_backward<T>(head.v3.backward(dv, g.c3), g.z2);
  Mat<T> dz1 = relu_backward<T>(head.v2.backward(dz2, g.c2), g.z1);
  Mat<T> dr = head.v1.backward(dz1, g.c1);
  Mat<T> dh = Readout<T>::backward(dr, g.readout, static_cast<int>(n));
  Mat<T> dhidden = relu_backward<T>(head.out.backward(da, g.head_out), g.head_hidden);
  dh += head.conv.backward(g.csr, dhidden, g.head_conv);
  for (int l = static_cast<int>(body_.size()) - 1; l >= 0; --l) {
    Mat<T> din = body_[l].backward(g.csr, relu_backward<T>(dh, g.body_act[l]), g.body[l]);
    if (config_.residual && l > 0) {
      dh += din;
    } else {
      dh = std::move(din);
    }
  }
}

template <class T>
void GraphNet<T>::backward(const NetOutput<T>& grad) {
  require(!cache_.empty(), ErrorCode::kInvalidState, "backward without forward_train");
  for (auto& g : cache_) backward_group(g, grad);
  cache_.clear();
}

template <class T>
std::pair<std::vector<T>, T> GraphNet<T>::advantage_and_value(const Position& p) const {
  auto groups = make_groups<T, Group>({p});
  for (auto& g : groups) {
    if (g.members.empty()) continue;
    run_group(g, false);
    std::vector<T> adv;
    for (int row : g.playable[0]) adv.push_back(T(2) * std::tanh(g.a(row, 0)));
    return {adv, g.v(0, 0)};
  }
  fail(ErrorCode::kInvalidState, "empty batch");
}

// --------------------------------------------------------------------- GaoNet

template <class T>
struct GaoNet<T>::Cache {
  ImageShape shape;
  int n = 0;
  int pad = 0;
  std::vector<std::vector<int>> pixels;  // legal action pixels per member
  typename Conv2d<T>::Cache input;
  Mat<T> first;
  std::vector<typename ResidualBlock<T>::Cache> blocks;
  Mat<T> tower;
  Mat<T> feat;
  typename Conv2d<T>::Cache q, v;
  Mat<T> q_out;  // tanh(q) in dueling mode, raw logits otherwise
  std::vector<T> values;
};

template <class T>
GaoNet<T>::GaoNet(const GaoNetConfig& config, std::uint64_t seed)
    : config_(config),
      input_("input", InputPlanes::kChannels, config.channels, 3),
      q_head_("q_head", config.channels, 1, 1),
      v_head_("v_head", config.channels, 1, 1) {
  require(config.channels >= 1 && config.blocks >= 0, ErrorCode::kInvalidArgument,
          "bad conv net config");
  std::mt19937_64 rng(seed);
  input_.init(rng);
  for (int b = 0; b < config.blocks; ++b) {
    blocks_.emplace_back("block." + std::to_string(b), config.channels);
    blocks_.back().init(rng);
  }
  q_head_.init(rng, 0.1);
  v_head_.init(rng, 0.1);
}

template <class T>
nlohmann::json GaoNet<T>::arch() const {
  return {{"type", "gao"},
          {"channels", config_.channels},
          {"blocks", config_.blocks},
          {"padding", config_.padding},
          {"head", config_.head == HeadMode::kDueling ? "dueling" : "policy"}};
}

template <class T>
std::unique_ptr<Net<T>> GaoNet<T>::clone() const {
  auto copy = std::make_unique<GaoNet<T>>(*this);
  copy->cache_.reset();
  return copy;
}

template <class T>
std::vector<Param<T>*> GaoNet<T>::parameters() {
  std::vector<Param<T>*> out;
  auto add = [&](std::vector<Param<T>*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  add(input_.parameters());
  for (auto& b : blocks_) add(b.parameters());
  add(q_head_.parameters());
  add(v_head_.parameters());
  return out;
}

template <class T>
void GaoNet<T>::run(const std::vector<Position>& batch, Cache& c, bool keep) const {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  c.n = batch[0].board->size();
  c.pad = config_.padding ? 1 : 0;
  const int side = c.n + 2 * c.pad;
  c.shape = {static_cast<int>(batch.size()), side, side};
  const int plane = side * side;
  Mat<T> x(InputPlanes::kChannels, c.shape.pixels());
  c.pixels.assign(batch.size(), {});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const HexBoard& board = *batch[i].board;
    require(board.size() == c.n, ErrorCode::kInvalidArgument, "conv batch mixes board sizes");
    const InputPlanes planes = encode_planes(board, config_.padding);
    for (int ch = 0; ch < InputPlanes::kChannels; ++ch) {
      for (int p = 0; p < plane; ++p) {
        x(ch, static_cast<Eigen::Index>(i) * plane + p) = static_cast<T>(planes.data[ch * plane + p]);
      }
    }
    const ShannonGraph& g = *batch[i].graph;
    require(g.num_playable() >= 1, ErrorCode::kInvalidState, "position has no legal move");
    for (NodeId v : g.playable_nodes()) {
      const Cell cell = g.label(v).cell;
      c.pixels[i].push_back(static_cast<int>(i) * plane + (cell.row + c.pad) * side + cell.col + c.pad);
    }
  }
  Mat<T> h = relu(input_.forward(x, c.shape, keep ? &c.input : nullptr));
  if (keep) {
    c.first = h;
    c.blocks.resize(blocks_.size());
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    h = blocks_[b].forward(h, c.shape, keep ? &c.blocks[b] : nullptr);
  }
  Mat<T> feat = relu(h);
  c.q_out = q_head_.forward(feat, c.shape, keep ? &c.q : nullptr);
  if (config_.head == HeadMode::kDueling) c.q_out = c.q_out.array().tanh().matrix();
  Mat<T> vmap = v_head_.forward(feat, c.shape, keep ? &c.v : nullptr);
  require_finite(c.q_out, "conv net q head");
  require_finite(vmap, "conv net value head");
  c.values.assign(batch.size(), T(0));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double sum = 0.0;
    for (int r = 0; r < c.n; ++r) {
      for (int col = 0; col < c.n; ++col) {
        sum += vmap(0, static_cast<Eigen::Index>(i) * plane + (r + c.pad) * side + col + c.pad);
      }
    }
    c.values[i] = static_cast<T>(std::tanh(sum / (c.n * c.n)));
  }
  if (keep) {
    c.tower = std::move(h);
    c.feat = std::move(feat);
  }
}

namespace {

template <class T, class Cache>
NetOutput<T> gao_outputs(const Cache& c, HeadMode mode) {
  const T scale = mode == HeadMode::kDueling ? T(2) : T(1);
  NetOutput<T> out;
  out.value = c.values;
  out.action.resize(c.pixels.size());
  for (std::size_t i = 0; i < c.pixels.size(); ++i) {
    for (int p : c.pixels[i]) out.action[i].push_back(scale * c.q_out(0, p));
  }
  return out;
}

}  // namespace

template <class T>
NetOutput<T> GaoNet<T>::forward(const std::vector<Position>& batch) const {
  Cache c;
  run(batch, c, false);
  return gao_outputs<T>(c, config_.head);
}

template <class T>
NetOutput<T> GaoNet<T>::forward_train(const std::vector<Position>& batch) {
  cache_ = std::make_shared<Cache>();
  run(batch, *cache_, true);
  return gao_outputs<T>(*cache_, config_.head);
}

template <class T>
void GaoNet<T>::backward(const NetOutput<T>& grad) {
  require(cache_ != nullptr, ErrorCode::kInvalidState, "backward without forward_train");
  Cache& c = *cache_;
  const int side = c.shape.height;
  const int plane = side * side;
  Mat<T> dq = Mat<T>::Zero(1, c.shape.pixels());
  Mat<T> dv = Mat<T>::Zero(1, c.shape.pixels());
  for (std::size_t i = 0; i < c.pixels.size(); ++i) {
    if (!grad.action.empty() && !grad.action[i].empty()) {
      require(grad.action[i].size() == c.pixels[i].size(), ErrorCode::kInvalidArgument,
              "conv net: action gradient size mismatch");
      for (std::size_t k = 0; k < c.pixels[i].size(); ++k) {
        const int p = c.pixels[i][k];
        if (config_.head == HeadMode::kDueling) {
          const T t = c.q_out(0, p);
          dq(0, p) = grad.action[i][k] * T(2) * (T(1) - t * t);
        } else {
          dq(0, p) = grad.action[i][k];
        }
      }
    }
    if (!grad.value.empty()) {
      const T v = c.values[i];
      const T d = grad.value[i] * (T(1) - v * v) / T(c.n * c.n);
      for (int r = 0; r < c.n; ++r) {
        for (int col = 0; col < c.n; ++col) {
          dv(0, static_cast<Eigen::Index>(i) * plane + (r + c.pad) * side + col + c.pad) = d;
        }
      }
    }
  }
  Mat<T> dfeat = q_head_.backward(dq, c.shape, c.q);
  dfeat += v_head_.backward(dv, c.shape, c.v);
  Mat<T> dh = relu_backward<T>(dfeat, c.tower);
  for (int b = static_cast<int>(blocks_.size()) - 1; b >= 0; --b) {
    dh = blocks_[b].backward(dh, c.shape, c.blocks[b]);
  }
  input_.backward(relu_backward<T>(dh, c.first), c.shape, c.input);
  cache_.reset();
}

template <class T>
std::vector<std::vector<T>> GaoNet<T>::q_map(const std::vector<Position>& batch) const {
  Cache c;
  run(batch, c, false);
  const int side = c.shape.height;
  const T scale = config_.head == HeadMode::kDueling ? T(2) : T(1);
  std::vector<std::vector<T>> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (int r = 0; r < c.n; ++r) {
      for (int col = 0; col < c.n; ++col) {
        out[i].push_back(scale * c.q_out(0, static_cast<Eigen::Index>(i) * side * side +
                                                (r + c.pad) * side + col + c.pad));
      }
    }
  }
  return out;
}

// -------------------------------------------------------------------- factory

template <class T>
std::unique_ptr<Net<T>> make_net(const nlohmann::json& arch, std::uint64_t seed) {
  try {
    const std::string type = arch.at("type").get<std::string>();
    if (type == "graphnet") {
      GraphNetConfig c;
      c.layers = arch.value("layers", c.layers);
      c.width = arch.value("width", c.width);
      const std::string head = arch.value("head", std::string("dueling"));
      require(head == "dueling" || head == "policy", ErrorCode::kInvalidArgument,
              "unknown head '" + head + "'");
      c.head = head == "dueling" ? HeadMode::kDueling : HeadMode::kPolicy;
      if (arch.contains("value_hidden")) {
        c.value_hidden1 = arch["value_hidden"].at(0).get<int>();
        c.value_hidden2 = arch["value_hidden"].at(1).get<int>();
      }
      c.residual = arch.value("residual", c.residual);
      return std::make_unique<GraphNet<T>>(c, seed);
    }
    if (type == "gao") {
      GaoNetConfig c;
      c.channels = arch.value("channels", c.channels);
      c.blocks = arch.value("blocks", c.blocks);
      c.padding = arch.value("padding", c.padding);
      const std::string head = arch.value("head", std::string("dueling"));
      require(head == "dueling" || head == "policy", ErrorCode::kInvalidArgument,
              "unknown head '" + head + "'");
      c.head = head == "dueling" ? HeadMode::kDueling : HeadMode::kPolicy;
      return std::make_unique<GaoNet<T>>(c, seed);
    }
    fail(ErrorCode::kInvalidArgument, "unknown architecture '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad arch: ") + e.what());
  }
}

nlohmann::json default_graph_arch(HeadMode head) {
  return GraphNet<float>(GraphNetConfig{8, 32, head, 64, 32}).arch();
}

nlohmann::json default_gao_arch(HeadMode head) {
  GaoNetConfig c;
  c.head = head;
  return GaoNet<float>(c).arch();
}

template class Net<float>;
template class Net<double>;
template class GraphNet<float>;
template class GraphNet<double>;
template class GaoNet<float>;
template class GaoNet<double>;
template std::unique_ptr<Net<float>> make_net<float>(const nlohmann::json&, std::uint64_t);
template std::unique_ptr<Net<double>> make_net<double>(const nlohmann::json&, std::uint64_t);

// ----------------------------------------------------------------- checkpoint

namespace {

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::vector<unsigned char> float_bytes(const Mat<float>& m) {
  std::vector<unsigned char> out(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(m.data()[k]);
    for (int b = 0; b < 4; ++b) out[k * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return out;
}

}  // namespace

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = bytes[i] << 16;
    if (i + 1 < bytes.size()) chunk |= bytes[i + 1] << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out += kB64[(chunk >> 18) & 63];
    out += kB64[(chunk >> 12) & 63];
    out += i + 1 < bytes.size() ? kB64[(chunk >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kB64[chunk & 63] : '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(std::string_view text) {
  require(text.size() % 4 == 0, ErrorCode::kFormatError, "base64 length is not a multiple of 4");
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      if (text[i + k] == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        v[k] = value(text[i + k]);
        require(v[k] >= 0 && pad == 0, ErrorCode::kFormatError, "bad base64 character");
      }
    }
    const std::uint32_t chunk = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(chunk >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(chunk));
  }
  return out;
}

std::string content_hash(Net<float>& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (auto* p : net.parameters()) {
    for (char c : p->name) feed(static_cast<unsigned char>(c));
    for (unsigned char c : float_bytes(p->value)) feed(c);
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string checkpoint_to_string(Net<float>& net, const nlohmann::json& meta) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["arch"] = net.arch();
  auto& params = j["params"] = nlohmann::json::object();
  for (auto* p : net.parameters()) {
    params[p->name] = {{"shape", {p->value.rows(), p->value.cols()}},
                       {"data_b64", base64_encode(float_bytes(p->value))}};
  }
  j["meta"] = meta;
  j["meta"]["content_hash"] = content_hash(net);
  return j.dump();
}

Checkpoint checkpoint_from_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    require(version == 1, ErrorCode::kFormatError,
            "unsupported checkpoint format_version " + std::to_string(version));
    Checkpoint out;
    try {
      out.net = make_net<float>(j.at("arch"), 0);
    } catch (const Error& e) {
      fail(ErrorCode::kFormatError, e.what());
    }
    const auto& params = j.at("params");
    for (auto* p : out.net->parameters()) {
      require(params.contains(p->name), ErrorCode::kFormatError, "checkpoint lacks " + p->name);
      const auto& entry = params.at(p->name);
      const auto shape = entry.at("shape").get<std::vector<long>>();
      require(shape.size() == 2 && shape[0] == p->value.rows() && shape[1] == p->value.cols(),
              ErrorCode::kFormatError, "shape mismatch for " + p->name);
      const auto bytes = base64_decode(entry.at("data_b64").get<std::string>());
      require(bytes.size() == static_cast<std::size_t>(p->value.size()) * 4,
              ErrorCode::kFormatError, "wrong data length for " + p->name);
      for (Eigen::Index k = 0; k < p->value.size(); ++k) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[k * 4 + b]) << (8 * b);
        p->value.data()[k] = std::bit_cast<float>(bits);
      }
    }
    out.meta = j.value("meta", nlohmann::json::object());
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("bad checkpoint: ") + e.what());
  }
}

void save_checkpoint(Net<float>& net, const std::string& path, const nlohmann::json& meta) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path);
  out << checkpoint_to_string(net, meta);
  require(static_cast<bool>(out), ErrorCode::kIoError, "write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace hexgraph
