#include "hexgraph/hexgraph.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "azero.hpp"
#include "commands.hpp"
#include "dqn.hpp"
#include "run_config.hpp"
#include "service.hpp"

using namespace hexgraph;

struct hg_game {
  GameState state;
};

struct hg_net {
  std::unique_ptr<Net<float>> net;
};

struct hg_service {
  std::unique_ptr<GameService> service;
  std::unique_ptr<HttpServer> server;
};

static_assert(static_cast<int>(ErrorCode::kInvalidArgument) == HG_INVALID_ARGUMENT);
static_assert(static_cast<int>(ErrorCode::kIoError) == HG_IO_ERROR);

namespace {

thread_local std::string last_error;

hg_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return HG_INVALID_ARGUMENT;
    case ErrorCode::kIllegalMove: return HG_ILLEGAL_MOVE;
    case ErrorCode::kGameOver: return HG_GAME_OVER;
    case ErrorCode::kInvalidState: return HG_INVALID_STATE;
    case ErrorCode::kResourceLimit: return HG_RESOURCE_LIMIT;
    case ErrorCode::kFormatError: return HG_FORMAT_ERROR;
    case ErrorCode::kIoError: return HG_IO_ERROR;
  }
  return HG_INTERNAL_ERROR;
}

template <class F>
hg_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return HG_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return HG_FORMAT_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HG_RESOURCE_LIMIT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HG_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  need(out, "output pointer");
  *out = dup(s);
}

nlohmann::json parse_json(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  auto j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::kFormatError, std::string(what) + " is not valid JSON");
  return j;
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

hg_color color_code(std::optional<Color> c) {
  if (!c) return HG_NONE;
  return *c == Color::kRed ? HG_RED : HG_BLUE;
}

LogFn logger(hg_log_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const nlohmann::json& j) { fn(j.dump().c_str(), user); };
}

nlohmann::json default_config(const std::string& kind) {
  if (kind == "dqn") return DqnConfig{}.to_json();
  if (kind == "azero") return AzConfig{}.to_json();
  if (kind == "supervised") return supervised_defaults();
  if (kind == "selfplay") return selfplay_defaults();
  if (kind == "serve") return serve_defaults();
  fail(ErrorCode::kInvalidArgument, "unknown config kind '" + kind + "'");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

extern "C" {

const char* hg_version(void) { return "0.1.0"; }

const char* hg_status_name(hg_status status) {
  switch (status) {
    case HG_OK: return "ok";
    case HG_INTERNAL_ERROR: return "internal-error";
    default: return error_code_name(static_cast<ErrorCode>(status));
  }
}

const char* hg_last_error(void) { return last_error.c_str(); }

void hg_string_free(char* s) { std::free(s); }

hg_status hg_game_new(int size, int prune, hg_game** out) {
  return guarded([&] {
    need(out, "output pointer");
    *out = new hg_game{GameState(size, prune != 0)};
  });
}

void hg_game_free(hg_game* game) { delete game; }

hg_status hg_game_play(hg_game* game, const char* cell) {
  return guarded([&] {
    need(game, "game");
    need(cell, "cell");
    game->state.play_cell(parse_cell(cell, game->state.size()));
  });
}

hg_status hg_game_to_move(const hg_game* game, hg_color* out) {
  return guarded([&] {
    need(game, "game");
    need(out, "output pointer");
    *out = game->state.is_over() ? HG_NONE : color_code(game->state.to_move());
  });
}

hg_status hg_game_winner(const hg_game* game, hg_color* out) {
  return guarded([&] {
    need(game, "game");
    need(out, "output pointer");
    *out = color_code(game->state.winner());
  });
}

hg_status hg_game_num_actions(const hg_game* game, int* out) {
  return guarded([&] {
    need(game, "game");
    need(out, "output pointer");
    *out = game->state.is_over() ? 0 : game->state.num_actions();
  });
}

hg_status hg_game_state_json(const hg_game* game, char** out) {
  return guarded([&] {
    need(game, "game");
    put(out, state_payload(game->state).dump());
  });
}

hg_status hg_net_create(const char* arch_json, uint64_t seed, hg_net** out) {
  return guarded([&] {
    need(out, "output pointer");
    const nlohmann::json arch = parse_json(arch_json, "arch");
    *out = new hg_net{make_net<float>(arch, seed)};
  });
}

hg_status hg_net_load(const char* path, hg_net** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output pointer");
    *out = new hg_net{load_checkpoint(path).net};
  });
}

hg_status hg_net_save(hg_net* net, const char* path, const char* meta_json) {
  return guarded([&] {
    need(net, "net");
    need(path, "path");
    save_checkpoint(*net->net, path, parse_json(meta_json, "meta"));
  });
}

void hg_net_free(hg_net* net) { delete net; }

hg_status hg_net_hash(hg_net* net, char** out) {
  return guarded([&] {
    need(net, "net");
    put(out, content_hash(*net->net));
  });
}

hg_status hg_net_evaluate(const hg_net* net, const hg_game* game, char** out) {
  return guarded([&] {
    need(net, "net");
    need(game, "game");
    const NetOutput<float> o = net->net->forward({game->state.position()});
    Decision d;
    d.eval.kind = net->net->arch().value("head", "dueling") == "policy" ? "policy" : "q";
    d.eval.action_values.assign(o.action[0].begin(), o.action[0].end());
    d.eval.value = o.value[0];
    d.action = argmax_index(d.eval.action_values);
    put(out, eval_payload(game->state, d).dump());
  });
}

hg_status hg_train_dqn(const char* config_json, const char* run_dir, hg_log_fn log, void* user,
                       char** summary) {
  return guarded([&] {
    const nlohmann::json r =
        run_train_dqn(parse_json(config_json, "config"), str(run_dir), logger(log, user));
    if (summary) *summary = dup(r.dump());
  });
}

hg_status hg_train_azero(const char* config_json, const char* init_checkpoint, const char* run_dir,
                         hg_log_fn log, void* user, char** summary) {
  return guarded([&] {
    const nlohmann::json r = run_train_azero(parse_json(config_json, "config"),
                                             str(init_checkpoint), str(run_dir), logger(log, user));
    if (summary) *summary = dup(r.dump());
  });
}

hg_status hg_supervised(const char* config_json, const char* run_dir, hg_log_fn log, void* user,
                        char** summary) {
  return guarded([&] {
    const nlohmann::json r =
        run_supervised(parse_json(config_json, "config"), str(run_dir), logger(log, user));
    if (summary) *summary = dup(r.dump());
  });
}

hg_status hg_selfplay_data(const char* config_json, const char* out_path, hg_log_fn log,
                           void* user, char** summary) {
  return guarded([&] {
    const nlohmann::json r =
        run_selfplay_data(parse_json(config_json, "config"), str(out_path), logger(log, user));
    if (summary) *summary = dup(r.dump());
  });
}

hg_status hg_default_config(const char* kind, char** out) {
  return guarded([&] { put(out, default_config(str(kind)).dump()); });
}

hg_status hg_resolve_config(const char* kind, const char* config_file, const char* flag_lines,
                            char** out) {
  return guarded([&] {
    const nlohmann::json defaults = default_config(str(kind));
    const std::string path = str(config_file);
    const nlohmann::json file = path.empty() ? nlohmann::json::object() : load_config_file(path);
    const nlohmann::json env = env_overrides(defaults);
    const nlohmann::json flags = parse_flat_config(str(flag_lines));
    put(out, merge_layers(defaults, file, env, flags).dump());
  });
}

hg_status hg_make_run_dir(const char* root, uint64_t seed, char** out) {
  return guarded([&] { put(out, make_run_dir(str(root), seed)); });
}

void hg_tune_allocator(void) { tune_allocator(); }

hg_status hg_eval_long_range(const char* agent_spec, const char* sizes, char** csv, char** json) {
  return guarded([&] {
    need(agent_spec, "agent spec");
    need(sizes, "sizes");
    const TextReport r = run_eval_long_range(agent_spec, parse_sizes(sizes));
    if (csv) *csv = dup(r.csv);
    if (json) *json = dup(r.json.dump());
  });
}

hg_status hg_tournament(const char* agent_specs, int size, uint64_t seed, int max_openings,
                        int prune, char** csv, char** json) {
  return guarded([&] {
    need(agent_specs, "agent specs");
    const TextReport r =
        run_tournament(split_commas(agent_specs), size, seed, max_openings, prune != 0);
    if (csv) *csv = dup(r.csv);
    if (json) *json = dup(r.json.dump());
  });
}

hg_status hg_solve(int size, const char* moves, int prune, char** json) {
  return guarded([&] { put(json, run_solve(size, split_commas(str(moves)), prune != 0).dump()); });
}

hg_status hg_service_new(const char* options_json, hg_service** out) {
  return guarded([&] {
    need(out, "output pointer");
    const nlohmann::json j = parse_json(options_json, "options");
    const nlohmann::json known = {"ckpt_dir", "seed", "cors_origin", "max_sessions",
                                  "max_simulations", "solver_max_size"};
    for (const auto& [key, _] : j.items()) {
      require(std::find(known.begin(), known.end(), key) != known.end(),
              ErrorCode::kInvalidArgument, "unknown service option '" + key + "'");
    }
    ServiceOptions o;
    o.ckpt_dir = j.value("ckpt_dir", o.ckpt_dir);
    o.seed = j.value("seed", o.seed);
    o.cors_origin = j.value("cors_origin", o.cors_origin);
    o.max_sessions = j.value("max_sessions", o.max_sessions);
    o.max_simulations = j.value("max_simulations", o.max_simulations);
    o.solver_max_size = j.value("solver_max_size", o.solver_max_size);
    auto s = std::make_unique<hg_service>();
    s->service = std::make_unique<GameService>(o);
    *out = s.release();
  });
}

void hg_service_free(hg_service* service) { delete service; }

hg_status hg_service_request(hg_service* service, const char* method, const char* path,
                             const char* body, int* status, char** response) {
  return guarded([&] {
    need(service, "service");
    need(method, "method");
    need(path, "path");
    need(status, "status pointer");
    const HttpReply r = service->service->handle(method, path, str(body));
    *status = r.status;
    put(response, r.body.dump());
  });
}

hg_status hg_service_bind(hg_service* service, const char* host, int port, int* bound) {
  return guarded([&] {
    need(service, "service");
    if (!service->server) service->server = std::make_unique<HttpServer>(*service->service);
    const int p = service->server->bind(host ? host : "127.0.0.1", port);
    if (bound) *bound = p;
  });
}

hg_status hg_service_listen(hg_service* service) {
  return guarded([&] {
    need(service, "service");
    require(service->server != nullptr, ErrorCode::kInvalidState, "service is not bound");
    service->server->listen();
  });
}

void hg_service_stop(hg_service* service) {
  if (service && service->server) service->server->stop();
}

}  // extern "C"
