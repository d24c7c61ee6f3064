#ifndef HEXGRAPH_HEXGRAPH_H
#define HEXGRAPH_HEXGRAPH_H

/* C interface to the hexgraph engine.
 *
 * Every function returns an hg_status. On failure hg_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Strings returned through char** are owned by the caller and released with
 * hg_string_free(). Handles are released with their *_free function; passing
 * NULL to a free function is a no-op. Configs and results are JSON text. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HG_API __declspec(dllexport)
#else
#define HG_API __attribute__((visibility("default")))
#endif

typedef enum hg_status {
  HG_OK = 0,
  HG_INVALID_ARGUMENT = 1,
  HG_ILLEGAL_MOVE = 2,
  HG_GAME_OVER = 3,
  HG_INVALID_STATE = 4,
  HG_RESOURCE_LIMIT = 5,
  HG_FORMAT_ERROR = 6,
  HG_IO_ERROR = 7,
  HG_INTERNAL_ERROR = 100
} hg_status;

typedef enum hg_color { HG_NONE = 0, HG_RED = 1, HG_BLUE = 2 } hg_color;

typedef struct hg_game hg_game;
typedef struct hg_net hg_net;
typedef struct hg_service hg_service;

/* Receives one JSON log line per progress event. */
typedef void (*hg_log_fn)(const char* json_line, void* user);

HG_API const char* hg_version(void);
HG_API const char* hg_status_name(hg_status status);
HG_API const char* hg_last_error(void);
HG_API void hg_string_free(char* s);

/* ---- games: board and Red-perspective graph kept in lockstep ---- */
HG_API hg_status hg_game_new(int size, int prune, hg_game** out);
HG_API void hg_game_free(hg_game* game);
/* cell in Hex notation, e.g. "c4" */
HG_API hg_status hg_game_play(hg_game* game, const char* cell);
HG_API hg_status hg_game_to_move(const hg_game* game, hg_color* out);
HG_API hg_status hg_game_winner(const hg_game* game, hg_color* out);
HG_API hg_status hg_game_num_actions(const hg_game* game, int* out);
/* board matrix, graph dump, legal moves and winner */
HG_API hg_status hg_game_state_json(const hg_game* game, char** out);

/* ---- networks ---- */
/* arch: {"type":"graphnet"|"gao", ...}, as written in checkpoints */
HG_API hg_status hg_net_create(const char* arch_json, uint64_t seed, hg_net** out);
HG_API hg_status hg_net_load(const char* path, hg_net** out);
HG_API hg_status hg_net_save(hg_net* net, const char* path, const char* meta_json);
HG_API void hg_net_free(hg_net* net);
HG_API hg_status hg_net_hash(hg_net* net, char** out);
/* Greedy evaluation payload: values per graph node and per cell. */
HG_API hg_status hg_net_evaluate(const hg_net* net, const hg_game* game, char** out);

/* ---- runs; run_dir may be empty to skip artifacts ---- */
HG_API hg_status hg_train_dqn(const char* config_json, const char* run_dir, hg_log_fn log,
                              void* user, char** summary);
HG_API hg_status hg_train_azero(const char* config_json, const char* init_checkpoint,
                                const char* run_dir, hg_log_fn log, void* user, char** summary);
HG_API hg_status hg_supervised(const char* config_json, const char* run_dir, hg_log_fn log,
                               void* user, char** summary);
HG_API hg_status hg_selfplay_data(const char* config_json, const char* out_path, hg_log_fn log,
                                  void* user, char** summary);
/* Default config of a kind: "dqn", "azero", "supervised", "selfplay" or
 * "serve". */
HG_API hg_status hg_default_config(const char* kind, char** out);
/* defaults < config file (flat key = value, or .json) < HEXGRAPH_<KEY>
 * environment variables < flag_lines (flat key = value text). Unknown keys
 * are rejected when the run starts. config_file may be NULL or empty. */
HG_API hg_status hg_resolve_config(const char* kind, const char* config_file,
                                   const char* flag_lines, char** out);
/* Creates <root>/<UTC timestamp>-seed<seed> and returns its path. */
HG_API hg_status hg_make_run_dir(const char* root, uint64_t seed, char** out);
/* Keeps freed memory in the process heap; worth calling before training. */
HG_API void hg_tune_allocator(void);

/* ---- evaluation ---- */
/* agent spec: random | solver | rollout[:sims] | <ckpt.json>[:mcts[:sims]]
 * sizes: "6..13", "8" or "6,7,9" */
HG_API hg_status hg_eval_long_range(const char* agent_spec, const char* sizes, char** csv,
                                    char** json);
/* agent specs separated by commas */
HG_API hg_status hg_tournament(const char* agent_specs, int size, uint64_t seed,
                               int max_openings, int prune, char** csv, char** json);
/* moves separated by commas, may be empty */
HG_API hg_status hg_solve(int size, const char* moves, int prune, char** json);

/* ---- HTTP game service ---- */
/* options: {"ckpt_dir", "seed", "cors_origin", "max_sessions", ...} */
HG_API hg_status hg_service_new(const char* options_json, hg_service** out);
HG_API void hg_service_free(hg_service* service);
/* Dispatches one request without a socket. */
HG_API hg_status hg_service_request(hg_service* service, const char* method, const char* path,
                                    const char* body, int* status, char** response);
/* Binds host:port (0 picks a free port) and reports the bound port. */
HG_API hg_status hg_service_bind(hg_service* service, const char* host, int port, int* bound);
/* Blocks until hg_service_stop() is called from another thread. */
HG_API hg_status hg_service_listen(hg_service* service);
HG_API void hg_service_stop(hg_service* service);

#ifdef __cplusplus
}
#endif

#endif
