#pragma once

#include <cstdint>
#include <ctime>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace hexgraph {

// Flat key = value text, one pair per line, '#' starts a comment. Values that
// parse as JSON keep their type ("3" is a number, "{...}" an object); anything
// else is a string. Throws kFormatError with the line number.
nlohmann::json parse_flat_config(std::string_view text);

// A .json file must hold an object; any other file is read as flat text.
nlohmann::json load_config_file(const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

// For every key of `defaults`, HEXGRAPH_<KEY> (upper case) overrides it.
nlohmann::json env_overrides(const nlohmann::json& defaults, const EnvLookup& lookup = process_env);

// defaults < file < environment < flags. Keys are shallow-merged; a later
// layer may add keys the defaults lack, so unknown names reach the module's
// own validation.
nlohmann::json merge_layers(const nlohmann::json& defaults, const nlohmann::json& file,
                            const nlohmann::json& env, const nlohmann::json& flags);

// <root>/<YYYYmmdd-HHMMSS>-seed<seed>, created on disk. A numeric suffix is
// added if the name is taken.
std::string make_run_dir(const std::string& root, std::uint64_t seed,
                         std::time_t now = std::time(nullptr));

// Pretty-printed `config` in <dir>/config.json.
void write_config(const std::string& dir, const nlohmann::json& config);

// Keeps freed memory in the heap. The trainers allocate and free
// multi-megabyte buffers every step and glibc would otherwise return them to
// the kernel each time. No-op off glibc.
void tune_allocator();

}  // namespace hexgraph
