#include "run_config.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace hexgraph {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

nlohmann::json parse_value(const std::string& text) {
  if (text.empty()) return "";
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return text;
  return j;
}

}  // namespace

nlohmann::json parse_flat_config(std::string_view text) {
  nlohmann::json out = nlohmann::json::object();
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::kFormatError,
            "config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    require(!key.empty(), ErrorCode::kFormatError,
            "config line " + std::to_string(number) + ": empty key");
    out[key] = parse_value(trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIoError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (std::filesystem::path(path).extension() == ".json") {
    auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    require(!j.is_discarded() && j.is_object(), ErrorCode::kFormatError,
            path + ": expected a JSON object");
    return j;
  }
  return parse_flat_config(ss.str());
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

nlohmann::json env_overrides(const nlohmann::json& defaults, const EnvLookup& lookup) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, _] : defaults.items()) {
    std::string name = "HEXGRAPH_";
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (auto v = lookup(name)) out[key] = parse_value(trim(*v));
  }
  return out;
}

nlohmann::json merge_layers(const nlohmann::json& defaults, const nlohmann::json& file,
                            const nlohmann::json& env, const nlohmann::json& flags) {
  nlohmann::json out = defaults.is_object() ? defaults : nlohmann::json::object();
  for (const nlohmann::json* layer : {&file, &env, &flags}) {
    if (layer->is_null()) continue;
    require(layer->is_object(), ErrorCode::kInvalidArgument, "config layers must be objects");
    for (const auto& [key, value] : layer->items()) out[key] = value;
  }
  return out;
}

std::string make_run_dir(const std::string& root, std::uint64_t seed, std::time_t now) {
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::string base = std::string(stamp) + "-seed" + std::to_string(seed);
  namespace fs = std::filesystem;
  fs::create_directories(root.empty() ? "." : root);
  for (int k = 0;; ++k) {
    const fs::path dir = fs::path(root.empty() ? "." : root) /
                         (k == 0 ? base : base + "-" + std::to_string(k));
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir.string();
    require(!ec, ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  }
}

void write_config(const std::string& dir, const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "config.json");
  require(out.good(), ErrorCode::kIoError, "cannot write config in " + dir);
  out << config.dump(2) << "\n";
}

void tune_allocator() {
#ifdef __GLIBC__
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 32 << 20);  // glibc caps the threshold at 32 MiB
#endif
}

}  // namespace hexgraph
