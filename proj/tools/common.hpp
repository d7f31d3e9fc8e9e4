#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

namespace cli {

/// Thrown by the verify subcommand after printing its table; carries the
/// summary line only.
struct SuiteFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void register_pde(CLI::App& app);
void register_nn(CLI::App& app);
void register_verify(CLI::App& app);

/// Resolution order for the output directory: explicit flag, then the
/// INLM_OUTPUT_DIR environment variable, then "./out".
inline std::string resolve_output_dir(const std::string& flag_value,
                                      bool flag_given) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("INLM_OUTPUT_DIR")) return env;
  return flag_value;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir: " + dir);
}

/// Loads a JSON config file and copies each recognized key into the bound
/// option value unless that option was also given on the command line
/// (flags override config-file values).
inline void apply_json_config(const CLI::App& cmd, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    const CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw std::runtime_error("unknown config key in " + path + ": " + key);
    }
    if (opt->count() > 0) continue;  // command line wins
    std::vector<std::string> parts;
    if (value.is_array()) {
      for (const auto& v : value) parts.push_back(v.dump());
    } else if (value.is_string()) {
      parts.push_back(value.get<std::string>());
    } else {
      parts.push_back(value.dump());
    }
    const_cast<CLI::Option*>(opt)->add_result(parts);
    const_cast<CLI::Option*>(opt)->run_callback();
  }
}

struct WallTimer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

}  // namespace cli
