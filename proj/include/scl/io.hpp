#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scl/error.hpp"

namespace scl {

inline constexpr const char* version_string = "0.1.0";

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Records what a CLI run produced; every named output must exist and be
/// non-empty for the manifest to validate.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  nlohmann::json config_snapshot;
  std::string version = version_string;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"command", command},       {"parameters", parameters},
                          {"config", config_snapshot}, {"version", version},
                          {"outputs", outputs},        {"wall_seconds", wall_seconds}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters");
    m.config_snapshot = j.at("config");
    m.version = j.at("version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    return m;
  }

  void write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) raise(errc::numerical_failure, "cannot open " + path + " for writing");
    os << to_json().dump(2) << '\n';
  }

  static RunManifest read(const std::string& path) {
    std::ifstream is(path);
    if (!is) raise(errc::numerical_failure, "cannot open " + path);
    nlohmann::json j;
    is >> j;
    return from_json(j);
  }

  bool outputs_valid() const {
    namespace fs = std::filesystem;
    for (const auto& p : outputs) {
      std::error_code ec;
      if (!fs::exists(p, ec) || fs::file_size(p, ec) == 0) return false;
    }
    return true;
  }
};

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace scl
