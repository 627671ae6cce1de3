#pragma once

// Run manifests: every subcommand records its resolved configuration, input
// checksums, outputs, timings and seed so a run can be reproduced exactly.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptkry/error.hpp"

namespace adaptkry::tools {

inline std::string fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string() + " for checksumming");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 14];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a:") + hex;
}

class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed) : start_(clock::now()) {
    doc_["command"] = std::move(command);
    doc_["seed"] = seed;
    doc_["config"] = nlohmann::json::object();
    doc_["inputs"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
    doc_["timings_ms"] = nlohmann::json::object();
  }

  template <typename T>
  void config(const std::string& key, const T& value) {
    doc_["config"][key] = value;
  }

  void input(const std::filesystem::path& path) {
    doc_["inputs"][path.string()] = fnv1a_file(path);
  }

  void output(const std::filesystem::path& path) { doc_["outputs"].push_back(path.string()); }

  void timing(const std::string& phase, double milliseconds) {
    doc_["timings_ms"][phase] = milliseconds;
  }

  void write(const std::filesystem::path& path) {
    const std::chrono::duration<double, std::milli> total = clock::now() - start_;
    doc_["timings_ms"]["total"] = total.count();
    std::ofstream out(path);
    if (!out) throw io_error("cannot write manifest " + path.string());
    out << doc_.dump(2) << '\n';
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
  nlohmann::json doc_;
};

// Stopwatch for per-phase manifest timings.
class PhaseTimer {
 public:
  PhaseTimer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    const std::chrono::duration<double, std::milli> d =
        std::chrono::steady_clock::now() - start_;
    return d.count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace adaptkry::tools
