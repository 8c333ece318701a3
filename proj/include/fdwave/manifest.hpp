#pragma once

// Run manifests: config echo, artifact version, timestamp, derived rate
// constants, and an FNV-1a checksum per emitted file.  The manifest is
// written to a temporary name and renamed into place after everything else
// succeeded, so its presence certifies a complete run.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/config.hpp"

namespace fdwave {

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(ss.str())));
  return std::string("fnv1a:") + buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// `outputs` are paths relative to `dir` that already exist on disk.
inline void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config,
                           const std::vector<std::string>& outputs, double nu = 0.0,
                           double gamma = 0.0, bool has_rates = false) {
  std::ostringstream out;
  out << "[manifest]\n";
  out << "version = " << artifact_version << "\n";
  out << "timestamp = " << utc_timestamp() << "\n";
  if (has_rates) {
    out << "nu_sharp = " << format_double(nu) << "\n";
    out << "gamma_sharp = " << format_double(gamma) << "\n";
  }
  out << serialize_config(config);
  out << "[outputs]\n";
  for (const std::string& name : outputs)
    out << name << " = " << checksum_file((dir / name).string()) << "\n";
  const std::filesystem::path tmp = dir / "run_manifest.txt.tmp";
  const std::filesystem::path final_path = dir / "run_manifest.txt";
  write_file(tmp.string(), out.str());
  std::filesystem::rename(tmp, final_path);
}

}  // namespace fdwave
