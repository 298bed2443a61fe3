#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ranharness/config/scenario.hpp"

namespace ranharness::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "rh") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Parses a scenario that the test expects to be valid; throws otherwise.
inline config::ScenarioSpec must_parse(const std::string& yaml) {
  auto r = config::parse_scenario(yaml);
  if (!r) {
    std::ostringstream os;
    for (const auto& d : r.diagnostics) os << d << "\n";
    throw std::runtime_error("scenario did not parse:\n" + os.str());
  }
  return *r;
}

/// |observed - n p| <= 3 sqrt(n p (1-p)); exact match required when p is 0 or 1.
inline bool within_3_sigma(double observed, double n, double p) {
  const double sigma = std::sqrt(n * p * (1.0 - p));
  return std::abs(observed - n * p) <= 3.0 * sigma + 1e-9;
}

inline std::filesystem::path source_dir() { return RANHARNESS_SOURCE_DIR; }

}  // namespace ranharness::testing
