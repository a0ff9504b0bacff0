#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "epihumat/scenario.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path source_dir() { return EPIHUMAT_SOURCE_DIR; }
inline fs::path mini_dir() { return fs::path(EPIHUMAT_TEST_DATA) / "mini"; }
inline fs::path presets_dir() { return source_dir() / "scenarios"; }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("epihumat-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Scenario over the small fixture city.
inline std::string mini_scenario_json(const std::string& kind = "NoMeasures", int target = 400, int horizon = 20,
                                      const std::string& extra = "") {
  const auto dir = mini_dir().string();
  std::string virus = R"("p_se": 0.07, "days_rs": 180)";
  if (kind == "Lockdown") virus += R"(, "p_se_quarantine_scenario": 0.05)";
  if (kind == "PreventiveMeasures") {
    virus += R"(, "p_se_accepting": 0.02, "p_se_non_essential": 0.04, "quarantine_delay_days": 3,)"
             R"( "asymptomatic_fraction": 0.4)";
  }
  return std::string("{\n") + R"(  "schema_version": 1, "name": "mini", "scenario_kind": ")" + kind + "\",\n" +
         R"(  "rng_seed": 7, "replicates": 2, "initial_infected_fraction": 0.02,)" + "\n" +
         R"(  "population": {"survey": ")" + dir + R"(/survey.csv", "census": ")" + dir +
         R"(/census.csv", "profile_tree": ")" + dir + R"(/profile_tree.json", "tract_map": ")" + dir +
         R"(/tract_map.txt", "target_size": )" + std::to_string(target) + "},\n" +
         R"(  "calendar": {"horizon_days": )" + std::to_string(horizon) + "},\n" +
         R"(  "network": {"meet_friend_probability": 0.5},)" + "\n" + R"(  "virus": {)" + virus + "}" + extra +
         "\n}\n";
}

inline epihumat::ScenarioConfig mini_config(const std::string& kind = "NoMeasures", int target = 400,
                                            int horizon = 20, const std::string& extra = "") {
  return epihumat::parse_scenario(mini_scenario_json(kind, target, horizon, extra), mini_dir());
}

}  // namespace testing_support
