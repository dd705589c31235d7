#pragma once

#include "cascadeloc/datamodel.hpp"
#include "cascadeloc/ingest.hpp"

#include <filesystem>
#include <map>
#include <random>
#include <string>

namespace testing_support {

inline std::filesystem::path fixture(const std::string &name) {
  return std::filesystem::path(CASCADELOC_FIXTURE_DIR) / name;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("cascadeloc_" + tag + "_" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Synthetic map with `per_floor` samples per floor; the first `train_per_floor` of
// each floor go to `train`, the rest to `test`. One AP layout shared by both.
inline cascadeloc::TrainTest synth_split(cascadeloc::SynthConfig cfg, int train_per_floor) {
  const cascadeloc::RadioMap all = cascadeloc::synthesize_radiomap(cfg);
  cascadeloc::TrainTest out{all.empty_like(), all.empty_like()};
  std::map<std::pair<int, int>, int> seen;
  for (const auto &fp : all.fingerprints) {
    int &n = seen[{fp.building, fp.floor}];
    (n++ < train_per_floor ? out.train : out.test).fingerprints.push_back(fp);
  }
  return out;
}

} // namespace testing_support
