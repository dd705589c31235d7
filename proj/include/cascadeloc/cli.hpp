#pragma once

#include "cascadeloc/ingest.hpp"
#include "cascadeloc/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cascadeloc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default data root.
inline constexpr const char *kDataDirEnv = "CASCADELOC_DATA_DIR";

/// A training file plus, when recorded separately, its test file.
struct DatasetSource {
  std::string name;
  std::filesystem::path train;
  std::optional<std::filesystem::path> test;
  DatasetFormat format;
};

/// `*.csv` files of a directory (or the file itself). `foo.test.csv` becomes the test
/// file of `foo.csv`; UJIIndoorLoc's trainingData.csv/validationData.csv form one pair.
std::vector<DatasetSource> discover_datasets(const std::filesystem::path &root);

/// Reads a synthesizer config: one object or an array of objects with SynthConfig's field names.
std::vector<SynthConfig> read_synth_configs(const std::filesystem::path &json_path);

/// Where datasets come from: a data directory or a synthesizer config, never both.
struct DataSource {
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> synth_config;
  std::optional<double> floor_height; // overrides the per-dataset value
};

struct SweepConfig {
  DataSource source;
  double ratio = 0.8;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  std::vector<Stage> stages{Stage::Bh, Stage::Fh, Stage::Loc2d};
  bool resubstitution = false;
};

struct BenchmarkConfig {
  DataSource source;
  std::string preset = "best";
  std::vector<std::string> benchmarks{"1nn"};
  double ratio = 0.8;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
};

int cmd_validate(const std::vector<std::filesystem::path> &paths, std::ostream &out, std::ostream &err);
int cmd_synth(const std::filesystem::path &config, const std::filesystem::path &out_dir, std::ostream &out,
              std::ostream &err);
int cmd_sweep(const SweepConfig &config, std::ostream &out, std::ostream &err);
int cmd_benchmark(const BenchmarkConfig &config, std::ostream &out, std::ostream &err);

/// Parses argv and dispatches to the commands above.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace cascadeloc::cli
