#pragma once

#include "cascadeloc/datamodel.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cascadeloc {

struct LabelColumns {
  std::string x = "X";
  std::string y = "Y";
  std::string floor = "FLOOR";
  std::string building = "BUILDINGID";
};

/// How a CSV radio map is laid out on disk.
struct DatasetFormat {
  std::string rss_column_prefix = "AP";
  LabelColumns label_columns;
  double not_detected_sentinel = 100.0;
  double replacement_value = kDefaultNotDetectedRss;
  // Shift coordinates so that the training minimum becomes the origin.
  bool subtract_origin = false;

  /// Column naming of the public UJIIndoorLoc release (WAPnnn, LONGITUDE, LATITUDE).
  static DatasetFormat ujiindoorloc();

  /// Picks ujiindoorloc() when the header has a LONGITUDE column, otherwise the default layout.
  static DatasetFormat detect(const std::filesystem::path &csv);
};

/// Contents of the `<name>.meta.json` sidecar. Floor ids are the raw ids used in the CSV.
struct DatasetMetadata {
  std::size_t ap_count = 0;
  double floor_height_m = kDefaultFloorHeight;
  Deployment deployment;
  double not_detected_sentinel = 100.0;
};

/// `dir/foo.csv` and `dir/foo.test.csv` both map to `dir/foo.meta.json`.
std::filesystem::path metadata_path_for(const std::filesystem::path &csv);
std::optional<DatasetMetadata> read_metadata(const std::filesystem::path &meta_json);
void write_metadata(const DatasetMetadata &meta, const std::filesystem::path &meta_json);

/// Loads a CSV radio map (and its sidecar when present), replaces the not-detected
/// sentinel and renumbers floors to 0..F-1 per building. Throws ValidationError when
/// the result violates a RadioMap invariant.
RadioMap load_radiomap(const std::filesystem::path &csv, const DatasetFormat &fmt = {});

struct LoadResult {
  RadioMap map;
  std::vector<Violation> violations;
};

/// Same as load_radiomap but reports invariant violations as data. Schema, parse and
/// empty-dataset errors still throw.
LoadResult load_radiomap_unchecked(const std::filesystem::path &csv, const DatasetFormat &fmt = {});

struct TrainTest {
  RadioMap train;
  RadioMap test;
};

/// Loads a training file and a separately recorded test file with one shared floor
/// numbering (taken from the sidecar, or else from the training labels).
TrainTest load_train_test(const std::filesystem::path &train_csv, const std::filesystem::path &test_csv,
                          const DatasetFormat &fmt = {});

/// Writes `<csv>` and its sidecar. Entries equal to map.not_detected_rss are written as
/// the sentinel; everything else is written in shortest round-trip form.
void save_radiomap(const RadioMap &map, const std::filesystem::path &csv, double not_detected_sentinel = 100.0);

/// CSV text exactly as save_radiomap writes it.
std::string radiomap_to_csv(const RadioMap &map, double not_detected_sentinel = 100.0);

/// Stratified by (building, floor). Every stratum with >= 2 samples lands in both parts.
/// Both parts keep the input order. Deterministic for a given seed.
TrainTest split_train_validation(const RadioMap &map, double ratio, std::uint64_t seed);

struct SynthConfig {
  int buildings = 1;
  int floors_per_building = 1;
  int aps_per_floor = 4;
  int samples_per_floor = 100;
  double grid_extent = 50.0; // side of each square floor, meters
  double noise_sigma = 0.0;  // dB
  double path_loss_exponent = 3.0;
  double tx_power = -30.0; // dBm at 1 m
  double floor_height = kDefaultFloorHeight;
  std::uint64_t seed = 1;
  std::string name = "synth";

  void validate() const; // throws ConfigError
};

struct AccessPoint {
  int building = 0;
  int floor = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// RSS at `distance` meters under the log-distance model (distance clamped to >= 1 m).
double log_distance_rss(double tx_power, double path_loss_exponent, double distance);

/// AP placement used by synthesize_radiomap for the same config.
std::vector<AccessPoint> synthesize_layout(const SynthConfig &cfg);

/// Log-distance fingerprints on uniformly drawn positions per floor. APs of other
/// buildings read as not detected. Deterministic per seed.
RadioMap synthesize_radiomap(const SynthConfig &cfg);

} // namespace cascadeloc
