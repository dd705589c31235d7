#pragma once

#include "cascadeloc/eval.hpp"
#include "cascadeloc/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace cascadeloc {

struct MachineFingerprint {
  std::string cpu_model;
  unsigned cores = 0;
};

MachineFingerprint machine_fingerprint();
nlohmann::json to_json(const MachineFingerprint &m);

nlohmann::json to_json(const MetricsReport &r);
nlohmann::json to_json(const NormalizedReport &r);
/// Numbers for defined ratios, "undefined" when the benchmark metric was zero, null when absent.
nlohmann::json to_json(const Ratio &r);

/// Rows are datasets (or their buildings/floors), columns the model labels. Each row
/// contributes a metric line and a prediction-time line, followed by mean and win rows.
std::string sweep_to_csv(const SweepResult &result);
/// Writes `<dir>/sweep_<stage>.csv` and returns its path.
std::filesystem::path write_sweep_csv(const SweepResult &result, const std::filesystem::path &dir);

/// Formats a double in shortest round-trip form.
std::string format_number(double v);

struct BenchmarkOutcome {
  std::string label;
  MetricsReport metrics;
  NormalizedReport normalized; // cascade relative to this benchmark
};

struct DatasetReport {
  std::string dataset;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::string cascade_label;
  std::size_t cascade_models = 0;
  MetricsReport cascade;
  std::vector<BenchmarkOutcome> benchmarks;
};

/// `metrics_<dataset>.json` and `normalized_<dataset>.json`, pretty-printed with sorted keys.
void write_dataset_reports(const DatasetReport &report, const MachineFingerprint &machine,
                           const std::filesystem::path &dir);

/// Appends one row per benchmark to `<dir>/pt_vs_size.csv`, writing the header when
/// the file is new.
void append_pt_vs_size(const DatasetReport &report, const std::filesystem::path &dir);

} // namespace cascadeloc
