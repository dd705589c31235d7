#pragma once

#include "cascadeloc/cascade.hpp"
#include "cascadeloc/datamodel.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cascadeloc {

struct MetricsReport {
  std::optional<double> bh_pct; // absent for single-building deployments
  double fh_pct = 0.0;          // building and floor both right
  double err2d_mean = 0.0;      // meters
  double err3d_mean = 0.0;      // meters, floor offset times floor height as vertical error
  double pt_seconds = 0.0;
  std::size_t n_samples = 0;
  std::size_t misclassified_buildings = 0;
};

/// Throws DimensionError when the lengths differ, ParameterError for floor_height <= 0.
MetricsReport compute_metrics(std::span<const Fingerprint> truth, std::span<const PositionEstimate> predictions,
                              double floor_height, bool multi_building);
/// Uses the test map's floor height and deployment.
MetricsReport compute_metrics(const RadioMap &truth, std::span<const PositionEstimate> predictions);

std::vector<PositionEstimate> predict_all(const Locator &locator, std::span<const Fingerprint> queries);

struct TimingResult {
  double median_seconds = 0.0;
  std::vector<double> runs; // seconds, warm-up excluded
};

/// Runs `pass` once as warm-up and then `repetitions` more times on a monotonic clock.
TimingResult time_passes(const std::function<void()> &pass, int repetitions = 3);

/// Wall time of a sequential prediction loop over `queries`: median of 3 timed passes.
TimingResult measure_prediction_time(const Locator &locator, std::span<const Fingerprint> queries);

/// Predicts, scores and times one locator on a test map.
MetricsReport evaluate(const Locator &locator, const RadioMap &test);

/// A proposed/benchmark ratio. Absent when either metric is absent; undefined when
/// the benchmark value is zero.
struct Ratio {
  enum class State { Value, Absent, Undefined };
  State state = State::Absent;
  double value = 0.0;

  static Ratio of(std::optional<double> proposed, std::optional<double> benchmark);
  bool has_value() const { return state == State::Value; }
};

struct NormalizedReport {
  Ratio bh_ratio;
  Ratio fh_ratio;
  Ratio err2d_ratio;
  Ratio err3d_ratio;
  Ratio pt_ratio;
};

NormalizedReport normalize(const MetricsReport &proposed, const MetricsReport &benchmark);

} // namespace cascadeloc
