#include "cascadeloc/eval.hpp"

#include "cascadeloc/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cascadeloc {

MetricsReport compute_metrics(std::span<const Fingerprint> truth, std::span<const PositionEstimate> predictions,
                              double floor_height, bool multi_building) {
  if (truth.size() != predictions.size())
    throw DimensionError("metrics: " + std::to_string(truth.size()) + " ground-truth samples but " +
                         std::to_string(predictions.size()) + " predictions");
  if (!(floor_height > 0.0))
    throw ParameterError("floor height must be positive");
  MetricsReport r;
  r.n_samples = truth.size();
  if (truth.empty()) {
    if (multi_building)
      r.bh_pct = 0.0;
    return r;
  }
  std::size_t building_hits = 0;
  std::size_t floor_hits = 0;
  double sum2 = 0.0;
  double sum3 = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto &t = truth[i];
    const auto &p = predictions[i];
    const bool building_ok = t.building == p.building;
    building_hits += building_ok;
    floor_hits += (building_ok || !multi_building) && t.floor == p.floor;
    const double dx = p.x - t.x;
    const double dy = p.y - t.y;
    const double dz = static_cast<double>(p.floor - t.floor) * floor_height;
    sum2 += std::sqrt(dx * dx + dy * dy);
    sum3 += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  const double n = static_cast<double>(truth.size());
  if (multi_building)
    r.bh_pct = 100.0 * static_cast<double>(building_hits) / n;
  r.fh_pct = 100.0 * static_cast<double>(floor_hits) / n;
  r.err2d_mean = sum2 / n;
  r.err3d_mean = sum3 / n;
  r.misclassified_buildings = truth.size() - building_hits;
  return r;
}

MetricsReport compute_metrics(const RadioMap &truth, std::span<const PositionEstimate> predictions) {
  return compute_metrics(truth.fingerprints, predictions, truth.floor_height, truth.multi_building());
}

std::vector<PositionEstimate> predict_all(const Locator &locator, std::span<const Fingerprint> queries) {
  std::vector<PositionEstimate> out;
  out.reserve(queries.size());
  for (const auto &q : queries)
    out.push_back(locator.locate(q.rss));
  return out;
}

TimingResult time_passes(const std::function<void()> &pass, int repetitions) {
  if (repetitions < 1)
    throw ParameterError("need at least one timed repetition");
  using clock = std::chrono::steady_clock;
  pass();
  TimingResult r;
  for (int i = 0; i < repetitions; ++i) {
    const auto start = clock::now();
    pass();
    r.runs.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  std::vector<double> sorted = r.runs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  r.median_seconds = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return r;
}

TimingResult measure_prediction_time(const Locator &locator, std::span<const Fingerprint> queries) {
  if (queries.empty())
    throw EmptyDatasetError("prediction time needs at least one query");
  // Keeps the predictions observable so the loop cannot be optimised away.
  volatile double sink = 0.0;
  return time_passes([&] {
    double acc = 0.0;
    for (const auto &q : queries) {
      const PositionEstimate p = locator.locate(q.rss);
      acc += p.x + p.y + p.floor + p.building;
    }
    sink = sink + acc;
  });
}

MetricsReport evaluate(const Locator &locator, const RadioMap &test) {
  const auto predictions = predict_all(locator, test.fingerprints);
  MetricsReport r = compute_metrics(test, predictions);
  r.pt_seconds = measure_prediction_time(locator, test.fingerprints).median_seconds;
  return r;
}

Ratio Ratio::of(std::optional<double> proposed, std::optional<double> benchmark) {
  if (!proposed || !benchmark)
    return {State::Absent, 0.0};
  if (*benchmark == 0.0)
    return {State::Undefined, 0.0};
  return {State::Value, *proposed / *benchmark};
}

NormalizedReport normalize(const MetricsReport &proposed, const MetricsReport &benchmark) {
  return {Ratio::of(proposed.bh_pct, benchmark.bh_pct), Ratio::of(proposed.fh_pct, benchmark.fh_pct),
          Ratio::of(proposed.err2d_mean, benchmark.err2d_mean), Ratio::of(proposed.err3d_mean, benchmark.err3d_mean),
          Ratio::of(proposed.pt_seconds, benchmark.pt_seconds)};
}

} // namespace cascadeloc
