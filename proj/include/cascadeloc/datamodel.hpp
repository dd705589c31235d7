#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cascadeloc {

/// RSS value assigned to an access point that was not heard, after ingestion.
inline constexpr double kDefaultNotDetectedRss = -105.0;
inline constexpr double kMinDetectedRss = -110.0;
inline constexpr double kMaxDetectedRss = 0.0;
inline constexpr double kDefaultFloorHeight = 3.0;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2 &, const Point2 &) = default;
};

/// One RSS observation with its ground-truth labels.
struct Fingerprint {
  std::vector<double> rss; // dBm, one entry per access point
  int building = 0;
  int floor = 0; // contiguous 0..F-1 within the building
  double x = 0.0;
  double y = 0.0;

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;
};

/// building id -> floor ids
using Deployment = std::map<int, std::set<int>>;

std::size_t total_floors(const Deployment &deployment);

/// Labelled fingerprint database plus the deployment it was recorded in.
struct RadioMap {
  std::vector<Fingerprint> fingerprints;
  std::size_t ap_count = 0;
  Deployment deployment;
  double floor_height = kDefaultFloorHeight;
  double not_detected_rss = kDefaultNotDetectedRss;
  std::string name;

  std::size_t size() const { return fingerprints.size(); }
  bool empty() const { return fingerprints.empty(); }
  bool multi_building() const { return deployment.size() > 1; }

  /// Same metadata, no fingerprints.
  RadioMap empty_like() const;
};

/// Builds the deployment registry from the labels present in `fingerprints`.
Deployment deployment_of(std::span<const Fingerprint> fingerprints);

struct PositionEstimate {
  int building = 0;
  int floor = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PositionEstimate &, const PositionEstimate &) = default;
};

struct Violation {
  std::optional<std::size_t> index; // offending fingerprint, absent for map-level rules
  std::string rule;
};

std::string to_string(const Violation &violation);

/// Checks every RadioMap invariant. Empty result iff the map is well formed.
std::vector<Violation> validate_radiomap(const RadioMap &map);

/// Sum of absolute element-wise differences. Throws DimensionError on length mismatch.
double rss_distance_manhattan(std::span<const double> a, std::span<const double> b);

/// Unchecked variant for hot loops; lengths must already agree.
inline double manhattan_unchecked(const double *a, const double *b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d < 0.0 ? -d : d;
  }
  return sum;
}

/// Dense row-major feature table.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const std::vector<double> &data() const { return data_; }

  void append_row(std::span<const double> values);
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const FeatureMatrix &, const FeatureMatrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

FeatureMatrix features_of(std::span<const Fingerprint> fingerprints);
std::vector<int> buildings_of(std::span<const Fingerprint> fingerprints);
std::vector<int> floors_of(std::span<const Fingerprint> fingerprints);
std::vector<Point2> positions_of(std::span<const Fingerprint> fingerprints);

} // namespace cascadeloc
