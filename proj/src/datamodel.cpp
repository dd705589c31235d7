#include "cascadeloc/datamodel.hpp"

#include "cascadeloc/errors.hpp"

#include <cmath>
#include <sstream>

namespace cascadeloc {

std::size_t total_floors(const Deployment &deployment) {
  std::size_t n = 0;
  for (const auto &[building, floors] : deployment)
    n += floors.size();
  return n;
}

RadioMap RadioMap::empty_like() const {
  RadioMap out;
  out.ap_count = ap_count;
  out.deployment = deployment;
  out.floor_height = floor_height;
  out.not_detected_rss = not_detected_rss;
  out.name = name;
  return out;
}

Deployment deployment_of(std::span<const Fingerprint> fingerprints) {
  Deployment d;
  for (const auto &fp : fingerprints)
    d[fp.building].insert(fp.floor);
  return d;
}

std::string to_string(const Violation &violation) {
  std::ostringstream os;
  if (violation.index)
    os << "fingerprint " << *violation.index << ": ";
  else
    os << "map: ";
  os << violation.rule;
  return os.str();
}

std::vector<Violation> validate_radiomap(const RadioMap &map) {
  std::vector<Violation> out;
  if (map.fingerprints.empty())
    out.push_back({std::nullopt, "radio map is empty"});
  if (map.ap_count == 0)
    out.push_back({std::nullopt, "ap_count must be positive"});
  if (!(map.floor_height > 0.0) || !std::isfinite(map.floor_height))
    out.push_back({std::nullopt, "floor_height must be strictly positive"});
  if (map.deployment.empty())
    out.push_back({std::nullopt, "deployment registry is empty"});
  for (const auto &[building, floors] : map.deployment) {
    if (building < 0)
      out.push_back({std::nullopt, "building id " + std::to_string(building) + " is negative"});
    if (floors.empty())
      out.push_back({std::nullopt, "building " + std::to_string(building) + " owns no floors"});
    for (int f : floors)
      if (f < 0)
        out.push_back({std::nullopt, "building " + std::to_string(building) + " has negative floor id " +
                                         std::to_string(f)});
  }

  for (std::size_t i = 0; i < map.fingerprints.size(); ++i) {
    const Fingerprint &fp = map.fingerprints[i];
    if (fp.rss.size() != map.ap_count) {
      out.push_back({i, "rss length " + std::to_string(fp.rss.size()) + " differs from ap_count " +
                            std::to_string(map.ap_count)});
    } else {
      for (std::size_t a = 0; a < fp.rss.size(); ++a) {
        const double v = fp.rss[a];
        if (!std::isfinite(v) || v < kMinDetectedRss || v > kMaxDetectedRss) {
          out.push_back({i, "rss[" + std::to_string(a) + "] = " + std::to_string(v) + " outside [-110, 0] dBm"});
          break;
        }
      }
    }
    if (!std::isfinite(fp.x) || !std::isfinite(fp.y))
      out.push_back({i, "non-finite coordinates"});
    auto b = map.deployment.find(fp.building);
    if (b == map.deployment.end())
      out.push_back({i, "building " + std::to_string(fp.building) + " is not in the deployment registry"});
    else if (!b->second.contains(fp.floor))
      out.push_back({i, "floor " + std::to_string(fp.floor) + " of building " + std::to_string(fp.building) +
                            " is not in the deployment registry"});
  }
  return out;
}

double rss_distance_manhattan(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionError("rss vectors differ in length: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  return manhattan_unchecked(a.data(), b.data(), a.size());
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw DimensionError("feature data size does not match rows * cols");
}

void FeatureMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0)
    cols_ = values.size();
  if (values.size() != cols_)
    throw DimensionError("row length " + std::to_string(values.size()) + " differs from " + std::to_string(cols_));
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

FeatureMatrix features_of(std::span<const Fingerprint> fingerprints) {
  if (fingerprints.empty())
    return {};
  const std::size_t cols = fingerprints.front().rss.size();
  FeatureMatrix out(fingerprints.size(), cols);
  for (std::size_t i = 0; i < fingerprints.size(); ++i) {
    if (fingerprints[i].rss.size() != cols)
      throw DimensionError("fingerprint " + std::to_string(i) + " has rss length " +
                           std::to_string(fingerprints[i].rss.size()) + ", expected " + std::to_string(cols));
    std::copy(fingerprints[i].rss.begin(), fingerprints[i].rss.end(), out.row(i).begin());
  }
  return out;
}

std::vector<int> buildings_of(std::span<const Fingerprint> fingerprints) {
  std::vector<int> out;
  out.reserve(fingerprints.size());
  for (const auto &fp : fingerprints)
    out.push_back(fp.building);
  return out;
}

std::vector<int> floors_of(std::span<const Fingerprint> fingerprints) {
  std::vector<int> out;
  out.reserve(fingerprints.size());
  for (const auto &fp : fingerprints)
    out.push_back(fp.floor);
  return out;
}

std::vector<Point2> positions_of(std::span<const Fingerprint> fingerprints) {
  std::vector<Point2> out;
  out.reserve(fingerprints.size());
  for (const auto &fp : fingerprints)
    out.push_back(fp.position());
  return out;
}

} // namespace cascadeloc
