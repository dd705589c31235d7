#pragma once

#include "cascadeloc/datamodel.hpp"
#include "cascadeloc/models/model.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string_view>
#include <utility>

namespace cascadeloc {

/// Model choice for each of the three stages.
struct CascadeSpec {
  models::ModelSpec bh;
  models::ModelSpec fh;
  models::ModelSpec loc2d;

  /// "best" (NN->NN->1NN), "second" (NN->NN->W3NN) or "fastest" (DT->DT->W3NN).
  static CascadeSpec preset(std::string_view name, std::uint64_t seed = 0);
  static CascadeSpec from_labels(std::string_view bh, std::string_view fh, std::string_view loc2d,
                                 std::uint64_t seed = 0);

  /// e.g. "NN-NN-1NN"
  std::string label() const;
  void validate() const; // throws ParameterError
  friend bool operator==(const CascadeSpec &, const CascadeSpec &) = default;
};

nlohmann::json to_json(const CascadeSpec &spec);
CascadeSpec cascade_spec_from_json(const nlohmann::json &j);

/// Anything that turns a fingerprint into a full position estimate.
class Locator {
public:
  virtual ~Locator() = default;
  virtual PositionEstimate locate(std::span<const double> rss) const = 0;
};

/// kNN-family specs get k lowered to `n` (with a warning naming `where`) when the
/// training set is smaller than k. Other specs pass through.
models::ModelSpec clamp_knn(const models::ModelSpec &spec, std::size_t n, std::string_view where);

class CascadeModel final : public Locator {
public:
  using FloorKey = std::pair<int, int>; // (building, floor)

  /// Assembles a cascade from trained parts. `bh` must be null exactly when the
  /// deployment has one building; every building needs an FH model and every floor
  /// a regressor.
  CascadeModel(CascadeSpec spec, Deployment deployment, std::size_t ap_count,
               std::unique_ptr<models::Classifier> bh,
               std::map<int, std::unique_ptr<models::Classifier>> fh,
               std::map<FloorKey, std::unique_ptr<models::Regressor>> loc);

  PositionEstimate locate(std::span<const double> rss) const override;

  const CascadeSpec &spec() const { return spec_; }
  const Deployment &deployment() const { return deployment_; }
  std::size_t ap_count() const { return ap_count_; }

  std::size_t model_count() const;
  const models::Classifier *bh_model() const { return bh_.get(); }
  const models::Classifier &fh_model(int building) const;
  const models::Regressor &loc_model(int building, int floor) const;

  nlohmann::json to_json() const;
  static CascadeModel from_json(const nlohmann::json &j);
  void save(const std::filesystem::path &path) const;
  static CascadeModel load(const std::filesystem::path &path);

private:
  CascadeSpec spec_;
  Deployment deployment_;
  std::size_t ap_count_ = 0;
  std::unique_ptr<models::Classifier> bh_;
  std::map<int, std::unique_ptr<models::Classifier>> fh_;
  std::map<FloorKey, std::unique_ptr<models::Regressor>> loc_;
};

/// Trains BH on everything (skipped for one building), one FH per building on that
/// building's samples and one regressor per floor on that floor's samples.
CascadeModel train_cascade(const RadioMap &map, const CascadeSpec &spec);

/// Stand-alone kNN over the whole radio map. Building by (weighted) majority of the
/// k neighbors, floor by (weighted) majority of the neighbors in that building,
/// coordinates by the (weighted) mean of all k neighbors.
class BenchmarkModel final : public Locator {
public:
  BenchmarkModel(models::ModelSpec spec, const RadioMap &map);

  PositionEstimate locate(std::span<const double> rss) const override;
  const models::ModelSpec &spec() const { return spec_; }
  std::size_t training_size() const { return train_.rows(); }

private:
  models::ModelSpec spec_;
  FeatureMatrix train_;
  std::vector<int> buildings_;
  std::vector<int> floors_;
  std::vector<Point2> positions_;
};

/// Throws UnsupportedBenchmarkError for families other than KNN/WKNN.
BenchmarkModel train_benchmark(const RadioMap &map, const models::ModelSpec &spec);

} // namespace cascadeloc
