#pragma once

#include "cascadeloc/models/model.hpp"

namespace cascadeloc::models {

struct Neighbor {
  double distance = 0.0;
  std::size_t index = 0;
};

/// The k training rows closest to `query` under Manhattan distance, ordered by
/// (distance, index). Equal distances at the k-th rank keep the lowest index.
/// Throws ParameterError when k is 0 or exceeds the training size.
std::vector<Neighbor> nearest_neighbors(const FeatureMatrix &train, std::span<const double> query, std::size_t k);

/// Majority vote (inverse-distance weighted when `weighted`). An exact match wins
/// outright in weighted mode; vote ties go to the lowest label.
int knn_classify(const FeatureMatrix &train, std::span<const int> labels, std::span<const double> query,
                 std::size_t k, bool weighted);

/// Mean of neighbor coordinates (inverse-distance weighted when `weighted`).
Point2 knn_regress(const FeatureMatrix &train, std::span<const Point2> targets, std::span<const double> query,
                   std::size_t k, bool weighted);

/// Label vote over an already-ranked neighborhood.
int vote(std::span<const Neighbor> neighbors, std::span<const int> labels, bool weighted);
Point2 average(std::span<const Neighbor> neighbors, std::span<const Point2> targets, bool weighted);

class KnnClassifier final : public Classifier {
public:
  KnnClassifier(ModelSpec spec, FeatureMatrix train, std::vector<int> labels);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnClassifier> from_json(const nlohmann::json &j);

  std::size_t training_size() const { return train_.rows(); }

private:
  ModelSpec spec_;
  FeatureMatrix train_;
  std::vector<int> labels_;
  std::vector<int> classes_;
};

class KnnRegressor final : public Regressor {
public:
  KnnRegressor(ModelSpec spec, FeatureMatrix train, std::vector<Point2> targets);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnRegressor> from_json(const nlohmann::json &j);

  /// Rows scanned per prediction.
  std::size_t training_size() const { return train_.rows(); }

private:
  ModelSpec spec_;
  FeatureMatrix train_;
  std::vector<Point2> targets_;
};

} // namespace cascadeloc::models
