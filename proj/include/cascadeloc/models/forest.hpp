#pragma once

#include "cascadeloc/models/tree.hpp"

namespace cascadeloc::models {

class RfClassifier final : public Classifier {
public:
  RfClassifier(ModelSpec spec, std::vector<int> classes, std::vector<DecisionTree> trees);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<RfClassifier> from_json(const nlohmann::json &j);
  const std::vector<DecisionTree> &trees() const { return trees_; }

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  std::vector<DecisionTree> trees_;
};

class RfRegressor final : public Regressor {
public:
  RfRegressor(ModelSpec spec, std::vector<DecisionTree> trees);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<RfRegressor> from_json(const nlohmann::json &j);
  const std::vector<DecisionTree> &trees() const { return trees_; }

private:
  ModelSpec spec_;
  std::vector<DecisionTree> trees_;
};

/// Bagged CART trees with floor(sqrt(d)) candidate features per split unless
/// spec.tree.max_features says otherwise. Majority vote / mean over trees.
std::unique_ptr<RfClassifier> rf_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                std::span<const int> labels);
std::unique_ptr<RfRegressor> rf_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                              std::span<const Point2> targets);

} // namespace cascadeloc::models
