#pragma once

#include "cascadeloc/models/tree.hpp"

namespace cascadeloc::models {

/// Multi-class SAMME over depth-1 stumps.
class AdaBoostClassifier final : public Classifier {
public:
  struct Stage {
    DecisionTree stump;
    double alpha = 0.0;
  };

  AdaBoostClassifier(ModelSpec spec, std::vector<int> classes, std::vector<Stage> stages, int fallback_code);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<AdaBoostClassifier> from_json(const nlohmann::json &j);
  const std::vector<Stage> &stages() const { return stages_; }

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  std::vector<Stage> stages_;
  int fallback_code_; // weighted majority class, used when no stage survived
};

/// AdaBoost.R2 (linear loss) over depth-1 regression stumps; weighted median per coordinate.
class AdaBoostRegressor final : public Regressor {
public:
  struct Stage {
    DecisionTree stump;
    double weight = 0.0; // log(1 / beta)
  };

  AdaBoostRegressor(ModelSpec spec, std::vector<Stage> stages);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<AdaBoostRegressor> from_json(const nlohmann::json &j);
  const std::vector<Stage> &stages() const { return stages_; }

private:
  ModelSpec spec_;
  std::vector<Stage> stages_;
};

struct SammeRound {
  DecisionTree stump;
  double error = 0.0;
  double alpha = 0.0;
  std::vector<double> updated_weights; // normalised
};

/// One boosting round on the given (normalised) sample weights.
SammeRound samme_round(const FeatureMatrix &x, std::span<const int> codes, int n_classes,
                       std::span<const double> weights);

std::unique_ptr<AdaBoostClassifier> adaboost_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                            std::span<const int> labels);
std::unique_ptr<AdaBoostRegressor> adaboost_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                                          std::span<const Point2> targets);

} // namespace cascadeloc::models
