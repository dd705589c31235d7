#pragma once

#include "cascadeloc/models/model.hpp"

namespace cascadeloc::models {

/// w . [x, 1]; the bias is the last weight and is regularised like the others.
struct LinearMachine {
  std::vector<double> weights;
  double score(std::span<const double> x) const;
};

struct PegasosOptions {
  double lambda = 1e-3;
  int epochs = 1000;
  std::uint64_t seed = 0;
};

/// Stochastic subgradient descent on lambda/2 |w|^2 + mean hinge(y w.x), step 1/(lambda t),
/// with projection onto the ball of radius 1/sqrt(lambda). `signs` are +1 / -1.
LinearMachine pegasos_hinge(const FeatureMatrix &x, std::span<const double> signs, const PegasosOptions &opt);

/// Same schedule on lambda/2 |w|^2 + mean max(0, |y - w.x| - epsilon).
LinearMachine pegasos_epsilon_insensitive(const FeatureMatrix &x, std::span<const double> targets, double epsilon,
                                          const PegasosOptions &opt);

/// One-vs-rest linear SVM; predicts the class with the highest score.
class LsvmClassifier final : public Classifier {
public:
  LsvmClassifier(ModelSpec spec, std::vector<int> classes, std::vector<LinearMachine> machines);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LsvmClassifier> from_json(const nlohmann::json &j);

  /// Zero machines for a single-class model.
  const std::vector<LinearMachine> &machines() const { return machines_; }
  std::vector<double> scores(std::span<const double> query) const;

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  std::vector<LinearMachine> machines_;
};

/// Independent epsilon-insensitive linear regressions for x and y.
class LsvmRegressor final : public Regressor {
public:
  LsvmRegressor(ModelSpec spec, LinearMachine mx, LinearMachine my);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LsvmRegressor> from_json(const nlohmann::json &j);

private:
  ModelSpec spec_;
  LinearMachine mx_, my_;
};

/// lambda = 1 / (C n), the usual mapping from the C-parameterised SVM objective.
double pegasos_lambda(double C, std::size_t n);

std::unique_ptr<LsvmClassifier> lsvm_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                    std::span<const int> labels);
std::unique_ptr<LsvmRegressor> lsvm_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                                  std::span<const Point2> targets);

} // namespace cascadeloc::models
