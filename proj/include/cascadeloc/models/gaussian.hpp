#pragma once

#include "cascadeloc/models/model.hpp"

#include <Eigen/Dense>

namespace cascadeloc::models {

/// Diagonal Gaussian per class.
class NbClassifier final : public Classifier {
public:
  struct ClassModel {
    double log_prior = 0.0;
    std::vector<double> mean;
    std::vector<double> variance; // already includes the variance floor
  };

  NbClassifier(ModelSpec spec, std::vector<int> classes, std::vector<ClassModel> models);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<NbClassifier> from_json(const nlohmann::json &j);

  /// log prior + sum of per-feature Gaussian log-likelihoods, one entry per class.
  std::vector<double> joint_log_likelihood(std::span<const double> query) const;

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  std::vector<ClassModel> models_;
};

/// Full-covariance Gaussian per class with diagonal shrinkage.
class QdaClassifier final : public Classifier {
public:
  struct ClassModel {
    double log_prior = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cholesky; // lower factor of the (regularised) covariance
    double log_det = 0.0;
  };

  QdaClassifier(ModelSpec spec, std::vector<int> classes, std::vector<ClassModel> models);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<QdaClassifier> from_json(const nlohmann::json &j);

  std::vector<double> log_posterior_unnormalized(std::span<const double> query) const;

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  std::vector<ClassModel> models_;
};

/// Variance floor: 1e-9 times the largest per-feature variance of the whole training set.
double variance_floor(const FeatureMatrix &x);

std::unique_ptr<NbClassifier> nb_fit(const ModelSpec &spec, const FeatureMatrix &x, std::span<const int> labels);
std::unique_ptr<QdaClassifier> qda_fit(const ModelSpec &spec, const FeatureMatrix &x, std::span<const int> labels);

} // namespace cascadeloc::models
