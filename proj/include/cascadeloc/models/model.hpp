#pragma once

#include "cascadeloc/datamodel.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascadeloc::models {

enum class Family { Knn, Wknn, Lsvm, Dt, Rf, Nn, AdaBoost, Nb, Qda };
enum class Task { Classification, Regression };
enum class Activation { Relu, Tanh };

std::string_view to_string(Family family);
std::string_view to_string(Task task);
Family family_from_string(std::string_view name);
Task task_from_string(std::string_view name);

struct TreeParams {
  int max_depth = 50;
  int n_trees = 10;     // RF only
  bool bootstrap = true; // RF only
  // RF: features examined per split, 0 means floor(sqrt(d)). DT: 0 means all features.
  int max_features = 0;
  friend bool operator==(const TreeParams &, const TreeParams &) = default;
};

struct MlpParams {
  int hidden = 100;
  int max_epochs = 100;
  double l2 = 1e-4; // on hidden-layer weights
  double learning_rate = 1e-3;
  int batch_size = 200;
  double tol = 1e-6;
  int n_iter_no_change = 10;
  Activation activation = Activation::Relu;
  friend bool operator==(const MlpParams &, const MlpParams &) = default;
};

struct SvmParams {
  double C = 1.0;
  int epochs = 1000;
  double epsilon = 0.0; // regression insensitivity, meters
  friend bool operator==(const SvmParams &, const SvmParams &) = default;
};

struct BoostParams {
  int n_estimators = 50;
  friend bool operator==(const BoostParams &, const BoostParams &) = default;
};

struct QdaParams {
  double shrinkage = 0.1;
  double ridge = 1e-6;
  friend bool operator==(const QdaParams &, const QdaParams &) = default;
};

/// One model family plus its hyperparameters; the unit of a validation sweep.
struct ModelSpec {
  Family family = Family::Knn;
  Task task = Task::Classification;
  int k = 1; // KNN/WKNN
  std::uint64_t seed = 0;
  TreeParams tree;
  MlpParams mlp;
  SvmParams svm;
  BoostParams boost;
  QdaParams qda;

  /// Short column label: 1NN, W3NN, LSVM, DT, RF, NN, ADB, NB, QDA.
  std::string label() const;
  bool is_knn() const { return family == Family::Knn || family == Family::Wknn; }

  /// Parses a label such as "w3nn" or "ADB". Case-insensitive.
  static ModelSpec from_label(std::string_view label, Task task, std::uint64_t seed = 0);

  /// Throws ParameterError for combinations outside the supported roster
  /// (e.g. NB regression, k < 1).
  void validate() const;

  friend bool operator==(const ModelSpec &, const ModelSpec &) = default;
};

nlohmann::json to_json(const ModelSpec &spec);
ModelSpec spec_from_json(const nlohmann::json &j);

/// 1NN, 3NN, W3NN, 11NN, W11NN, LSVM, DT, RF, NN, ADB, NB, QDA.
std::vector<ModelSpec> classification_roster(std::uint64_t seed = 0);
/// 1NN, 3NN, W3NN, 11NN, W11NN, LSVM, DT, RF, NN, ADB.
std::vector<ModelSpec> regression_roster(std::uint64_t seed = 0);

class Classifier {
public:
  virtual ~Classifier() = default;
  virtual int predict(std::span<const double> query) const = 0;
  /// Sorted label set seen at fit time.
  virtual const std::vector<int> &classes() const = 0;
  virtual const ModelSpec &spec() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

class Regressor {
public:
  virtual ~Regressor() = default;
  virtual Point2 predict(std::span<const double> query) const = 0;
  virtual const ModelSpec &spec() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

/// Trains the classifier described by `spec` (spec.task must be Classification).
std::unique_ptr<Classifier> fit_classifier(const ModelSpec &spec, const FeatureMatrix &features,
                                           std::span<const int> labels);

/// Trains the 2-output regressor described by `spec` (spec.task must be Regression).
std::unique_ptr<Regressor> fit_regressor(const ModelSpec &spec, const FeatureMatrix &features,
                                         std::span<const Point2> targets);

inline constexpr int kSerializationVersion = 1;

/// Inverse of Classifier::to_json / Regressor::to_json.
std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json &j);
std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json &j);

// Helpers shared by the implementations.
nlohmann::json matrix_to_json(const FeatureMatrix &m);
FeatureMatrix matrix_from_json(const nlohmann::json &j);

/// Sorted unique labels and each sample's index into them.
struct LabelEncoding {
  std::vector<int> classes;
  std::vector<int> codes;
};
LabelEncoding encode_labels(std::span<const int> labels);

/// Index of the largest entry; exact ties resolve to the lowest index.
std::size_t argmax(std::span<const double> scores);

} // namespace cascadeloc::models
