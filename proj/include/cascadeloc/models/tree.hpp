#pragma once

#include "cascadeloc/models/model.hpp"

#include <random>

namespace cascadeloc::models {

/// Gini impurity of a weighted class histogram.
double gini_impurity(std::span<const double> class_weights);
/// Convenience overload over raw labels, unit weights.
double gini_impurity(std::span<const int> labels);

/// CART tree with exhaustive midpoint threshold search. Classification leaves hold a
/// class index, regression leaves a mean 2D target.
class DecisionTree {
public:
  struct Node {
    int feature = -1; // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;      // class index (classification)
    Point2 value;       // mean target (regression)
  };

  struct Options {
    int max_depth = 50;
    // Number of non-constant features to examine per split; 0 or >= d means all,
    // in ascending feature order. Otherwise features are visited in a random order.
    int max_features = 0;
  };

  /// `codes` are class indices in [0, n_classes). `weights` may be empty (unit weights);
  /// zero-weight samples are ignored.
  static DecisionTree fit_classifier(const FeatureMatrix &x, std::span<const int> codes, int n_classes,
                                     std::span<const double> weights, const Options &opt, std::mt19937_64 *rng);
  static DecisionTree fit_regressor(const FeatureMatrix &x, std::span<const Point2> targets,
                                    std::span<const double> weights, const Options &opt, std::mt19937_64 *rng);

  int predict_code(std::span<const double> query) const { return nodes_[leaf(query)].label; }
  Point2 predict_value(std::span<const double> query) const { return nodes_[leaf(query)].value; }

  int depth() const;
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Node> &nodes() const { return nodes_; }

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json &j);

  friend bool operator==(const DecisionTree &a, const DecisionTree &b);

private:
  std::size_t leaf(std::span<const double> query) const {
    std::size_t n = 0;
    while (nodes_[n].feature >= 0)
      n = static_cast<std::size_t>(query[static_cast<std::size_t>(nodes_[n].feature)] <= nodes_[n].threshold
                                       ? nodes_[n].left
                                       : nodes_[n].right);
    return n;
  }

  std::vector<Node> nodes_;
  friend class TreeBuilder;
};

class DtClassifier final : public Classifier {
public:
  DtClassifier(ModelSpec spec, std::vector<int> classes, DecisionTree tree);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<DtClassifier> from_json(const nlohmann::json &j);
  const DecisionTree &tree() const { return tree_; }

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  DecisionTree tree_;
};

class DtRegressor final : public Regressor {
public:
  DtRegressor(ModelSpec spec, DecisionTree tree);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<DtRegressor> from_json(const nlohmann::json &j);
  const DecisionTree &tree() const { return tree_; }

private:
  ModelSpec spec_;
  DecisionTree tree_;
};

std::unique_ptr<DtClassifier> dt_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                std::span<const int> labels);
std::unique_ptr<DtRegressor> dt_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                              std::span<const Point2> targets);

} // namespace cascadeloc::models
