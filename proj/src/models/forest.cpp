#include "cascadeloc/models/forest.hpp"

#include "cascadeloc/errors.hpp"

#include <cmath>

namespace cascadeloc::models {

namespace {

DecisionTree::Options forest_options(const ModelSpec &spec, std::size_t d) {
  DecisionTree::Options opt;
  opt.max_depth = spec.tree.max_depth;
  opt.max_features = spec.tree.max_features > 0
                         ? spec.tree.max_features
                         : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  return opt;
}

std::vector<double> bootstrap_weights(std::size_t n, std::mt19937_64 &rng) {
  std::vector<double> w(n, 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t i = 0; i < n; ++i)
    w[pick(rng)] += 1.0;
  return w;
}

nlohmann::json trees_to_json(const std::vector<DecisionTree> &trees) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto &t : trees)
    a.push_back(t.to_json());
  return a;
}

std::vector<DecisionTree> trees_from_json(const nlohmann::json &a) {
  std::vector<DecisionTree> out;
  for (const auto &t : a)
    out.push_back(DecisionTree::from_json(t));
  return out;
}

} // namespace

RfClassifier::RfClassifier(ModelSpec spec, std::vector<int> classes, std::vector<DecisionTree> trees)
    : spec_(std::move(spec)), classes_(std::move(classes)), trees_(std::move(trees)) {}

int RfClassifier::predict(std::span<const double> query) const {
  std::vector<double> votes(classes_.size(), 0.0);
  for (const auto &t : trees_)
    votes[static_cast<std::size_t>(t.predict_code(query))] += 1.0;
  return classes_[argmax(votes)];
}

nlohmann::json RfClassifier::to_json() const {
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"classes", classes_},
          {"trees", trees_to_json(trees_)}};
}

std::unique_ptr<RfClassifier> RfClassifier::from_json(const nlohmann::json &j) {
  return std::make_unique<RfClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                        trees_from_json(j.at("trees")));
}

RfRegressor::RfRegressor(ModelSpec spec, std::vector<DecisionTree> trees)
    : spec_(std::move(spec)), trees_(std::move(trees)) {}

Point2 RfRegressor::predict(std::span<const double> query) const {
  Point2 sum;
  for (const auto &t : trees_) {
    const Point2 p = t.predict_value(query);
    sum.x += p.x;
    sum.y += p.y;
  }
  const auto n = static_cast<double>(trees_.size());
  return {sum.x / n, sum.y / n};
}

nlohmann::json RfRegressor::to_json() const {
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"trees", trees_to_json(trees_)}};
}

std::unique_ptr<RfRegressor> RfRegressor::from_json(const nlohmann::json &j) {
  return std::make_unique<RfRegressor>(spec_from_json(j.at("spec")), trees_from_json(j.at("trees")));
}

std::unique_ptr<RfClassifier> rf_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                std::span<const int> labels) {
  if (spec.tree.n_trees < 1)
    throw ParameterError("random forest needs at least one tree");
  const LabelEncoding enc = encode_labels(labels);
  const auto opt = forest_options(spec, x.cols());
  std::mt19937_64 rng(spec.seed);
  std::vector<DecisionTree> trees;
  for (int t = 0; t < spec.tree.n_trees; ++t) {
    std::vector<double> w;
    if (spec.tree.bootstrap)
      w = bootstrap_weights(x.rows(), rng);
    trees.push_back(
        DecisionTree::fit_classifier(x, enc.codes, static_cast<int>(enc.classes.size()), w, opt, &rng));
  }
  return std::make_unique<RfClassifier>(spec, enc.classes, std::move(trees));
}

std::unique_ptr<RfRegressor> rf_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                              std::span<const Point2> targets) {
  if (spec.tree.n_trees < 1)
    throw ParameterError("random forest needs at least one tree");
  const auto opt = forest_options(spec, x.cols());
  std::mt19937_64 rng(spec.seed);
  std::vector<DecisionTree> trees;
  for (int t = 0; t < spec.tree.n_trees; ++t) {
    std::vector<double> w;
    if (spec.tree.bootstrap)
      w = bootstrap_weights(x.rows(), rng);
    trees.push_back(DecisionTree::fit_regressor(x, targets, w, opt, &rng));
  }
  return std::make_unique<RfRegressor>(spec, std::move(trees));
}

} // namespace cascadeloc::models
