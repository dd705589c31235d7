#include "cascadeloc/models/adaboost.hpp"

#include "cascadeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cascadeloc::models {

namespace {

const DecisionTree::Options kStump{1, 0};

void normalize(std::vector<double> &w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double &x : w)
    x /= s;
}

} // namespace

SammeRound samme_round(const FeatureMatrix &x, std::span<const int> codes, int n_classes,
                       std::span<const double> weights) {
  SammeRound r;
  r.stump = DecisionTree::fit_classifier(x, codes, n_classes, weights, kStump, nullptr);
  std::vector<char> miss(x.rows(), 0);
  double wsum = 0.0, werr = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    miss[i] = r.stump.predict_code(x.row(i)) != codes[i];
    wsum += weights[i];
    werr += miss[i] ? weights[i] : 0.0;
  }
  r.error = werr / wsum;
  r.updated_weights.assign(weights.begin(), weights.end());
  if (r.error <= 0.0) {
    r.alpha = 1.0;
  } else {
    r.alpha = std::log((1.0 - r.error) / r.error) + std::log(static_cast<double>(n_classes) - 1.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (miss[i])
        r.updated_weights[i] *= std::exp(r.alpha);
  }
  normalize(r.updated_weights);
  return r;
}

AdaBoostClassifier::AdaBoostClassifier(ModelSpec spec, std::vector<int> classes, std::vector<Stage> stages,
                                       int fallback_code)
    : spec_(std::move(spec)), classes_(std::move(classes)), stages_(std::move(stages)),
      fallback_code_(fallback_code) {}

int AdaBoostClassifier::predict(std::span<const double> query) const {
  if (stages_.empty())
    return classes_[static_cast<std::size_t>(fallback_code_)];
  std::vector<double> score(classes_.size(), 0.0);
  for (const auto &s : stages_)
    score[static_cast<std::size_t>(s.stump.predict_code(query))] += s.alpha;
  return classes_[argmax(score)];
}

nlohmann::json AdaBoostClassifier::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto &s : stages_)
    st.push_back({{"alpha", s.alpha}, {"stump", s.stump.to_json()}});
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"classes", classes_},
          {"fallback", fallback_code_},
          {"stages", st}};
}

std::unique_ptr<AdaBoostClassifier> AdaBoostClassifier::from_json(const nlohmann::json &j) {
  std::vector<Stage> st;
  for (const auto &s : j.at("stages"))
    st.push_back({DecisionTree::from_json(s.at("stump")), s.at("alpha").get<double>()});
  return std::make_unique<AdaBoostClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                              std::move(st), j.at("fallback").get<int>());
}

std::unique_ptr<AdaBoostClassifier> adaboost_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                            std::span<const int> labels) {
  if (x.rows() == 0 || labels.size() != x.rows())
    throw DimensionError("AdaBoost: features and labels disagree or are empty");
  if (spec.boost.n_estimators < 1)
    throw ParameterError("AdaBoost needs at least one estimator");
  const LabelEncoding enc = encode_labels(labels);
  const int K = static_cast<int>(enc.classes.size());
  std::vector<double> w(x.rows(), 1.0 / static_cast<double>(x.rows()));

  std::vector<double> prior(static_cast<std::size_t>(K), 0.0);
  for (int c : enc.codes)
    prior[static_cast<std::size_t>(c)] += 1.0;
  const int fallback = static_cast<int>(argmax(prior));

  std::vector<AdaBoostClassifier::Stage> stages;
  if (K == 1) {
    stages.push_back({DecisionTree::fit_classifier(x, enc.codes, 1, w, kStump, nullptr), 1.0});
    return std::make_unique<AdaBoostClassifier>(spec, enc.classes, std::move(stages), fallback);
  }
  const double chance = 1.0 - 1.0 / static_cast<double>(K);
  for (int m = 0; m < spec.boost.n_estimators; ++m) {
    SammeRound r = samme_round(x, enc.codes, K, w);
    if (r.error >= chance)
      break; // no better than chance: discard and halt
    stages.push_back({std::move(r.stump), r.alpha});
    if (r.error <= 0.0)
      break;
    w = std::move(r.updated_weights);
  }
  return std::make_unique<AdaBoostClassifier>(spec, enc.classes, std::move(stages), fallback);
}

AdaBoostRegressor::AdaBoostRegressor(ModelSpec spec, std::vector<Stage> stages)
    : spec_(std::move(spec)), stages_(std::move(stages)) {}

namespace {

double weighted_median(std::vector<std::pair<double, double>> &value_weight) {
  std::sort(value_weight.begin(), value_weight.end());
  double total = 0.0;
  for (const auto &[v, w] : value_weight)
    total += w;
  double acc = 0.0;
  for (const auto &[v, w] : value_weight) {
    acc += w;
    if (acc >= 0.5 * total)
      return v;
  }
  return value_weight.back().first;
}

} // namespace

Point2 AdaBoostRegressor::predict(std::span<const double> query) const {
  std::vector<std::pair<double, double>> xs, ys;
  xs.reserve(stages_.size());
  ys.reserve(stages_.size());
  for (const auto &s : stages_) {
    const Point2 p = s.stump.predict_value(query);
    xs.emplace_back(p.x, s.weight);
    ys.emplace_back(p.y, s.weight);
  }
  return {weighted_median(xs), weighted_median(ys)};
}

nlohmann::json AdaBoostRegressor::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto &s : stages_)
    st.push_back({{"weight", s.weight}, {"stump", s.stump.to_json()}});
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"stages", st}};
}

std::unique_ptr<AdaBoostRegressor> AdaBoostRegressor::from_json(const nlohmann::json &j) {
  std::vector<Stage> st;
  for (const auto &s : j.at("stages"))
    st.push_back({DecisionTree::from_json(s.at("stump")), s.at("weight").get<double>()});
  return std::make_unique<AdaBoostRegressor>(spec_from_json(j.at("spec")), std::move(st));
}

std::unique_ptr<AdaBoostRegressor> adaboost_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                                          std::span<const Point2> targets) {
  if (x.rows() == 0 || targets.size() != x.rows())
    throw DimensionError("AdaBoost: features and targets disagree or are empty");
  if (spec.boost.n_estimators < 1)
    throw ParameterError("AdaBoost needs at least one estimator");
  const std::size_t n = x.rows();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(spec.seed);
  std::vector<AdaBoostRegressor::Stage> stages;
  std::vector<double> err(n);

  for (int m = 0; m < spec.boost.n_estimators; ++m) {
    // weighted bootstrap
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::vector<double> counts(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      counts[pick(rng)] += 1.0;
    DecisionTree stump = DecisionTree::fit_regressor(x, targets, counts, kStump, nullptr);

    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = stump.predict_value(x.row(i));
      err[i] = std::hypot(p.x - targets[i].x, p.y - targets[i].y);
      max_err = std::max(max_err, err[i]);
    }
    if (max_err <= 0.0) {
      stages.push_back({std::move(stump), 1.0});
      break;
    }
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      avg += w[i] * err[i] / max_err;
    if (avg >= 0.5) {
      if (stages.empty())
        stages.push_back({std::move(stump), 1.0});
      break;
    }
    const double beta = avg / (1.0 - avg);
    stages.push_back({std::move(stump), std::log(1.0 / beta)});
    for (std::size_t i = 0; i < n; ++i)
      w[i] *= std::pow(beta, 1.0 - err[i] / max_err);
    normalize(w);
  }
  return std::make_unique<AdaBoostRegressor>(spec, std::move(stages));
}

} // namespace cascadeloc::models
