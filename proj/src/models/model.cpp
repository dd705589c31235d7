#include "cascadeloc/models/model.hpp"

#include "cascadeloc/errors.hpp"
#include "cascadeloc/models/adaboost.hpp"
#include "cascadeloc/models/forest.hpp"
#include "cascadeloc/models/gaussian.hpp"
#include "cascadeloc/models/knn.hpp"
#include "cascadeloc/models/linear_svm.hpp"
#include "cascadeloc/models/mlp.hpp"
#include "cascadeloc/models/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace cascadeloc::models {

std::string_view to_string(Family family) {
  switch (family) {
  case Family::Knn: return "KNN";
  case Family::Wknn: return "WKNN";
  case Family::Lsvm: return "LSVM";
  case Family::Dt: return "DT";
  case Family::Rf: return "RF";
  case Family::Nn: return "NN";
  case Family::AdaBoost: return "ADABOOST";
  case Family::Nb: return "NB";
  case Family::Qda: return "QDA";
  }
  return "?";
}

std::string_view to_string(Task task) { return task == Task::Classification ? "classification" : "regression"; }

Family family_from_string(std::string_view name) {
  for (Family f : {Family::Knn, Family::Wknn, Family::Lsvm, Family::Dt, Family::Rf, Family::Nn, Family::AdaBoost,
                   Family::Nb, Family::Qda})
    if (to_string(f) == name)
      return f;
  if (name == "ADB")
    return Family::AdaBoost;
  throw ParameterError("unknown model family '" + std::string(name) + "'");
}

Task task_from_string(std::string_view name) {
  if (name == "classification")
    return Task::Classification;
  if (name == "regression")
    return Task::Regression;
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

std::string ModelSpec::label() const {
  switch (family) {
  case Family::Knn: return std::to_string(k) + "NN";
  case Family::Wknn: return "W" + std::to_string(k) + "NN";
  case Family::AdaBoost: return "ADB";
  default: return std::string(to_string(family));
  }
}

ModelSpec ModelSpec::from_label(std::string_view label, Task task, std::uint64_t seed) {
  std::string up(label);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  ModelSpec s;
  s.task = task;
  s.seed = seed;
  if (up.size() >= 3 && up.ends_with("NN") && up != "NN") {
    const bool weighted = up.front() == 'W';
    const std::string_view digits = std::string_view(up).substr(weighted ? 1 : 0, up.size() - 2 - (weighted ? 1 : 0));
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 1)
      throw ParameterError("cannot parse model label '" + std::string(label) + "'");
    s.family = weighted ? Family::Wknn : Family::Knn;
    s.k = k;
  } else {
    s.family = family_from_string(up);
  }
  s.validate();
  return s;
}

void ModelSpec::validate() const {
  if (is_knn() && k < 1)
    throw ParameterError("kNN needs k >= 1");
  if (task == Task::Regression && (family == Family::Nb || family == Family::Qda))
    throw ParameterError(std::string(to_string(family)) + " is classification-only");
}

nlohmann::json to_json(const ModelSpec &s) {
  return {{"family", to_string(s.family)},
          {"task", to_string(s.task)},
          {"k", s.k},
          {"seed", s.seed},
          {"tree",
           {{"max_depth", s.tree.max_depth},
            {"n_trees", s.tree.n_trees},
            {"bootstrap", s.tree.bootstrap},
            {"max_features", s.tree.max_features}}},
          {"mlp",
           {{"hidden", s.mlp.hidden},
            {"max_epochs", s.mlp.max_epochs},
            {"l2", s.mlp.l2},
            {"learning_rate", s.mlp.learning_rate},
            {"batch_size", s.mlp.batch_size},
            {"tol", s.mlp.tol},
            {"n_iter_no_change", s.mlp.n_iter_no_change},
            {"activation", s.mlp.activation == Activation::Relu ? "relu" : "tanh"}}},
          {"svm", {{"C", s.svm.C}, {"epochs", s.svm.epochs}, {"epsilon", s.svm.epsilon}}},
          {"boost", {{"n_estimators", s.boost.n_estimators}}},
          {"qda", {{"shrinkage", s.qda.shrinkage}, {"ridge", s.qda.ridge}}}};
}

ModelSpec spec_from_json(const nlohmann::json &j) {
  ModelSpec s;
  s.family = family_from_string(j.at("family").get<std::string>());
  s.task = task_from_string(j.at("task").get<std::string>());
  s.k = j.value("k", 1);
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("tree")) {
    const auto &t = j["tree"];
    s.tree.max_depth = t.value("max_depth", s.tree.max_depth);
    s.tree.n_trees = t.value("n_trees", s.tree.n_trees);
    s.tree.bootstrap = t.value("bootstrap", s.tree.bootstrap);
    s.tree.max_features = t.value("max_features", s.tree.max_features);
  }
  if (j.contains("mlp")) {
    const auto &m = j["mlp"];
    s.mlp.hidden = m.value("hidden", s.mlp.hidden);
    s.mlp.max_epochs = m.value("max_epochs", s.mlp.max_epochs);
    s.mlp.l2 = m.value("l2", s.mlp.l2);
    s.mlp.learning_rate = m.value("learning_rate", s.mlp.learning_rate);
    s.mlp.batch_size = m.value("batch_size", s.mlp.batch_size);
    s.mlp.tol = m.value("tol", s.mlp.tol);
    s.mlp.n_iter_no_change = m.value("n_iter_no_change", s.mlp.n_iter_no_change);
    s.mlp.activation = m.value("activation", std::string("relu")) == "tanh" ? Activation::Tanh : Activation::Relu;
  }
  if (j.contains("svm")) {
    const auto &v = j["svm"];
    s.svm.C = v.value("C", s.svm.C);
    s.svm.epochs = v.value("epochs", s.svm.epochs);
    s.svm.epsilon = v.value("epsilon", s.svm.epsilon);
  }
  if (j.contains("boost"))
    s.boost.n_estimators = j["boost"].value("n_estimators", s.boost.n_estimators);
  if (j.contains("qda")) {
    s.qda.shrinkage = j["qda"].value("shrinkage", s.qda.shrinkage);
    s.qda.ridge = j["qda"].value("ridge", s.qda.ridge);
  }
  s.validate();
  return s;
}

namespace {

std::vector<ModelSpec> roster(Task task, std::uint64_t seed, std::initializer_list<const char *> labels) {
  std::vector<ModelSpec> out;
  for (const char *l : labels)
    out.push_back(ModelSpec::from_label(l, task, seed));
  return out;
}

} // namespace

std::vector<ModelSpec> classification_roster(std::uint64_t seed) {
  return roster(Task::Classification, seed,
                {"1NN", "3NN", "W3NN", "11NN", "W11NN", "LSVM", "DT", "RF", "NN", "ADB", "NB", "QDA"});
}

std::vector<ModelSpec> regression_roster(std::uint64_t seed) {
  return roster(Task::Regression, seed, {"1NN", "3NN", "W3NN", "11NN", "W11NN", "LSVM", "DT", "RF", "NN", "ADB"});
}

std::unique_ptr<Classifier> fit_classifier(const ModelSpec &spec, const FeatureMatrix &features,
                                           std::span<const int> labels) {
  spec.validate();
  if (spec.task != Task::Classification)
    throw ParameterError("fit_classifier called with a regression spec (" + spec.label() + ")");
  if (features.rows() == 0 || labels.size() != features.rows())
    throw DimensionError("classifier: features and labels disagree or are empty");
  switch (spec.family) {
  case Family::Knn:
  case Family::Wknn:
    return std::make_unique<KnnClassifier>(spec, features, std::vector<int>(labels.begin(), labels.end()));
  case Family::Lsvm: return lsvm_fit_classifier(spec, features, labels);
  case Family::Dt: return dt_fit_classifier(spec, features, labels);
  case Family::Rf: return rf_fit_classifier(spec, features, labels);
  case Family::Nn: return nn_fit_classifier(spec, features, labels);
  case Family::AdaBoost: return adaboost_fit_classifier(spec, features, labels);
  case Family::Nb: return nb_fit(spec, features, labels);
  case Family::Qda: return qda_fit(spec, features, labels);
  }
  throw ParameterError("unsupported classifier family");
}

std::unique_ptr<Regressor> fit_regressor(const ModelSpec &spec, const FeatureMatrix &features,
                                         std::span<const Point2> targets) {
  spec.validate();
  if (spec.task != Task::Regression)
    throw ParameterError("fit_regressor called with a classification spec (" + spec.label() + ")");
  if (features.rows() == 0 || targets.size() != features.rows())
    throw DimensionError("regressor: features and targets disagree or are empty");
  switch (spec.family) {
  case Family::Knn:
  case Family::Wknn:
    return std::make_unique<KnnRegressor>(spec, features, std::vector<Point2>(targets.begin(), targets.end()));
  case Family::Lsvm: return lsvm_fit_regressor(spec, features, targets);
  case Family::Dt: return dt_fit_regressor(spec, features, targets);
  case Family::Rf: return rf_fit_regressor(spec, features, targets);
  case Family::Nn: return nn_fit_regressor(spec, features, targets);
  case Family::AdaBoost: return adaboost_fit_regressor(spec, features, targets);
  default: break;
  }
  throw ParameterError(std::string(to_string(spec.family)) + " has no regression variant");
}

namespace {

void check_version(const nlohmann::json &j) {
  const int v = j.value("version", 0);
  if (v != kSerializationVersion)
    throw SchemaError("unsupported model blob version " + std::to_string(v));
}

} // namespace

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json &j) {
  check_version(j);
  const ModelSpec spec = spec_from_json(j.at("spec"));
  switch (spec.family) {
  case Family::Knn:
  case Family::Wknn: return KnnClassifier::from_json(j);
  case Family::Lsvm: return LsvmClassifier::from_json(j);
  case Family::Dt: return DtClassifier::from_json(j);
  case Family::Rf: return RfClassifier::from_json(j);
  case Family::Nn: return MlpClassifier::from_json(j);
  case Family::AdaBoost: return AdaBoostClassifier::from_json(j);
  case Family::Nb: return NbClassifier::from_json(j);
  case Family::Qda: return QdaClassifier::from_json(j);
  }
  throw SchemaError("unknown classifier family in blob");
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json &j) {
  check_version(j);
  const ModelSpec spec = spec_from_json(j.at("spec"));
  switch (spec.family) {
  case Family::Knn:
  case Family::Wknn: return KnnRegressor::from_json(j);
  case Family::Lsvm: return LsvmRegressor::from_json(j);
  case Family::Dt: return DtRegressor::from_json(j);
  case Family::Rf: return RfRegressor::from_json(j);
  case Family::Nn: return MlpRegressor::from_json(j);
  case Family::AdaBoost: return AdaBoostRegressor::from_json(j);
  default: break;
  }
  throw SchemaError("unknown regressor family in blob");
}

nlohmann::json matrix_to_json(const FeatureMatrix &m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

FeatureMatrix matrix_from_json(const nlohmann::json &j) {
  return FeatureMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                       j.at("data").get<std::vector<double>>());
}

LabelEncoding encode_labels(std::span<const int> labels) {
  LabelEncoding enc;
  enc.classes.assign(labels.begin(), labels.end());
  std::sort(enc.classes.begin(), enc.classes.end());
  enc.classes.erase(std::unique(enc.classes.begin(), enc.classes.end()), enc.classes.end());
  enc.codes.reserve(labels.size());
  for (int l : labels)
    enc.codes.push_back(
        static_cast<int>(std::lower_bound(enc.classes.begin(), enc.classes.end(), l) - enc.classes.begin()));
  return enc;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best])
      best = i;
  return best;
}

} // namespace cascadeloc::models
