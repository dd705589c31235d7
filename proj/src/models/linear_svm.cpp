#include "cascadeloc/models/linear_svm.hpp"

#include "cascadeloc/errors.hpp"
#include "cascadeloc/log.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cascadeloc::models {

double LinearMachine::score(std::span<const double> x) const {
  double s = weights.back();
  for (std::size_t j = 0; j < x.size(); ++j)
    s += weights[j] * x[j];
  return s;
}

namespace {

// w = scale * v, which makes the per-step shrink O(1).
class ScaledVector {
public:
  explicit ScaledVector(std::size_t dim) : v_(dim + 1, 0.0) {}

  double dot(std::span<const double> x) const {
    double s = v_.back();
    for (std::size_t j = 0; j < x.size(); ++j)
      s += v_[j] * x[j];
    return scale_ * s;
  }

  void shrink(double factor) {
    if (factor <= 0.0) {
      std::fill(v_.begin(), v_.end(), 0.0);
      scale_ = 1.0;
      norm2_ = 0.0;
      return;
    }
    scale_ *= factor;
    if (scale_ < 1e-9)
      renormalize();
  }

  // w += coef * [x, 1]
  void add(double coef, std::span<const double> x) {
    const double c = coef / scale_;
    double vx = v_.back(), xx = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      vx += v_[j] * x[j];
      xx += x[j] * x[j];
    }
    for (std::size_t j = 0; j < x.size(); ++j)
      v_[j] += c * x[j];
    v_.back() += c;
    norm2_ += 2.0 * c * vx + c * c * xx;
    norm2_ = std::max(norm2_, 0.0);
  }

  void project(double radius) {
    const double norm = scale_ * std::sqrt(norm2_);
    if (norm > radius && norm > 0.0) {
      scale_ *= radius / norm;
      if (scale_ < 1e-9)
        renormalize();
    }
  }

  // acc += weight * w
  void accumulate_into(std::vector<double> &acc) const {
    for (std::size_t j = 0; j < v_.size(); ++j)
      acc[j] += scale_ * v_[j];
  }

  LinearMachine materialize() const {
    LinearMachine m;
    m.weights.resize(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j)
      m.weights[j] = scale_ * v_[j];
    return m;
  }

private:
  void renormalize() {
    for (double &x : v_)
      x *= scale_;
    norm2_ *= scale_ * scale_;
    scale_ = 1.0;
  }

  std::vector<double> v_;
  double scale_ = 1.0;
  double norm2_ = 0.0;
};

template <class Update>
LinearMachine run_pegasos(const FeatureMatrix &x, const PegasosOptions &opt, double radius, Update update) {
  if (x.rows() == 0)
    throw ParameterError("linear SVM: empty training set");
  if (!(opt.lambda > 0.0))
    throw ParameterError("linear SVM: lambda must be positive");
  // Optimise over mean-centred features; the bias is shifted back at the end.
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      mean[j] += x(i, j);
  for (double &m : mean)
    m /= static_cast<double>(x.rows());
  FeatureMatrix centred = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      centred(i, j) -= mean[j];
  auto uncentre = [&](LinearMachine m) {
    for (std::size_t j = 0; j < d; ++j)
      m.weights.back() -= m.weights[j] * mean[j];
    return m;
  };
  ScaledVector w(x.cols());
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opt.seed);
  // The returned machine averages the iterates of the second half of training.
  const long long total = static_cast<long long>(opt.epochs) * static_cast<long long>(x.rows());
  const long long average_from = total / 2 + 1;
  std::vector<double> average(x.cols() + 1, 0.0);
  long long t = 0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (opt.lambda * static_cast<double>(t));
      const auto row = centred.row(i);
      const double coef = update(i, w.dot(row)) * eta;
      w.shrink(1.0 - eta * opt.lambda);
      if (coef != 0.0)
        w.add(coef, row);
      w.project(radius);
      if (t >= average_from)
        w.accumulate_into(average);
    }
  }
  if (total == 0)
    return uncentre(w.materialize());
  const double count = static_cast<double>(total - average_from + 1);
  for (double &a : average)
    a /= count;
  return uncentre({average});
}

} // namespace

LinearMachine pegasos_hinge(const FeatureMatrix &x, std::span<const double> signs, const PegasosOptions &opt) {
  if (signs.size() != x.rows())
    throw DimensionError("linear SVM: label count differs from sample count");
  return run_pegasos(x, opt, 1.0 / std::sqrt(opt.lambda),
                     [&](std::size_t i, double score) { return signs[i] * score < 1.0 ? signs[i] : 0.0; });
}

LinearMachine pegasos_epsilon_insensitive(const FeatureMatrix &x, std::span<const double> targets, double epsilon,
                                          const PegasosOptions &opt) {
  if (targets.size() != x.rows())
    throw DimensionError("linear SVR: target count differs from sample count");
  // The optimum satisfies lambda/2 |w|^2 <= objective(0) = mean(max(|y| - eps, 0)).
  double at_zero = 0.0;
  for (double y : targets)
    at_zero += std::max(std::abs(y) - epsilon, 0.0);
  at_zero /= static_cast<double>(targets.size());
  const double radius = std::sqrt(2.0 * at_zero / opt.lambda);
  return run_pegasos(x, opt, radius, [&](std::size_t i, double score) {
    const double r = targets[i] - score;
    if (std::abs(r) <= epsilon)
      return 0.0;
    return r > 0.0 ? 1.0 : -1.0;
  });
}

double pegasos_lambda(double C, std::size_t n) {
  if (!(C > 0.0))
    throw ParameterError("linear SVM: C must be positive");
  return 1.0 / (C * static_cast<double>(n));
}

namespace {

nlohmann::json machine_json(const LinearMachine &m) { return m.weights; }
LinearMachine machine_from(const nlohmann::json &j) { return {j.get<std::vector<double>>()}; }

} // namespace

LsvmClassifier::LsvmClassifier(ModelSpec spec, std::vector<int> classes, std::vector<LinearMachine> machines)
    : spec_(std::move(spec)), classes_(std::move(classes)), machines_(std::move(machines)) {}

std::vector<double> LsvmClassifier::scores(std::span<const double> query) const {
  std::vector<double> s;
  s.reserve(machines_.size());
  for (const auto &m : machines_) {
    if (query.size() + 1 != m.weights.size())
      throw DimensionError("linear SVM: query dimension mismatch");
    s.push_back(m.score(query));
  }
  return s;
}

int LsvmClassifier::predict(std::span<const double> query) const {
  if (machines_.empty())
    return classes_.front();
  return classes_[argmax(scores(query))];
}

nlohmann::json LsvmClassifier::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto &m : machines_)
    ms.push_back(machine_json(m));
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"classes", classes_}, {"machines", ms}};
}

std::unique_ptr<LsvmClassifier> LsvmClassifier::from_json(const nlohmann::json &j) {
  std::vector<LinearMachine> ms;
  for (const auto &m : j.at("machines"))
    ms.push_back(machine_from(m));
  return std::make_unique<LsvmClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                          std::move(ms));
}

LsvmRegressor::LsvmRegressor(ModelSpec spec, LinearMachine mx, LinearMachine my)
    : spec_(std::move(spec)), mx_(std::move(mx)), my_(std::move(my)) {}

Point2 LsvmRegressor::predict(std::span<const double> query) const {
  if (query.size() + 1 != mx_.weights.size())
    throw DimensionError("linear SVR: query dimension mismatch");
  return {mx_.score(query), my_.score(query)};
}

nlohmann::json LsvmRegressor::to_json() const {
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"mx", machine_json(mx_)},
          {"my", machine_json(my_)}};
}

std::unique_ptr<LsvmRegressor> LsvmRegressor::from_json(const nlohmann::json &j) {
  return std::make_unique<LsvmRegressor>(spec_from_json(j.at("spec")), machine_from(j.at("mx")),
                                         machine_from(j.at("my")));
}

std::unique_ptr<LsvmClassifier> lsvm_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                    std::span<const int> labels) {
  if (x.rows() == 0 || labels.size() != x.rows())
    throw DimensionError("linear SVM: features and labels disagree or are empty");
  const LabelEncoding enc = encode_labels(labels);
  if (enc.classes.size() == 1) {
    log::warn("linear SVM trained on a single class; it always predicts " + std::to_string(enc.classes.front()));
    return std::make_unique<LsvmClassifier>(spec, enc.classes, std::vector<LinearMachine>{});
  }
  PegasosOptions opt{pegasos_lambda(spec.svm.C, x.rows()), spec.svm.epochs, spec.seed};
  std::vector<LinearMachine> machines;
  std::vector<double> signs(x.rows());
  for (std::size_t c = 0; c < enc.classes.size(); ++c) {
    for (std::size_t i = 0; i < x.rows(); ++i)
      signs[i] = enc.codes[i] == static_cast<int>(c) ? 1.0 : -1.0;
    opt.seed = spec.seed + c;
    machines.push_back(pegasos_hinge(x, signs, opt));
  }
  return std::make_unique<LsvmClassifier>(spec, enc.classes, std::move(machines));
}

std::unique_ptr<LsvmRegressor> lsvm_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                                  std::span<const Point2> targets) {
  if (x.rows() == 0 || targets.size() != x.rows())
    throw DimensionError("linear SVR: features and targets disagree or are empty");
  PegasosOptions opt{pegasos_lambda(spec.svm.C, x.rows()), spec.svm.epochs, spec.seed};
  std::vector<double> tx(targets.size()), ty(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    tx[i] = targets[i].x;
    ty[i] = targets[i].y;
  }
  // Targets are fitted around their mean so the regularised bias only has to
  // carry the residual offset.
  auto fit_centred = [&](std::vector<double> &t) {
    const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    for (double &v : t)
      v -= mean;
    LinearMachine m = pegasos_epsilon_insensitive(x, t, spec.svm.epsilon, opt);
    m.weights.back() += mean;
    return m;
  };
  LinearMachine mx = fit_centred(tx);
  opt.seed = spec.seed + 1;
  LinearMachine my = fit_centred(ty);
  return std::make_unique<LsvmRegressor>(spec, std::move(mx), std::move(my));
}

} // namespace cascadeloc::models
