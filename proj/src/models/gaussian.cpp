#include "cascadeloc/models/gaussian.hpp"

#include "cascadeloc/errors.hpp"
#include "cascadeloc/log.hpp"

#include <cmath>
#include <numbers>

namespace cascadeloc::models {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

std::vector<std::vector<std::size_t>> rows_by_class(const LabelEncoding &enc) {
  std::vector<std::vector<std::size_t>> out(enc.classes.size());
  for (std::size_t i = 0; i < enc.codes.size(); ++i)
    out[static_cast<std::size_t>(enc.codes[i])].push_back(i);
  return out;
}

// Biased (1/n) per-feature mean and variance over the given rows.
void moments(const FeatureMatrix &x, std::span<const std::size_t> rows, std::vector<double> &mean,
             std::vector<double> &var) {
  const std::size_t d = x.cols();
  mean.assign(d, 0.0);
  var.assign(d, 0.0);
  for (std::size_t i : rows)
    for (std::size_t j = 0; j < d; ++j)
      mean[j] += x(i, j);
  for (double &m : mean)
    m /= static_cast<double>(rows.size());
  for (std::size_t i : rows)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - mean[j];
      var[j] += c * c;
    }
  for (double &v : var)
    v /= static_cast<double>(rows.size());
}

void check_input(const FeatureMatrix &x, std::span<const int> labels, const char *who) {
  if (x.rows() == 0 || labels.size() != x.rows())
    throw DimensionError(std::string(who) + ": features and labels disagree or are empty");
}

} // namespace

double variance_floor(const FeatureMatrix &x) {
  std::vector<std::size_t> all(x.rows());
  for (std::size_t i = 0; i < all.size(); ++i)
    all[i] = i;
  std::vector<double> mean, var;
  moments(x, all, mean, var);
  double mx = 0.0;
  for (double v : var)
    mx = std::max(mx, v);
  // all-constant data would give a zero floor
  return mx > 0.0 ? 1e-9 * mx : 1e-9;
}

NbClassifier::NbClassifier(ModelSpec spec, std::vector<int> classes, std::vector<ClassModel> models)
    : spec_(std::move(spec)), classes_(std::move(classes)), models_(std::move(models)) {}

std::vector<double> NbClassifier::joint_log_likelihood(std::span<const double> query) const {
  std::vector<double> out;
  out.reserve(models_.size());
  for (const auto &m : models_) {
    if (query.size() != m.mean.size())
      throw DimensionError("naive Bayes: query dimension mismatch");
    double ll = m.log_prior;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double c = query[j] - m.mean[j];
      ll -= 0.5 * (kLog2Pi + std::log(m.variance[j]) + c * c / m.variance[j]);
    }
    out.push_back(ll);
  }
  return out;
}

int NbClassifier::predict(std::span<const double> query) const {
  return classes_[argmax(joint_log_likelihood(query))];
}

nlohmann::json NbClassifier::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto &m : models_)
    ms.push_back({{"log_prior", m.log_prior}, {"mean", m.mean}, {"variance", m.variance}});
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"classes", classes_}, {"models", ms}};
}

std::unique_ptr<NbClassifier> NbClassifier::from_json(const nlohmann::json &j) {
  std::vector<ClassModel> ms;
  for (const auto &m : j.at("models"))
    ms.push_back({m.at("log_prior").get<double>(), m.at("mean").get<std::vector<double>>(),
                  m.at("variance").get<std::vector<double>>()});
  return std::make_unique<NbClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                        std::move(ms));
}

std::unique_ptr<NbClassifier> nb_fit(const ModelSpec &spec, const FeatureMatrix &x, std::span<const int> labels) {
  check_input(x, labels, "naive Bayes");
  const LabelEncoding enc = encode_labels(labels);
  const double floor = variance_floor(x);
  std::vector<NbClassifier::ClassModel> models;
  for (const auto &rows : rows_by_class(enc)) {
    NbClassifier::ClassModel m;
    moments(x, rows, m.mean, m.variance);
    for (double &v : m.variance)
      v += floor;
    m.log_prior = std::log(static_cast<double>(rows.size()) / static_cast<double>(x.rows()));
    models.push_back(std::move(m));
  }
  return std::make_unique<NbClassifier>(spec, enc.classes, std::move(models));
}

QdaClassifier::QdaClassifier(ModelSpec spec, std::vector<int> classes, std::vector<ClassModel> models)
    : spec_(std::move(spec)), classes_(std::move(classes)), models_(std::move(models)) {}

std::vector<double> QdaClassifier::log_posterior_unnormalized(std::span<const double> query) const {
  std::vector<double> out;
  out.reserve(models_.size());
  for (const auto &m : models_) {
    if (static_cast<Eigen::Index>(query.size()) != m.mean.size())
      throw DimensionError("QDA: query dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> q(query.data(), static_cast<Eigen::Index>(query.size()));
    const Eigen::VectorXd z = m.cholesky.triangularView<Eigen::Lower>().solve(q - m.mean);
    const double d = static_cast<double>(query.size());
    out.push_back(m.log_prior - 0.5 * (d * kLog2Pi + m.log_det + z.squaredNorm()));
  }
  return out;
}

int QdaClassifier::predict(std::span<const double> query) const {
  return classes_[argmax(log_posterior_unnormalized(query))];
}

nlohmann::json QdaClassifier::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto &m : models_) {
    const auto d = m.mean.size();
    std::vector<double> mean(m.mean.data(), m.mean.data() + d);
    std::vector<double> chol(m.cholesky.data(), m.cholesky.data() + m.cholesky.size());
    ms.push_back({{"log_prior", m.log_prior}, {"log_det", m.log_det}, {"mean", mean}, {"cholesky", chol}});
  }
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"classes", classes_}, {"models", ms}};
}

std::unique_ptr<QdaClassifier> QdaClassifier::from_json(const nlohmann::json &j) {
  std::vector<ClassModel> ms;
  for (const auto &m : j.at("models")) {
    ClassModel c;
    c.log_prior = m.at("log_prior").get<double>();
    c.log_det = m.at("log_det").get<double>();
    const auto mean = m.at("mean").get<std::vector<double>>();
    const auto chol = m.at("cholesky").get<std::vector<double>>();
    const auto d = static_cast<Eigen::Index>(mean.size());
    c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
    c.cholesky = Eigen::Map<const Eigen::MatrixXd>(chol.data(), d, d);
    ms.push_back(std::move(c));
  }
  return std::make_unique<QdaClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                         std::move(ms));
}

std::unique_ptr<QdaClassifier> qda_fit(const ModelSpec &spec, const FeatureMatrix &x, std::span<const int> labels) {
  check_input(x, labels, "QDA");
  const LabelEncoding enc = encode_labels(labels);
  const auto d = static_cast<Eigen::Index>(x.cols());
  const double gamma = spec.qda.shrinkage;
  const double floor = variance_floor(x);
  std::vector<QdaClassifier::ClassModel> models;
  const auto groups = rows_by_class(enc);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto &rows = groups[c];
    QdaClassifier::ClassModel m;
    m.log_prior = std::log(static_cast<double>(rows.size()) / static_cast<double>(x.rows()));
    Eigen::MatrixXd cov;
    if (rows.size() < 2) {
      log::warn("QDA: class " + std::to_string(enc.classes[c]) +
                " has fewer than 2 samples; using a diagonal covariance");
      std::vector<double> mean, var;
      moments(x, rows, mean, var);
      m.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
      cov = Eigen::MatrixXd::Zero(d, d);
      for (Eigen::Index j = 0; j < d; ++j)
        cov(j, j) = var[static_cast<std::size_t>(j)] + floor;
    } else {
      Eigen::MatrixXd centred(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (Eigen::Index j = 0; j < d; ++j)
          centred(static_cast<Eigen::Index>(r), j) = x(rows[r], static_cast<std::size_t>(j));
      m.mean = centred.colwise().mean().transpose();
      centred.rowwise() -= m.mean.transpose();
      cov = (centred.transpose() * centred) / static_cast<double>(rows.size() - 1);
      const Eigen::VectorXd diag = cov.diagonal();
      cov *= (1.0 - gamma);
      cov.diagonal() += gamma * diag;
    }

    // Ridge when the factorisation fails or is numerically singular.
    double ridge = 0.0;
    const double scale = std::max(cov.diagonal().maxCoeff(), 1.0);
    for (int attempt = 0;; ++attempt) {
      Eigen::MatrixXd a = cov;
      if (ridge > 0.0)
        a.diagonal().array() += ridge;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd l = llt.matrixL();
        const double min_pivot = l.diagonal().minCoeff();
        if (min_pivot * min_pivot > 1e-12 * scale || attempt >= 12) {
          m.cholesky = std::move(l);
          m.log_det = 2.0 * m.cholesky.diagonal().array().log().sum();
          break;
        }
      }
      ridge = ridge == 0.0 ? spec.qda.ridge : ridge * 10.0;
    }
    models.push_back(std::move(m));
  }
  return std::make_unique<QdaClassifier>(spec, enc.classes, std::move(models));
}

} // namespace cascadeloc::models
