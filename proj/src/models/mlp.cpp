#include "cascadeloc/models/mlp.hpp"

#include "cascadeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace cascadeloc::models {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

template <class M> void glorot(M &m, double limit, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = u(rng);
}

// Row-wise log-softmax of `z`.
RowMatrix log_softmax(const RowMatrix &z) {
  RowMatrix out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = m + std::log((z.row(r).array() - m).exp().sum());
    out.row(r) = z.row(r).array() - lse;
  }
  return out;
}

} // namespace

MlpNetwork MlpNetwork::initialize(int inputs, int hidden, int outputs, Head head, Activation activation,
                                  std::uint64_t seed) {
  if (inputs < 1 || hidden < 1 || outputs < 1)
    throw ParameterError("MLP layer sizes must be positive");
  std::mt19937_64 rng(seed);
  MlpNetwork n;
  n.head_ = head;
  n.activation_ = activation;
  n.w1_.resize(hidden, inputs);
  n.b1_.resize(hidden);
  n.w2_.resize(outputs, hidden);
  n.b2_.resize(outputs);
  const double l1 = std::sqrt(6.0 / (inputs + hidden));
  const double l2 = std::sqrt(6.0 / (hidden + outputs));
  glorot(n.w1_, l1, rng);
  glorot(n.b1_, l1, rng);
  glorot(n.w2_, l2, rng);
  glorot(n.b2_, l2, rng);
  return n;
}

RowMatrix MlpNetwork::hidden_pre(const RowMatrix &x) const {
  RowMatrix z = x * w1_.transpose();
  z.rowwise() += b1_.transpose();
  return z;
}

Eigen::VectorXd MlpNetwork::forward(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != w1_.cols())
    throw DimensionError("MLP: query has " + std::to_string(x.size()) + " features, network expects " +
                         std::to_string(w1_.cols()));
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd h = w1_ * v + b1_;
  if (activation_ == Activation::Relu)
    h = h.cwiseMax(0.0);
  else
    h = h.array().tanh();
  return w2_ * h + b2_;
}

RowMatrix MlpNetwork::forward(const RowMatrix &x) const {
  RowMatrix h = hidden_pre(x);
  if (activation_ == Activation::Relu)
    h = h.cwiseMax(0.0);
  else
    h = h.array().tanh();
  RowMatrix out = h * w2_.transpose();
  out.rowwise() += b2_.transpose();
  return out;
}

double MlpNetwork::loss(const RowMatrix &x, const RowMatrix &y, double l2) const {
  const RowMatrix out = forward(x);
  const auto n = static_cast<double>(x.rows());
  double data_loss = 0.0;
  if (head_ == Head::Softmax)
    data_loss = -(y.array() * log_softmax(out).array()).sum() / n;
  else
    data_loss = 0.5 * (out - y).squaredNorm() / n;
  return data_loss + 0.5 * l2 * w1_.squaredNorm() / n;
}

double MlpNetwork::loss_and_gradient(const RowMatrix &x, const RowMatrix &y, double l2,
                                     std::vector<double> &grad) const {
  const auto n = static_cast<double>(x.rows());
  const RowMatrix z1 = hidden_pre(x);
  RowMatrix a1;
  if (activation_ == Activation::Relu)
    a1 = z1.cwiseMax(0.0);
  else
    a1 = z1.array().tanh();
  RowMatrix out = a1 * w2_.transpose();
  out.rowwise() += b2_.transpose();

  double data_loss = 0.0;
  RowMatrix d2;
  if (head_ == Head::Softmax) {
    const RowMatrix ls = log_softmax(out);
    data_loss = -(y.array() * ls.array()).sum() / n;
    d2 = (ls.array().exp() - y.array()) / n;
  } else {
    data_loss = 0.5 * (out - y).squaredNorm() / n;
    d2 = (out - y) / n;
  }
  const double loss = data_loss + 0.5 * l2 * w1_.squaredNorm() / n;

  const RowMatrix gw2 = d2.transpose() * a1;
  const Eigen::VectorXd gb2 = d2.colwise().sum().transpose();
  RowMatrix d1 = d2 * w2_;
  if (activation_ == Activation::Relu)
    d1 = d1.array() * (z1.array() > 0.0).cast<double>();
  else
    d1 = d1.array() * (1.0 - a1.array().square());
  const RowMatrix gw1 = d1.transpose() * x + (l2 / n) * w1_;
  const Eigen::VectorXd gb1 = d1.colwise().sum().transpose();

  grad.resize(parameter_count());
  double *g = grad.data();
  g = std::copy(gw1.data(), gw1.data() + gw1.size(), g);
  g = std::copy(gb1.data(), gb1.data() + gb1.size(), g);
  g = std::copy(gw2.data(), gw2.data() + gw2.size(), g);
  std::copy(gb2.data(), gb2.data() + gb2.size(), g);
  return loss;
}

std::size_t MlpNetwork::parameter_count() const {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
}

std::vector<double> MlpNetwork::parameters() const {
  std::vector<double> p(parameter_count());
  double *o = p.data();
  o = std::copy(w1_.data(), w1_.data() + w1_.size(), o);
  o = std::copy(b1_.data(), b1_.data() + b1_.size(), o);
  o = std::copy(w2_.data(), w2_.data() + w2_.size(), o);
  std::copy(b2_.data(), b2_.data() + b2_.size(), o);
  return p;
}

void MlpNetwork::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count())
    throw DimensionError("MLP: parameter vector has the wrong length");
  const double *i = p.data();
  std::copy(i, i + w1_.size(), w1_.data());
  i += w1_.size();
  std::copy(i, i + b1_.size(), b1_.data());
  i += b1_.size();
  std::copy(i, i + w2_.size(), w2_.data());
  i += w2_.size();
  std::copy(i, i + b2_.size(), b2_.data());
}

nlohmann::json MlpNetwork::to_json() const {
  return {{"inputs", inputs()},
          {"hidden", hidden()},
          {"outputs", outputs()},
          {"head", head_ == Head::Softmax ? "softmax" : "linear"},
          {"activation", activation_ == Activation::Relu ? "relu" : "tanh"},
          {"parameters", parameters()}};
}

MlpNetwork MlpNetwork::from_json(const nlohmann::json &j) {
  MlpNetwork n;
  const int in = j.at("inputs").get<int>(), h = j.at("hidden").get<int>(), out = j.at("outputs").get<int>();
  n.head_ = j.at("head").get<std::string>() == "softmax" ? Head::Softmax : Head::Linear;
  n.activation_ = j.at("activation").get<std::string>() == "relu" ? Activation::Relu : Activation::Tanh;
  n.w1_.resize(h, in);
  n.b1_.resize(h);
  n.w2_.resize(out, h);
  n.b2_.resize(out);
  n.set_parameters(j.at("parameters").get<std::vector<double>>());
  return n;
}

TrainingHistory train_mlp(MlpNetwork &net, const RowMatrix &x, const RowMatrix &y, const MlpParams &params,
                          std::uint64_t seed) {
  TrainingHistory history;
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0 || params.max_epochs <= 0)
    return history;
  const std::size_t batch = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, params.batch_size)), 1, n);

  std::vector<double> theta = net.parameters();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  RowMatrix xb, yb;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  long long step = 0;
  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), x.cols());
      yb.resize(static_cast<Eigen::Index>(len), y.cols());
      for (std::size_t r = 0; r < len; ++r) {
        xb.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(order[start + r]));
        yb.row(static_cast<Eigen::Index>(r)) = y.row(static_cast<Eigen::Index>(order[start + r]));
      }
      const double l = net.loss_and_gradient(xb, yb, params.l2, grad);
      if (!std::isfinite(l))
        throw DivergenceError(epoch, "MLP training diverged at epoch " + std::to_string(epoch));
      epoch_loss += l * static_cast<double>(len);

      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      const double lr = params.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        theta[i] -= lr * m[i] / (std::sqrt(v[i]) + kAdamEps);
      }
      net.set_parameters(theta);
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      throw DivergenceError(epoch, "MLP training diverged at epoch " + std::to_string(epoch));
    history.epoch_loss.push_back(epoch_loss);

    if (epoch_loss > best - params.tol)
      ++stale;
    else
      stale = 0;
    best = std::min(best, epoch_loss);
    if (stale >= params.n_iter_no_change) {
      history.stopped_early = true;
      break;
    }
  }
  return history;
}

RowMatrix to_eigen(const FeatureMatrix &m) {
  return Eigen::Map<const RowMatrix>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

MlpClassifier::MlpClassifier(ModelSpec spec, std::vector<int> classes, MlpNetwork net)
    : spec_(std::move(spec)), classes_(std::move(classes)), net_(std::move(net)) {}

int MlpClassifier::predict(std::span<const double> query) const {
  const Eigen::VectorXd logits = net_.forward(query);
  return classes_[argmax(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())))];
}

nlohmann::json MlpClassifier::to_json() const {
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"classes", classes_},
          {"network", net_.to_json()}};
}

std::unique_ptr<MlpClassifier> MlpClassifier::from_json(const nlohmann::json &j) {
  return std::make_unique<MlpClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                         MlpNetwork::from_json(j.at("network")));
}

MlpRegressor::MlpRegressor(ModelSpec spec, MlpNetwork net) : spec_(std::move(spec)), net_(std::move(net)) {}

Point2 MlpRegressor::predict(std::span<const double> query) const {
  const Eigen::VectorXd out = net_.forward(query);
  return {out[0], out[1]};
}

nlohmann::json MlpRegressor::to_json() const {
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"network", net_.to_json()}};
}

std::unique_ptr<MlpRegressor> MlpRegressor::from_json(const nlohmann::json &j) {
  return std::make_unique<MlpRegressor>(spec_from_json(j.at("spec")), MlpNetwork::from_json(j.at("network")));
}

std::unique_ptr<MlpClassifier> nn_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                 std::span<const int> labels) {
  if (x.rows() == 0 || labels.size() != x.rows())
    throw DimensionError("MLP: features and labels disagree or are empty");
  const LabelEncoding enc = encode_labels(labels);
  const auto k = static_cast<Eigen::Index>(enc.classes.size());
  RowMatrix onehot = RowMatrix::Zero(static_cast<Eigen::Index>(x.rows()), k);
  for (std::size_t i = 0; i < enc.codes.size(); ++i)
    onehot(static_cast<Eigen::Index>(i), enc.codes[i]) = 1.0;
  auto net = MlpNetwork::initialize(static_cast<int>(x.cols()), spec.mlp.hidden, static_cast<int>(k),
                                    MlpNetwork::Head::Softmax, spec.mlp.activation, spec.seed);
  train_mlp(net, to_eigen(x), onehot, spec.mlp, spec.seed);
  return std::make_unique<MlpClassifier>(spec, enc.classes, std::move(net));
}

std::unique_ptr<MlpRegressor> nn_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                               std::span<const Point2> targets) {
  if (x.rows() == 0 || targets.size() != x.rows())
    throw DimensionError("MLP: features and targets disagree or are empty");
  RowMatrix y(static_cast<Eigen::Index>(x.rows()), 2);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    y(static_cast<Eigen::Index>(i), 0) = targets[i].x;
    y(static_cast<Eigen::Index>(i), 1) = targets[i].y;
  }
  auto net = MlpNetwork::initialize(static_cast<int>(x.cols()), spec.mlp.hidden, 2, MlpNetwork::Head::Linear,
                                    spec.mlp.activation, spec.seed);
  train_mlp(net, to_eigen(x), y, spec.mlp, spec.seed);
  return std::make_unique<MlpRegressor>(spec, std::move(net));
}

} // namespace cascadeloc::models
