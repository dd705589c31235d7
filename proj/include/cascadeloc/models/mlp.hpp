#pragma once

#include "cascadeloc/models/model.hpp"

#include <Eigen/Dense>

namespace cascadeloc::models {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One hidden dense layer followed by either a softmax/cross-entropy head or a
/// linear/squared-error head. The l2 penalty applies to the hidden-layer weights.
class MlpNetwork {
public:
  enum class Head { Softmax, Linear };

  MlpNetwork() = default;

  /// Glorot-uniform initialisation of weights and biases.
  static MlpNetwork initialize(int inputs, int hidden, int outputs, Head head, Activation activation,
                               std::uint64_t seed);

  int inputs() const { return static_cast<int>(w1_.cols()); }
  int hidden() const { return static_cast<int>(w1_.rows()); }
  int outputs() const { return static_cast<int>(w2_.rows()); }
  Head head() const { return head_; }

  /// Raw output layer (logits for the softmax head).
  Eigen::VectorXd forward(std::span<const double> x) const;
  RowMatrix forward(const RowMatrix &x) const;

  /// Mean loss over the rows of `x`. `y` is one-hot (softmax) or the regression target.
  double loss(const RowMatrix &x, const RowMatrix &y, double l2) const;

  /// Same loss; writes d(loss)/d(parameters) into `grad` in parameters() order.
  double loss_and_gradient(const RowMatrix &x, const RowMatrix &y, double l2, std::vector<double> &grad) const;

  /// Flattened W1, b1, W2, b2 (each row-major).
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);
  std::size_t parameter_count() const;

  nlohmann::json to_json() const;
  static MlpNetwork from_json(const nlohmann::json &j);

private:
  RowMatrix hidden_pre(const RowMatrix &x) const;

  RowMatrix w1_; // hidden x inputs
  Eigen::VectorXd b1_;
  RowMatrix w2_; // outputs x hidden
  Eigen::VectorXd b2_;
  Head head_ = Head::Softmax;
  Activation activation_ = Activation::Relu;
};

struct TrainingHistory {
  std::vector<double> epoch_loss;
  bool stopped_early = false;
};

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over shuffled mini-batches. Stops when the
/// epoch loss has not improved by params.tol for params.n_iter_no_change epochs.
/// Throws DivergenceError on a non-finite loss.
TrainingHistory train_mlp(MlpNetwork &net, const RowMatrix &x, const RowMatrix &y, const MlpParams &params,
                          std::uint64_t seed);

class MlpClassifier final : public Classifier {
public:
  MlpClassifier(ModelSpec spec, std::vector<int> classes, MlpNetwork net);
  int predict(std::span<const double> query) const override;
  const std::vector<int> &classes() const override { return classes_; }
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<MlpClassifier> from_json(const nlohmann::json &j);
  const MlpNetwork &network() const { return net_; }

private:
  ModelSpec spec_;
  std::vector<int> classes_;
  MlpNetwork net_;
};

class MlpRegressor final : public Regressor {
public:
  MlpRegressor(ModelSpec spec, MlpNetwork net);
  Point2 predict(std::span<const double> query) const override;
  const ModelSpec &spec() const override { return spec_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<MlpRegressor> from_json(const nlohmann::json &j);
  const MlpNetwork &network() const { return net_; }

private:
  ModelSpec spec_;
  MlpNetwork net_;
};

RowMatrix to_eigen(const FeatureMatrix &m);

std::unique_ptr<MlpClassifier> nn_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                 std::span<const int> labels);
std::unique_ptr<MlpRegressor> nn_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                               std::span<const Point2> targets);

} // namespace cascadeloc::models
