#include "cascadeloc/models/tree.hpp"

#include "cascadeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cascadeloc::models {

double gini_impurity(std::span<const double> class_weights) {
  double total = 0.0, sq = 0.0;
  for (double w : class_weights) {
    total += w;
    sq += w * w;
  }
  return total > 0.0 ? 1.0 - sq / (total * total) : 0.0;
}

double gini_impurity(std::span<const int> labels) {
  const LabelEncoding enc = encode_labels(labels);
  std::vector<double> counts(enc.classes.size(), 0.0);
  for (int c : enc.codes)
    counts[static_cast<std::size_t>(c)] += 1.0;
  return gini_impurity(counts);
}

class TreeBuilder {
public:
  TreeBuilder(const FeatureMatrix &x, std::span<const double> weights, const DecisionTree::Options &opt,
              std::mt19937_64 *rng)
      : x_(x), weights_(weights), opt_(opt), rng_(rng) {
    feature_order_.resize(x.cols());
    std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
  }

  DecisionTree classification(std::span<const int> codes, int n_classes) {
    codes_ = codes;
    n_classes_ = n_classes;
    regression_ = false;
    return run();
  }

  DecisionTree regression(std::span<const Point2> targets) {
    targets_ = targets;
    regression_ = true;
    return run();
  }

private:
  double weight(std::size_t i) const { return weights_.empty() ? 1.0 : weights_[i]; }

  DecisionTree run() {
    std::vector<std::size_t> idx;
    idx.reserve(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i)
      if (weight(i) > 0.0)
        idx.push_back(i);
    if (idx.empty())
      throw ParameterError("decision tree needs at least one sample with positive weight");
    build(std::move(idx), 0);
    DecisionTree t;
    t.nodes_ = std::move(nodes_);
    return t;
  }

  struct Best {
    double score = std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0.0;
  };

  int build(std::vector<std::size_t> idx, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    bool pure = true;
    if (regression_) {
      double sw = 0.0, sx = 0.0, sy = 0.0;
      const Point2 first = targets_[idx.front()];
      for (std::size_t i : idx) {
        const double w = weight(i);
        sw += w;
        sx += w * targets_[i].x;
        sy += w * targets_[i].y;
        pure = pure && targets_[i] == first;
      }
      nodes_[static_cast<std::size_t>(id)].value = {sx / sw, sy / sw};
      node_mean_ = nodes_[static_cast<std::size_t>(id)].value;
    } else {
      std::vector<double> hist(static_cast<std::size_t>(n_classes_), 0.0);
      for (std::size_t i : idx)
        hist[static_cast<std::size_t>(codes_[i])] += weight(i);
      nodes_[static_cast<std::size_t>(id)].label = static_cast<int>(argmax(hist));
      pure = std::count_if(hist.begin(), hist.end(), [](double w) { return w > 0.0; }) <= 1;
    }
    if (pure || depth >= opt_.max_depth || idx.size() < 2)
      return id;

    const Best best = find_split(idx);
    if (best.feature < 0)
      return id;

    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t i : idx)
      (x_(i, f) <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    nodes_[static_cast<std::size_t>(id)].feature = best.feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best.threshold;
    const int l = build(std::move(left), depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    const int r = build(std::move(right), depth + 1);
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  Best find_split(const std::vector<std::size_t> &idx) {
    Best best;
    const std::size_t d = x_.cols();
    const bool subsample = opt_.max_features > 0 && static_cast<std::size_t>(opt_.max_features) < d;
    if (subsample) {
      std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
      std::shuffle(feature_order_.begin(), feature_order_.end(), *rng_);
    }
    std::size_t examined = 0;
    for (std::size_t fi = 0; fi < d; ++fi) {
      if (subsample && examined >= static_cast<std::size_t>(opt_.max_features))
        break;
      const std::size_t f = feature_order_[fi];
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, x_(i, f));
        hi = std::max(hi, x_(i, f));
      }
      if (!(lo < hi))
        continue;
      ++examined;
      sorted_.clear();
      for (std::size_t i : idx)
        sorted_.emplace_back(x_(i, f), i);
      std::sort(sorted_.begin(), sorted_.end());
      if (regression_)
        sweep_regression(f, best);
      else
        sweep_classification(f, best);
    }
    return best;
  }

  static double midpoint(double a, double b) {
    const double t = a + (b - a) / 2.0;
    return t >= b ? a : t;
  }

  void sweep_classification(std::size_t f, Best &best) {
    const auto K = static_cast<std::size_t>(n_classes_);
    left_.assign(K, 0.0);
    right_.assign(K, 0.0);
    double wl = 0.0, wr = 0.0;
    for (const auto &[v, i] : sorted_) {
      right_[static_cast<std::size_t>(codes_[i])] += weight(i);
      wr += weight(i);
    }
    double sql = 0.0, sqr = 0.0;
    for (double w : right_)
      sqr += w * w;
    for (std::size_t p = 0; p + 1 < sorted_.size(); ++p) {
      const std::size_t i = sorted_[p].second;
      const auto c = static_cast<std::size_t>(codes_[i]);
      const double w = weight(i);
      sql += (left_[c] + w) * (left_[c] + w) - left_[c] * left_[c];
      sqr += (right_[c] - w) * (right_[c] - w) - right_[c] * right_[c];
      left_[c] += w;
      right_[c] -= w;
      wl += w;
      wr -= w;
      if (!(sorted_[p].first < sorted_[p + 1].first))
        continue;
      // weighted child impurity: wl*gini_l + wr*gini_r
      const double score = (wl - sql / wl) + (wr - sqr / wr);
      if (score < best.score) {
        best.score = score;
        best.feature = static_cast<int>(f);
        best.threshold = midpoint(sorted_[p].first, sorted_[p + 1].first);
      }
    }
  }

  void sweep_regression(std::size_t f, Best &best) {
    // Targets are centred on the node mean to keep the sum-of-squares updates well conditioned.
    struct Acc {
      double w = 0, x = 0, y = 0, xx = 0, yy = 0;
      void add(double wt, Point2 t, double s) {
        w += s * wt;
        x += s * wt * t.x;
        y += s * wt * t.y;
        xx += s * wt * t.x * t.x;
        yy += s * wt * t.y * t.y;
      }
      double sse() const { return w > 0 ? (xx - x * x / w) + (yy - y * y / w) : 0.0; }
    };
    Acc left, right;
    auto centred = [&](std::size_t i) { return Point2{targets_[i].x - node_mean_.x, targets_[i].y - node_mean_.y}; };
    for (const auto &[v, i] : sorted_)
      right.add(weight(i), centred(i), 1.0);
    for (std::size_t p = 0; p + 1 < sorted_.size(); ++p) {
      const std::size_t i = sorted_[p].second;
      left.add(weight(i), centred(i), 1.0);
      right.add(weight(i), centred(i), -1.0);
      if (!(sorted_[p].first < sorted_[p + 1].first))
        continue;
      const double score = std::max(0.0, left.sse()) + std::max(0.0, right.sse());
      if (score < best.score) {
        best.score = score;
        best.feature = static_cast<int>(f);
        best.threshold = midpoint(sorted_[p].first, sorted_[p + 1].first);
      }
    }
  }

  const FeatureMatrix &x_;
  std::span<const double> weights_;
  DecisionTree::Options opt_;
  std::mt19937_64 *rng_;
  bool regression_ = false;
  std::span<const int> codes_;
  int n_classes_ = 0;
  std::span<const Point2> targets_;
  Point2 node_mean_;

  std::vector<DecisionTree::Node> nodes_;
  std::vector<std::size_t> feature_order_;
  std::vector<std::pair<double, std::size_t>> sorted_;
  std::vector<double> left_, right_;
};

DecisionTree DecisionTree::fit_classifier(const FeatureMatrix &x, std::span<const int> codes, int n_classes,
                                          std::span<const double> weights, const Options &opt,
                                          std::mt19937_64 *rng) {
  if (x.rows() == 0 || codes.size() != x.rows())
    throw DimensionError("decision tree: features and labels disagree or are empty");
  if (!weights.empty() && weights.size() != x.rows())
    throw DimensionError("decision tree: weight count differs from sample count");
  if (opt.max_features > 0 && !rng)
    throw ParameterError("decision tree: feature subsampling needs an RNG");
  return TreeBuilder(x, weights, opt, rng).classification(codes, n_classes);
}

DecisionTree DecisionTree::fit_regressor(const FeatureMatrix &x, std::span<const Point2> targets,
                                         std::span<const double> weights, const Options &opt, std::mt19937_64 *rng) {
  if (x.rows() == 0 || targets.size() != x.rows())
    throw DimensionError("decision tree: features and targets disagree or are empty");
  if (!weights.empty() && weights.size() != x.rows())
    throw DimensionError("decision tree: weight count differs from sample count");
  if (opt.max_features > 0 && !rng)
    throw ParameterError("decision tree: feature subsampling needs an RNG");
  return TreeBuilder(x, weights, opt, rng).regression(targets);
}

int DecisionTree::depth() const {
  // nodes are stored in pre-order, children after parents
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    deepest = std::max(deepest, level[n]);
    if (nodes_[n].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[n].left)] = level[n] + 1;
      level[static_cast<std::size_t>(nodes_[n].right)] = level[n] + 1;
    }
  }
  return deepest;
}

bool operator==(const DecisionTree &a, const DecisionTree &b) {
  if (a.nodes_.size() != b.nodes_.size())
    return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto &x = a.nodes_[i];
    const auto &y = b.nodes_[i];
    if (x.feature != y.feature || x.threshold != y.threshold || x.left != y.left || x.right != y.right ||
        x.label != y.label || !(x.value == y.value))
      return false;
  }
  return true;
}

nlohmann::json DecisionTree::to_json() const {
  std::vector<int> feature, left, right, label;
  std::vector<double> threshold, vx, vy;
  for (const auto &n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(n.label);
    vx.push_back(n.value.x);
    vy.push_back(n.value.y);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"label", label},     {"vx", vx},               {"vy", vy}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json &j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto label = j.at("label").get<std::vector<int>>();
  const auto vx = j.at("vx").get<std::vector<double>>();
  const auto vy = j.at("vy").get<std::vector<double>>();
  DecisionTree t;
  t.nodes_.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i)
    t.nodes_[i] = {feature[i], threshold[i], left[i], right[i], label[i], {vx[i], vy[i]}};
  return t;
}

DtClassifier::DtClassifier(ModelSpec spec, std::vector<int> classes, DecisionTree tree)
    : spec_(std::move(spec)), classes_(std::move(classes)), tree_(std::move(tree)) {}

int DtClassifier::predict(std::span<const double> query) const {
  return classes_[static_cast<std::size_t>(tree_.predict_code(query))];
}

nlohmann::json DtClassifier::to_json() const {
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"classes", classes_},
          {"tree", tree_.to_json()}};
}

std::unique_ptr<DtClassifier> DtClassifier::from_json(const nlohmann::json &j) {
  return std::make_unique<DtClassifier>(spec_from_json(j.at("spec")), j.at("classes").get<std::vector<int>>(),
                                        DecisionTree::from_json(j.at("tree")));
}

DtRegressor::DtRegressor(ModelSpec spec, DecisionTree tree) : spec_(std::move(spec)), tree_(std::move(tree)) {}

Point2 DtRegressor::predict(std::span<const double> query) const { return tree_.predict_value(query); }

nlohmann::json DtRegressor::to_json() const {
  return {{"version", kSerializationVersion}, {"spec", models::to_json(spec_)}, {"tree", tree_.to_json()}};
}

std::unique_ptr<DtRegressor> DtRegressor::from_json(const nlohmann::json &j) {
  return std::make_unique<DtRegressor>(spec_from_json(j.at("spec")), DecisionTree::from_json(j.at("tree")));
}

std::unique_ptr<DtClassifier> dt_fit_classifier(const ModelSpec &spec, const FeatureMatrix &x,
                                                std::span<const int> labels) {
  const LabelEncoding enc = encode_labels(labels);
  DecisionTree::Options opt{spec.tree.max_depth, spec.tree.max_features};
  std::mt19937_64 rng(spec.seed);
  auto tree = DecisionTree::fit_classifier(x, enc.codes, static_cast<int>(enc.classes.size()), {}, opt,
                                           opt.max_features > 0 ? &rng : nullptr);
  return std::make_unique<DtClassifier>(spec, enc.classes, std::move(tree));
}

std::unique_ptr<DtRegressor> dt_fit_regressor(const ModelSpec &spec, const FeatureMatrix &x,
                                              std::span<const Point2> targets) {
  DecisionTree::Options opt{spec.tree.max_depth, spec.tree.max_features};
  std::mt19937_64 rng(spec.seed);
  auto tree = DecisionTree::fit_regressor(x, targets, {}, opt, opt.max_features > 0 ? &rng : nullptr);
  return std::make_unique<DtRegressor>(spec, std::move(tree));
}

} // namespace cascadeloc::models
