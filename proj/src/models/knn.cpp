#include "cascadeloc/models/knn.hpp"

#include "cascadeloc/errors.hpp"

#include <algorithm>
#include <map>

namespace cascadeloc::models {

namespace {

bool ranks_before(const Neighbor &a, const Neighbor &b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

} // namespace

std::vector<Neighbor> nearest_neighbors(const FeatureMatrix &train, std::span<const double> query, std::size_t k) {
  if (train.rows() == 0)
    throw ParameterError("kNN: empty training set");
  if (k == 0 || k > train.rows())
    throw ParameterError("kNN: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(train.rows()) + "]");
  if (query.size() != train.cols())
    throw DimensionError("kNN: query has " + std::to_string(query.size()) + " features, model expects " +
                         std::to_string(train.cols()));

  const std::size_t d = train.cols();
  const double *base = train.data().data();
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  // Rows arrive in index order, so a candidate that ties the current k-th distance
  // never displaces it: equal distances keep the lowest index.
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const double dist = manhattan_unchecked(base + i * d, query.data(), d);
    if (best.size() == k && !(dist < best.back().distance))
      continue;
    Neighbor n{dist, i};
    auto pos = std::upper_bound(best.begin(), best.end(), n, ranks_before);
    best.insert(pos, n);
    if (best.size() > k)
      best.pop_back();
  }
  return best;
}

int vote(std::span<const Neighbor> neighbors, std::span<const int> labels, bool weighted) {
  if (weighted && neighbors.front().distance == 0.0)
    return labels[neighbors.front().index];
  std::map<int, double> tally;
  for (const auto &n : neighbors)
    tally[labels[n.index]] += weighted ? 1.0 / n.distance : 1.0;
  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it)
    if (it->second > best->second)
      best = it;
  return best->first;
}

Point2 average(std::span<const Neighbor> neighbors, std::span<const Point2> targets, bool weighted) {
  if (weighted && neighbors.front().distance == 0.0)
    return targets[neighbors.front().index];
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto &n : neighbors) {
    const double w = weighted ? 1.0 / n.distance : 1.0;
    sw += w;
    sx += w * targets[n.index].x;
    sy += w * targets[n.index].y;
  }
  return {sx / sw, sy / sw};
}

int knn_classify(const FeatureMatrix &train, std::span<const int> labels, std::span<const double> query,
                 std::size_t k, bool weighted) {
  if (labels.size() != train.rows())
    throw DimensionError("kNN: label count differs from training rows");
  const auto nn = nearest_neighbors(train, query, k);
  return vote(nn, labels, weighted);
}

Point2 knn_regress(const FeatureMatrix &train, std::span<const Point2> targets, std::span<const double> query,
                   std::size_t k, bool weighted) {
  if (targets.size() != train.rows())
    throw DimensionError("kNN: target count differs from training rows");
  const auto nn = nearest_neighbors(train, query, k);
  return average(nn, targets, weighted);
}

KnnClassifier::KnnClassifier(ModelSpec spec, FeatureMatrix train, std::vector<int> labels)
    : spec_(std::move(spec)), train_(std::move(train)), labels_(std::move(labels)) {
  if (labels_.size() != train_.rows())
    throw DimensionError("kNN: label count differs from training rows");
  if (spec_.k < 1 || static_cast<std::size_t>(spec_.k) > train_.rows())
    throw ParameterError("kNN: k = " + std::to_string(spec_.k) + " exceeds training size " +
                         std::to_string(train_.rows()));
  classes_ = encode_labels(labels_).classes;
}

int KnnClassifier::predict(std::span<const double> query) const {
  return knn_classify(train_, labels_, query, static_cast<std::size_t>(spec_.k), spec_.family == Family::Wknn);
}

nlohmann::json KnnClassifier::to_json() const {
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"train", matrix_to_json(train_)},
          {"labels", labels_}};
}

std::unique_ptr<KnnClassifier> KnnClassifier::from_json(const nlohmann::json &j) {
  return std::make_unique<KnnClassifier>(spec_from_json(j.at("spec")), matrix_from_json(j.at("train")),
                                         j.at("labels").get<std::vector<int>>());
}

KnnRegressor::KnnRegressor(ModelSpec spec, FeatureMatrix train, std::vector<Point2> targets)
    : spec_(std::move(spec)), train_(std::move(train)), targets_(std::move(targets)) {
  if (targets_.size() != train_.rows())
    throw DimensionError("kNN: target count differs from training rows");
  if (spec_.k < 1 || static_cast<std::size_t>(spec_.k) > train_.rows())
    throw ParameterError("kNN: k = " + std::to_string(spec_.k) + " exceeds training size " +
                         std::to_string(train_.rows()));
}

Point2 KnnRegressor::predict(std::span<const double> query) const {
  return knn_regress(train_, targets_, query, static_cast<std::size_t>(spec_.k), spec_.family == Family::Wknn);
}

nlohmann::json KnnRegressor::to_json() const {
  std::vector<double> xs, ys;
  for (const auto &t : targets_) {
    xs.push_back(t.x);
    ys.push_back(t.y);
  }
  return {{"version", kSerializationVersion},
          {"spec", models::to_json(spec_)},
          {"train", matrix_to_json(train_)},
          {"tx", xs},
          {"ty", ys}};
}

std::unique_ptr<KnnRegressor> KnnRegressor::from_json(const nlohmann::json &j) {
  const auto xs = j.at("tx").get<std::vector<double>>();
  const auto ys = j.at("ty").get<std::vector<double>>();
  std::vector<Point2> t(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    t[i] = {xs[i], ys[i]};
  return std::make_unique<KnnRegressor>(spec_from_json(j.at("spec")), matrix_from_json(j.at("train")), std::move(t));
}

} // namespace cascadeloc::models
