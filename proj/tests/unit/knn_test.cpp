#include "cascadeloc/errors.hpp"
#include "cascadeloc/models/knn.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

// Full stable sort over every training row; the reference the fast path must match.
struct ExhaustiveKnn {
  const FeatureMatrix &x;

  std::vector<std::size_t> ranked(std::span<const double> q, std::size_t k) const {
    std::vector<double> d(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j)
        s += std::abs(x(i, j) - q[j]);
      d[i] = s;
    }
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    idx.resize(k);
    dist = d;
    return idx;
  }

  int classify(std::span<const int> labels, std::span<const double> q, std::size_t k, bool weighted) const {
    const auto idx = ranked(q, k);
    if (weighted && dist[idx[0]] == 0.0)
      return labels[idx[0]];
    std::map<int, double> score;
    for (auto i : idx)
      score[labels[i]] += weighted ? 1.0 / dist[i] : 1.0;
    int best = score.begin()->first;
    for (const auto &[label, s] : score)
      if (s > score[best])
        best = label;
    return best;
  }

  Point2 regress(std::span<const Point2> t, std::span<const double> q, std::size_t k, bool weighted) const {
    const auto idx = ranked(q, k);
    if (weighted && dist[idx[0]] == 0.0)
      return t[idx[0]];
    double sx = 0, sy = 0, sw = 0;
    for (auto i : idx) {
      const double w = weighted ? 1.0 / dist[i] : 1.0;
      sx += w * t[i].x;
      sy += w * t[i].y;
      sw += w;
    }
    return {sx / sw, sy / sw};
  }

  mutable std::vector<double> dist;
};

FeatureMatrix matrix(std::initializer_list<std::vector<double>> rows) {
  FeatureMatrix m;
  for (const auto &r : rows)
    m.append_row(r);
  return m;
}

} // namespace

TEST(Knn, QueryOnTrainingSampleReturnsIt) {
  const FeatureMatrix x = matrix({{-50, -60}, {-70, -80}, {-90, -40}});
  const std::vector<int> labels{4, 7, 9};
  const std::vector<Point2> t{{1, 2}, {3, 4}, {5, 6}};
  EXPECT_EQ(knn_classify(x, labels, x.row(1), 1, false), 7);
  EXPECT_EQ(knn_regress(x, t, x.row(2), 1, false), (Point2{5, 6}));
  EXPECT_EQ(knn_regress(x, t, x.row(2), 3, true), (Point2{5, 6}));
}

TEST(Knn, UnweightedMean) {
  const FeatureMatrix x = matrix({{0}, {1}, {2}, {50}});
  const std::vector<Point2> t{{0, 0}, {0, 0}, {3, 3}, {100, 100}};
  const Point2 p = knn_regress(x, t, std::vector<double>{1}, 3, false);
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_DOUBLE_EQ(p.y, 1.0);
}

TEST(Knn, InverseDistanceMean) {
  const FeatureMatrix x = matrix({{1}, {2}, {-2}, {9}});
  const std::vector<Point2> t{{0, 0}, {3, 0}, {0, 3}, {100, 100}};
  const Point2 p = knn_regress(x, t, std::vector<double>{0}, 3, true);
  EXPECT_DOUBLE_EQ(p.x, 0.75);
  EXPECT_DOUBLE_EQ(p.y, 0.75);
}

TEST(Knn, NeighborTiesKeepLowestIndex) {
  const FeatureMatrix x = matrix({{5}, {-5}, {5}, {-5}});
  const auto nn = nearest_neighbors(x, std::vector<double>{0}, 3);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_EQ(nn[0].index, 0u);
  EXPECT_EQ(nn[1].index, 1u);
  EXPECT_EQ(nn[2].index, 2u);
}

TEST(Knn, VoteTieGoesToLowestLabel) {
  const FeatureMatrix x = matrix({{1}, {-1}});
  const std::vector<int> labels{8, 3};
  EXPECT_EQ(knn_classify(x, labels, std::vector<double>{0}, 2, false), 3);
}

TEST(Knn, BadK) {
  const FeatureMatrix x = matrix({{1}, {2}});
  EXPECT_THROW(nearest_neighbors(x, std::vector<double>{0}, 3), ParameterError);
  EXPECT_THROW(nearest_neighbors(x, std::vector<double>{0}, 0), ParameterError);
}

TEST(KnnProperty, MatchesExhaustiveScanOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> rss(-100, -90); // coarse values force many ties
  for (std::size_t n : {std::size_t{200}, std::size_t{500}}) {
    FeatureMatrix x;
    std::vector<int> labels;
    std::vector<Point2> t;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r(6);
      for (auto &v : r)
        v = rss(rng);
      x.append_row(r);
      labels.push_back(static_cast<int>(rng() % 4));
      t.push_back({static_cast<double>(rng() % 100), static_cast<double>(rng() % 100)});
    }
    ExhaustiveKnn oracle{x};
    for (int q = 0; q < 50; ++q) {
      std::vector<double> query(6);
      for (auto &v : query)
        v = rss(rng);
      for (std::size_t k : {1, 3, 11})
        for (bool w : {false, true}) {
          EXPECT_EQ(knn_classify(x, labels, query, k, w), oracle.classify(labels, query, k, w));
          const Point2 a = knn_regress(x, t, query, k, w);
          const Point2 b = oracle.regress(t, query, k, w);
          EXPECT_NEAR(a.x, b.x, 1e-9);
          EXPECT_NEAR(a.y, b.y, 1e-9);
        }
    }
  }
}

TEST(KnnProperty, TrainingOrderDoesNotChangeDistinctNeighborhoods) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-100, -30);
  std::vector<std::vector<double>> rows(100, std::vector<double>(5));
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) {
    for (auto &v : rows[i])
      v = u(rng);
    labels[i] = i % 3;
  }
  std::vector<int> perm(100);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  KnnClassifier a(ModelSpec::from_label("3NN", Task::Classification), [&] {
    FeatureMatrix m;
    for (auto &r : rows)
      m.append_row(r);
    return m;
  }(), labels);
  FeatureMatrix pm;
  std::vector<int> pl;
  for (int i : perm) {
    pm.append_row(rows[i]);
    pl.push_back(labels[i]);
  }
  KnnClassifier b(ModelSpec::from_label("3NN", Task::Classification), pm, pl);
  for (int q = 0; q < 100; ++q) {
    std::vector<double> query(5);
    for (auto &v : query)
      v = u(rng);
    EXPECT_EQ(a.predict(query), b.predict(query));
  }
}

TEST(KnnModel, SerializationRoundTrip) {
  const FeatureMatrix x = matrix({{-50, -60}, {-70, -80}, {-90, -40}});
  const std::vector<Point2> t{{1, 2}, {3, 4}, {5, 6}};
  auto m = fit_regressor(ModelSpec::from_label("W3NN", Task::Regression), x, t);
  auto back = regressor_from_json(m->to_json());
  const std::vector<double> q{-60, -61};
  EXPECT_EQ(m->predict(q), back->predict(q));
  EXPECT_EQ(back->spec(), m->spec());
}
