#include "cascadeloc/log.hpp"
#include "cascadeloc/models/gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <algorithm>
#include <numeric>
#include <random>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

const ModelSpec kNb = ModelSpec::from_label("NB", Task::Classification);
const ModelSpec kQda = ModelSpec::from_label("QDA", Task::Classification);

} // namespace

TEST(NaiveBayes, HandComputedLikelihoods) {
  FeatureMatrix x;
  for (double v : {-81.0, -79.0, -41.0, -39.0})
    x.append_row(std::vector<double>{v});
  const std::vector<int> labels{1, 1, 2, 2};
  auto m = nb_fit(kNb, x, labels);
  const std::vector<double> q{-45.0};
  EXPECT_EQ(m->predict(q), 2);
  const auto jll = m->joint_log_likelihood(q);
  const double floor = variance_floor(x);
  auto expected = [&](double mean) {
    const double var = 1.0 + floor;
    return std::log(0.5) - 0.5 * std::log(2 * std::numbers::pi * var) - (q[0] - mean) * (q[0] - mean) / (2 * var);
  };
  EXPECT_NEAR(jll[0], expected(-80.0), 1e-9);
  EXPECT_NEAR(jll[1], expected(-40.0), 1e-9);
}

TEST(NaiveBayes, QueryAtClassMean) {
  FeatureMatrix x;
  for (double v : {-71.0, -69.0, -61.0, -59.0})
    x.append_row(std::vector<double>{v, -v});
  const std::vector<int> labels{0, 0, 1, 1};
  auto m = nb_fit(kNb, x, labels);
  EXPECT_EQ(m->predict(std::vector<double>{-70, 70}), 0);
  EXPECT_EQ(m->predict(std::vector<double>{-60, 60}), 1);
}

TEST(NaiveBayes, ConstantFeatureIsFinite) {
  FeatureMatrix x;
  x.append_row(std::vector<double>{-50, -105});
  x.append_row(std::vector<double>{-52, -105});
  x.append_row(std::vector<double>{-80, -70});
  x.append_row(std::vector<double>{-82, -70});
  const std::vector<int> labels{0, 0, 1, 1};
  auto m = nb_fit(kNb, x, labels);
  for (double v : m->joint_log_likelihood(std::vector<double>{-60, -90}))
    EXPECT_FALSE(std::isnan(v));
  EXPECT_EQ(m->predict(std::vector<double>{-51, -105}), 0);
  EXPECT_EQ(m->predict(std::vector<double>{-81, -70}), 1);
}

TEST(NaiveBayes, VarianceFloorScale) {
  FeatureMatrix x;
  x.append_row(std::vector<double>{0, 0});
  x.append_row(std::vector<double>{2, 0});
  // Population variances are 1 and 0.
  EXPECT_DOUBLE_EQ(variance_floor(x), 1e-9);
}

TEST(Qda, SphericalClassesAgreeWithNaiveBayes) {
  // Cross-shaped clouds: zero off-diagonal covariance and equal variances per class.
  FeatureMatrix x;
  std::vector<int> labels;
  const double means[2][2] = {{-80, -50}, {-60, -70}};
  for (int c = 0; c < 2; ++c)
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      x.append_row(std::vector<double>{means[c][0] + dx, means[c][1] + dy});
      labels.push_back(c);
    }
  auto nb = nb_fit(kNb, x, labels);
  auto qda = qda_fit(kQda, x, labels);
  for (double a = -100.37; a < -40; a += 1.0)
    for (double b = -90.61; b < -30; b += 1.0) { // never on the bisector x - y = -10
      const std::vector<double> q{a, b};
      EXPECT_EQ(nb->predict(q), qda->predict(q)) << a << "," << b;
    }
  EXPECT_EQ(qda->predict(std::vector<double>{-80, -50}), 0);
  EXPECT_EQ(qda->predict(std::vector<double>{-60, -70}), 1);
}

TEST(Qda, DuplicatedFeatureStaysFinite) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 2);
  FeatureMatrix x;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const int c = i % 2;
    const double v = (c ? -60.0 : -80.0) + n(rng);
    x.append_row(std::vector<double>{v, v, -105.0});
    labels.push_back(c);
  }
  auto m = qda_fit(kQda, x, labels);
  for (double v : m->log_posterior_unnormalized(std::vector<double>{-70, -70, -105}))
    EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(m->predict(std::vector<double>{-80, -80, -105}), 0);
  EXPECT_EQ(m->predict(std::vector<double>{-60, -60, -105}), 1);
}

TEST(Qda, SingletonClassFallsBackWithWarning) {
  FeatureMatrix x;
  x.append_row(std::vector<double>{-50, -60});
  x.append_row(std::vector<double>{-80, -90});
  x.append_row(std::vector<double>{-82, -88});
  const std::vector<int> labels{0, 1, 1};
  int warnings = 0;
  log::ScopedWarningHandler h([&](std::string_view) { ++warnings; });
  auto m = qda_fit(kQda, x, labels);
  EXPECT_EQ(warnings, 1);
  EXPECT_EQ(m->predict(std::vector<double>{-50, -60}), 0);
  EXPECT_EQ(m->predict(std::vector<double>{-81, -89}), 1);
}

TEST(GaussianProperty, OrderInvariant) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 5);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    rows.push_back({-80.0 + 15 * c + n(rng), -50.0 - 10 * c + n(rng)});
    labels.push_back(c);
  }
  std::vector<std::size_t> perm(rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  FeatureMatrix a, b;
  std::vector<int> la, lb;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.append_row(rows[i]);
    la.push_back(labels[i]);
    b.append_row(rows[perm[i]]);
    lb.push_back(labels[perm[i]]);
  }
  auto nba = nb_fit(kNb, a, la), nbb = nb_fit(kNb, b, lb);
  auto qa = qda_fit(kQda, a, la), qb = qda_fit(kQda, b, lb);
  std::uniform_real_distribution<double> u(-100, -30);
  for (int q = 0; q < 200; ++q) {
    const std::vector<double> query{u(rng), u(rng)};
    EXPECT_EQ(nba->predict(query), nbb->predict(query));
    EXPECT_EQ(qa->predict(query), qb->predict(query));
  }
}

TEST(Gaussian, SerializationRoundTrip) {
  FeatureMatrix x;
  for (double v : {-81.0, -79.0, -41.0, -39.0, -60.0, -62.0})
    x.append_row(std::vector<double>{v, v / 2});
  const std::vector<int> labels{1, 1, 2, 2, 3, 3};
  for (const auto &m : {std::unique_ptr<Classifier>(nb_fit(kNb, x, labels)),
                        std::unique_ptr<Classifier>(qda_fit(kQda, x, labels))}) {
    auto back = classifier_from_json(m->to_json());
    for (double v = -100; v < -20; v += 3.3)
      EXPECT_EQ(back->predict(std::vector<double>{v, v / 2}), m->predict(std::vector<double>{v, v / 2}));
  }
}
