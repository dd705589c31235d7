#include "cascadeloc/log.hpp"
#include "cascadeloc/models/linear_svm.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

struct TwoClusters {
  FeatureMatrix x;
  std::vector<int> labels;
};

TwoClusters two_clusters(int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TwoClusters d;
  for (int i = 0; i < per_class; ++i) {
    d.x.append_row(std::vector<double>{-90.0 + u(rng)});
    d.labels.push_back(0);
    d.x.append_row(std::vector<double>{-40.0 + u(rng)});
    d.labels.push_back(1);
  }
  return d;
}

} // namespace

TEST(Lsvm, LambdaMapping) { EXPECT_DOUBLE_EQ(pegasos_lambda(1.0, 200), 1.0 / 200); }

TEST(Lsvm, SeparatedClustersThresholdInsideGap) {
  const TwoClusters d = two_clusters(20, 1);
  auto m = lsvm_fit_classifier(ModelSpec::from_label("LSVM", Task::Classification), d.x, d.labels);
  for (std::size_t i = 0; i < d.x.rows(); ++i)
    EXPECT_EQ(m->predict(d.x.row(i)), d.labels[i]);
  // Scan for the single switch from class 0 to class 1.
  int switches = 0;
  double threshold = 0.0;
  int previous = m->predict(std::vector<double>{-100.0});
  for (double v = -100.0; v <= -30.0; v += 0.01) {
    const int p = m->predict(std::vector<double>{v});
    if (p != previous) {
      ++switches;
      threshold = v;
    }
    previous = p;
  }
  EXPECT_EQ(switches, 1);
  EXPECT_GT(threshold, -89.0);
  EXPECT_LT(threshold, -41.0);
}

TEST(Lsvm, DuplicatedDataKeepsScoreSigns) {
  const TwoClusters d = two_clusters(20, 2);
  FeatureMatrix x2 = d.x;
  std::vector<int> l2 = d.labels;
  for (std::size_t i = 0; i < d.x.rows(); ++i) {
    x2.append_row(d.x.row(i));
    l2.push_back(d.labels[i]);
  }
  const ModelSpec spec = ModelSpec::from_label("LSVM", Task::Classification);
  auto a = lsvm_fit_classifier(spec, d.x, d.labels);
  auto b = lsvm_fit_classifier(spec, x2, l2);
  for (double v : {-100.0, -95.0, -91.0, -89.0, -41.0, -39.0, -35.0, -30.0}) {
    const std::vector<double> q{v};
    const auto sa = a->scores(q);
    const auto sb = b->scores(q);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t c = 0; c < sa.size(); ++c)
      EXPECT_EQ(sa[c] > 0, sb[c] > 0) << "probe " << v << " machine " << c;
  }
}

TEST(Lsvm, OneMachinePerClass) {
  FeatureMatrix x;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int c = i % 3;
    x.append_row(std::vector<double>{-90.0 + 25.0 * c + (i % 5) * 0.2, -40.0 - 25.0 * c});
    labels.push_back(c * 2 + 1);
  }
  auto m = lsvm_fit_classifier(ModelSpec::from_label("LSVM", Task::Classification), x, labels);
  EXPECT_EQ(m->machines().size(), 3u);
  EXPECT_EQ(m->classes(), (std::vector<int>{1, 3, 5}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-110, 0);
  for (int q = 0; q < 100; ++q) {
    const int p = m->predict(std::vector<double>{u(rng), u(rng)});
    EXPECT_TRUE(p == 1 || p == 3 || p == 5);
  }
}

TEST(Lsvm, SingleClassIsDegenerateWithWarning) {
  FeatureMatrix x;
  x.append_row(std::vector<double>{-50});
  x.append_row(std::vector<double>{-60});
  const std::vector<int> labels{2, 2};
  int warnings = 0;
  log::ScopedWarningHandler h([&](std::string_view) { ++warnings; });
  auto m = lsvm_fit_classifier(ModelSpec::from_label("LSVM", Task::Classification), x, labels);
  EXPECT_EQ(warnings, 1);
  EXPECT_TRUE(m->machines().empty());
  EXPECT_EQ(m->predict(std::vector<double>{-10}), 2);
}

TEST(Lsvm, RegressionRecoversLinearMap) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100, -30);
  FeatureMatrix x;
  std::vector<Point2> t;
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    x.append_row(std::vector<double>{a, b});
    t.push_back({0.5 * a + 60.0, -0.25 * b + 5.0});
  }
  auto m = lsvm_fit_regressor(ModelSpec::from_label("LSVM", Task::Regression), x, t);
  double err = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const Point2 p = m->predict(x.row(i));
    err += std::hypot(p.x - t[i].x, p.y - t[i].y);
  }
  EXPECT_LT(err / x.rows(), 2.0);
}

TEST(Lsvm, SeedReproducibleAndSerializable) {
  const TwoClusters d = two_clusters(15, 6);
  const ModelSpec spec = ModelSpec::from_label("LSVM", Task::Classification, 3);
  auto a = lsvm_fit_classifier(spec, d.x, d.labels);
  auto b = lsvm_fit_classifier(spec, d.x, d.labels);
  EXPECT_EQ(a->to_json(), b->to_json());
  auto back = classifier_from_json(a->to_json());
  for (double v = -100; v < -30; v += 1.0)
    EXPECT_EQ(back->predict(std::vector<double>{v}), a->predict(std::vector<double>{v}));
}
