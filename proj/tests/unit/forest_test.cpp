#include "cascadeloc/models/forest.hpp"
#include "cascadeloc/models/tree.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

struct Data {
  FeatureMatrix x;
  std::vector<int> labels;
  std::vector<Point2> targets;
};

Data clustered_data(std::uint64_t seed, int n = 150) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-100, -20);
  Data d;
  for (int i = 0; i < n; ++i) {
    d.x.append_row(std::vector<double>{u(rng), u(rng), u(rng), u(rng), u(rng)});
    d.labels.push_back(d.x(i, 0) + d.x(i, 1) > -120 ? 1 : static_cast<int>(rng() % 2) * 2);
    d.targets.push_back({d.x(i, 2) / 2, d.x(i, 3) / 3});
  }
  return d;
}

} // namespace

TEST(Forest, SingleUnsampledTreeEqualsDecisionTree) {
  const Data d = clustered_data(1);
  ModelSpec rf = ModelSpec::from_label("RF", Task::Classification);
  rf.tree.n_trees = 1;
  rf.tree.bootstrap = false;
  rf.tree.max_features = 5;
  auto forest = rf_fit_classifier(rf, d.x, d.labels);
  auto tree = dt_fit_classifier(ModelSpec::from_label("DT", Task::Classification), d.x, d.labels);
  ASSERT_EQ(forest->trees().size(), 1u);
  EXPECT_EQ(forest->trees()[0], tree->tree());

  ModelSpec rr = rf;
  rr.task = Task::Regression;
  auto rforest = rf_fit_regressor(rr, d.x, d.targets);
  auto rtree = dt_fit_regressor(ModelSpec::from_label("DT", Task::Regression), d.x, d.targets);
  const Data probe = clustered_data(99, 50);
  for (std::size_t i = 0; i < probe.x.rows(); ++i) {
    EXPECT_EQ(forest->predict(probe.x.row(i)), tree->predict(probe.x.row(i)));
    EXPECT_EQ(rforest->predict(probe.x.row(i)), rtree->predict(probe.x.row(i)));
  }
}

TEST(Forest, PureSetPredictsItsClass) {
  Data d = clustered_data(2, 30);
  std::fill(d.labels.begin(), d.labels.end(), 4);
  auto m = rf_fit_classifier(ModelSpec::from_label("RF", Task::Classification, 3), d.x, d.labels);
  const Data probe = clustered_data(5, 20);
  for (std::size_t i = 0; i < probe.x.rows(); ++i)
    EXPECT_EQ(m->predict(probe.x.row(i)), 4);
}

TEST(Forest, SeedReproducible) {
  const Data d = clustered_data(3);
  const ModelSpec spec = ModelSpec::from_label("RF", Task::Classification, 42);
  auto a = rf_fit_classifier(spec, d.x, d.labels);
  auto b = rf_fit_classifier(spec, d.x, d.labels);
  EXPECT_EQ(a->to_json(), b->to_json());
  ASSERT_EQ(a->trees().size(), 10u);

  const ModelSpec other = ModelSpec::from_label("RF", Task::Classification, 43);
  EXPECT_NE(a->to_json(), rf_fit_classifier(other, d.x, d.labels)->to_json());
}

TEST(Forest, RegressorIsMeanOfTrees) {
  const Data d = clustered_data(4);
  auto m = rf_fit_regressor(ModelSpec::from_label("RF", Task::Regression, 7), d.x, d.targets);
  const Data probe = clustered_data(8, 10);
  for (std::size_t i = 0; i < probe.x.rows(); ++i) {
    double sx = 0, sy = 0;
    for (const auto &t : m->trees()) {
      sx += t.predict_value(probe.x.row(i)).x;
      sy += t.predict_value(probe.x.row(i)).y;
    }
    const Point2 p = m->predict(probe.x.row(i));
    EXPECT_NEAR(p.x, sx / m->trees().size(), 1e-9);
    EXPECT_NEAR(p.y, sy / m->trees().size(), 1e-9);
  }
}

TEST(Forest, SerializationRoundTrip) {
  const Data d = clustered_data(5);
  auto m = rf_fit_classifier(ModelSpec::from_label("RF", Task::Classification, 1), d.x, d.labels);
  auto back = classifier_from_json(m->to_json());
  for (std::size_t i = 0; i < d.x.rows(); ++i)
    EXPECT_EQ(back->predict(d.x.row(i)), m->predict(d.x.row(i)));
}
