#include "cascadeloc/errors.hpp"
#include "cascadeloc/log.hpp"
#include "cascadeloc/models/model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

struct Data {
  FeatureMatrix x;
  std::vector<int> labels;
  std::vector<Point2> targets;
};

Data clustered(std::uint64_t seed, int n = 90) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 3);
  Data d;
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    d.x.append_row(std::vector<double>{-85.0 + 20 * c + noise(rng), -45.0 - 15 * c + noise(rng), -70 + noise(rng)});
    d.labels.push_back(c * 10);
    d.targets.push_back({5.0 * c + noise(rng), 2.0 * c + noise(rng)});
  }
  return d;
}

} // namespace

TEST(Registry, Labels) {
  EXPECT_EQ(ModelSpec::from_label("1nn", Task::Classification).label(), "1NN");
  EXPECT_EQ(ModelSpec::from_label("W11NN", Task::Regression).label(), "W11NN");
  const ModelSpec w3 = ModelSpec::from_label("w3nn", Task::Regression);
  EXPECT_EQ(w3.family, Family::Wknn);
  EXPECT_EQ(w3.k, 3);
  EXPECT_EQ(ModelSpec::from_label("adaboost", Task::Classification).label(), "ADB");
  EXPECT_EQ(ModelSpec::from_label("qda", Task::Classification).family, Family::Qda);
  EXPECT_THROW(ModelSpec::from_label("svm9", Task::Classification), Error);
}

TEST(Registry, RosterContents) {
  std::vector<std::string> cls, reg;
  for (const auto &s : classification_roster())
    cls.push_back(s.label());
  for (const auto &s : regression_roster())
    reg.push_back(s.label());
  EXPECT_EQ(cls, (std::vector<std::string>{"1NN", "3NN", "W3NN", "11NN", "W11NN", "LSVM", "DT", "RF", "NN", "ADB",
                                           "NB", "QDA"}));
  EXPECT_EQ(reg, (std::vector<std::string>{"1NN", "3NN", "W3NN", "11NN", "W11NN", "LSVM", "DT", "RF", "NN", "ADB"}));
  for (const auto &s : regression_roster())
    EXPECT_EQ(s.task, Task::Regression);
}

TEST(Registry, DefaultsMatchProtocol) {
  const ModelSpec rf = ModelSpec::from_label("RF", Task::Classification);
  EXPECT_EQ(rf.tree.n_trees, 10);
  EXPECT_EQ(rf.tree.max_depth, 50);
  const ModelSpec nn = ModelSpec::from_label("NN", Task::Classification);
  EXPECT_EQ(nn.mlp.hidden, 100);
  EXPECT_EQ(nn.mlp.max_epochs, 100);
  EXPECT_EQ(ModelSpec::from_label("ADB", Task::Classification).boost.n_estimators, 50);
  EXPECT_EQ(ModelSpec::from_label("LSVM", Task::Classification).svm.C, 1.0);
}

TEST(Registry, ValidateRejectsUnsupported) {
  ModelSpec nb = ModelSpec::from_label("NB", Task::Classification);
  nb.task = Task::Regression;
  EXPECT_THROW(nb.validate(), ParameterError);
  ModelSpec k0 = ModelSpec::from_label("3NN", Task::Classification);
  k0.k = 0;
  EXPECT_THROW(k0.validate(), ParameterError);
  const Data d = clustered(1, 9);
  EXPECT_THROW(fit_regressor(nb, d.x, d.targets), ParameterError);
  EXPECT_THROW(fit_classifier(ModelSpec::from_label("DT", Task::Regression), d.x, d.labels), ParameterError);
  const std::vector<int> short_labels{0};
  EXPECT_THROW(fit_classifier(ModelSpec::from_label("DT", Task::Classification), d.x, short_labels), DimensionError);
}

TEST(Registry, SpecJsonRoundTrip) {
  for (auto spec : classification_roster(7)) {
    spec.mlp.l2 = 0.5;
    spec.tree.max_depth = 9;
    EXPECT_EQ(spec_from_json(to_json(spec)), spec) << spec.label();
  }
  for (const auto &spec : regression_roster(3))
    EXPECT_EQ(spec_from_json(to_json(spec)), spec) << spec.label();
}

TEST(RegistryProperty, PredictionsStayInLabelSet) {
  log::ScopedWarningHandler quiet([](std::string_view) {});
  const Data d = clustered(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-110, 0);
  for (const auto &spec : classification_roster(1)) {
    auto m = fit_classifier(spec, d.x, d.labels);
    EXPECT_EQ(m->classes(), (std::vector<int>{0, 10, 20})) << spec.label();
    for (int q = 0; q < 30; ++q) {
      const int p = m->predict(std::vector<double>{u(rng), u(rng), u(rng)});
      EXPECT_TRUE(p == 0 || p == 10 || p == 20) << spec.label() << " predicted " << p;
    }
  }
}

TEST(RegistryProperty, SeededFitsAreReproducible) {
  log::ScopedWarningHandler quiet([](std::string_view) {});
  const Data d = clustered(4);
  const Data probe = clustered(5, 30);
  for (const auto &spec : classification_roster(9)) {
    auto a = fit_classifier(spec, d.x, d.labels);
    auto b = fit_classifier(spec, d.x, d.labels);
    for (std::size_t i = 0; i < probe.x.rows(); ++i)
      EXPECT_EQ(a->predict(probe.x.row(i)), b->predict(probe.x.row(i))) << spec.label();
  }
  for (const auto &spec : regression_roster(9)) {
    auto a = fit_regressor(spec, d.x, d.targets);
    auto b = fit_regressor(spec, d.x, d.targets);
    for (std::size_t i = 0; i < probe.x.rows(); ++i)
      EXPECT_EQ(a->predict(probe.x.row(i)), b->predict(probe.x.row(i))) << spec.label();
  }
}

TEST(RegistryProperty, SerializedModelsPredictIdentically) {
  log::ScopedWarningHandler quiet([](std::string_view) {});
  const Data d = clustered(6);
  const Data probe = clustered(7, 30);
  for (const auto &spec : classification_roster(2)) {
    auto m = fit_classifier(spec, d.x, d.labels);
    auto back = classifier_from_json(nlohmann::json::parse(m->to_json().dump()));
    EXPECT_EQ(back->spec(), spec);
    for (std::size_t i = 0; i < probe.x.rows(); ++i)
      EXPECT_EQ(back->predict(probe.x.row(i)), m->predict(probe.x.row(i))) << spec.label();
  }
  for (const auto &spec : regression_roster(2)) {
    auto m = fit_regressor(spec, d.x, d.targets);
    auto back = regressor_from_json(nlohmann::json::parse(m->to_json().dump()));
    for (std::size_t i = 0; i < probe.x.rows(); ++i)
      EXPECT_EQ(back->predict(probe.x.row(i)), m->predict(probe.x.row(i))) << spec.label();
  }
}

TEST(Registry, VersionMismatchRejected) {
  const Data d = clustered(8, 9);
  auto j = fit_classifier(ModelSpec::from_label("1NN", Task::Classification), d.x, d.labels)->to_json();
  j["version"] = kSerializationVersion + 1;
  EXPECT_THROW(classifier_from_json(j), Error);
}

TEST(Helpers, EncodeAndArgmax) {
  const std::vector<int> labels{7, 3, 7, 5};
  const LabelEncoding e = encode_labels(labels);
  EXPECT_EQ(e.classes, (std::vector<int>{3, 5, 7}));
  EXPECT_EQ(e.codes, (std::vector<int>{2, 0, 2, 1}));
  EXPECT_EQ(argmax(std::vector<double>{1, 4, 4, 2}), 1u);
}
