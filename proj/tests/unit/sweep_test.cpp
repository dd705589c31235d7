#include "cascadeloc/errors.hpp"
#include "cascadeloc/ingest.hpp"
#include "cascadeloc/log.hpp"
#include "cascadeloc/sweep.hpp"

#include <gtest/gtest.h>

using namespace cascadeloc;
using namespace cascadeloc::models;

namespace {

RadioMap synth(int buildings, int floors, int per_floor, std::uint64_t seed, std::string name) {
  SynthConfig c;
  c.buildings = buildings;
  c.floors_per_building = floors;
  c.samples_per_floor = per_floor;
  c.aps_per_floor = 3;
  c.seed = seed;
  c.name = std::move(name);
  return synthesize_radiomap(c);
}

std::vector<ModelSpec> specs(std::initializer_list<const char *> labels, Task task) {
  std::vector<ModelSpec> out;
  for (auto l : labels)
    out.push_back(ModelSpec::from_label(l, task));
  return out;
}

// Valid spec whose training always diverges.
ModelSpec broken(Task task) {
  ModelSpec s = ModelSpec::from_label("NN", task);
  s.mlp.learning_rate = 1e300;
  s.mlp.max_epochs = 3;
  return s;
}

} // namespace

TEST(Stage, Names) {
  EXPECT_EQ(to_string(Stage::Loc2d), "loc2d");
  EXPECT_EQ(stage_from_string("fh"), Stage::Fh);
  EXPECT_THROW(stage_from_string("z"), ConfigError);
}

TEST(Sweep, BuildingStageSkipsSingleBuildingSets) {
  const std::vector<RadioMap> maps{synth(1, 2, 20, 1, "one")};
  std::vector<std::string> warnings;
  log::ScopedWarningHandler h([&](std::string_view w) { warnings.emplace_back(w); });
  const SweepResult r = run_stage_sweep(Stage::Bh, maps, specs({"1NN"}, Task::Classification));
  EXPECT_TRUE(r.rows.empty());
  ASSERT_FALSE(warnings.empty());
  EXPECT_NE(warnings.back().find("empty"), std::string::npos);
}

TEST(Sweep, BuildingStageOneRowPerDataset) {
  const std::vector<RadioMap> maps{synth(3, 1, 20, 1, "three")};
  const SweepResult r = run_stage_sweep(Stage::Bh, maps, specs({"1NN", "DT"}, Task::Classification));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].name, "three");
  EXPECT_EQ(r.rows[0].n_train, 48u);
  EXPECT_EQ(r.rows[0].n_validation, 12u);
  EXPECT_EQ(r.rows[0].cells.size(), 2u);
}

TEST(Sweep, FloorStageOneRowPerBuilding) {
  const std::vector<RadioMap> maps{synth(3, 2, 10, 1, "a"), synth(1, 3, 10, 2, "b")};
  const SweepResult r = run_stage_sweep(Stage::Fh, maps, specs({"1NN"}, Task::Classification));
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].name, "a_b0");
  EXPECT_EQ(r.rows[2].name, "a_b2");
  EXPECT_EQ(r.rows[3].name, "b_b0");
  EXPECT_EQ(r.rows[0].n_train + r.rows[0].n_validation, 20u);
}

TEST(Sweep, PositioningStageOneRowPerFloorAndExactWinner) {
  const std::vector<RadioMap> maps{synth(2, 2, 12, 1, "m")};
  SweepOptions opt;
  opt.resubstitution = true;
  const SweepResult r = run_stage_sweep(Stage::Loc2d, maps, specs({"DT", "1NN", "3NN"}, Task::Regression), opt);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[1].name, "m_b0_f1");
  for (const auto &row : r.rows) {
    EXPECT_EQ(row.n_train, row.n_validation);
    ASSERT_TRUE(row.winner.has_value());
    // DT and 1NN both fit the training points exactly; the tie goes to the earlier spec.
    EXPECT_EQ(row.cells[0].metric, 0.0);
    EXPECT_EQ(row.cells[1].metric, 0.0);
    EXPECT_EQ(*row.winner, 0u);
  }
  EXPECT_EQ(r.winner_tally().at("DT"), 4);
  EXPECT_EQ(r.winner_tally().at("3NN"), 0);
  EXPECT_EQ(r.mean_metric()[1].value(), 0.0);
}

TEST(Sweep, FailedCellsAreRecordedAndSweepContinues) {
  const std::vector<RadioMap> maps{synth(2, 1, 10, 1, "f")};
  std::vector<ModelSpec> s{broken(Task::Classification), ModelSpec::from_label("1NN", Task::Classification)};
  log::ScopedWarningHandler quiet([](std::string_view) {});
  const SweepResult r = run_stage_sweep(Stage::Bh, maps, s);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].cells[0].failed);
  EXPECT_FALSE(r.rows[0].cells[0].error.empty());
  EXPECT_FALSE(r.rows[0].cells[1].failed);
  EXPECT_EQ(r.rows[0].winner, 1u);
  EXPECT_FALSE(r.mean_metric()[0].has_value());
}

TEST(Sweep, TaskMismatchRejected) {
  const std::vector<RadioMap> maps{synth(2, 1, 10, 1, "t")};
  EXPECT_THROW(run_stage_sweep(Stage::Loc2d, maps, specs({"1NN"}, Task::Classification)), ParameterError);
  EXPECT_THROW(run_stage_sweep(Stage::Fh, maps, specs({"1NN"}, Task::Regression)), ParameterError);
}

TEST(Sweep, DeterministicMetrics) {
  const std::vector<RadioMap> maps{synth(2, 2, 15, 4, "d")};
  SweepOptions opt;
  opt.split_seed = 9;
  const auto s = specs({"1NN", "RF"}, Task::Classification);
  const SweepResult a = run_stage_sweep(Stage::Fh, maps, s, opt);
  const SweepResult b = run_stage_sweep(Stage::Fh, maps, s, opt);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    for (std::size_t c = 0; c < s.size(); ++c)
      EXPECT_EQ(a.rows[i].cells[c].metric, b.rows[i].cells[c].metric);
}
