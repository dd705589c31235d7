#include "cascadeloc/errors.hpp"
#include "cascadeloc/ingest.hpp"
#include "cascadeloc/log.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace cascadeloc;
using testing_support::fixture;

TEST(Load, CleanFixture) {
  const RadioMap m = load_radiomap(fixture("clean.csv"));
  EXPECT_EQ(m.size(), 4u);
  EXPECT_EQ(m.ap_count, 3u);
  EXPECT_EQ(m.deployment.size(), 2u);
  EXPECT_TRUE(validate_radiomap(m).empty());
}

TEST(Load, SentinelIsReplaced) {
  const RadioMap m = load_radiomap(fixture("clean.csv"));
  for (const auto &fp : m.fingerprints)
    for (double v : fp.rss)
      EXPECT_NE(v, 100.0);
  EXPECT_EQ(m.fingerprints[0].rss[2], -105.0);
  EXPECT_EQ(m.fingerprints[2].rss[0], -105.0);
}

TEST(Load, FloorsRenumberedPerBuilding) {
  // Building 0 uses raw floors {0, 2}; building 1 uses {0, 1}.
  const RadioMap m = load_radiomap(fixture("clean.csv"));
  EXPECT_EQ(m.fingerprints[1].floor, 1);
  EXPECT_EQ(m.deployment.at(0), (std::set<int>{0, 1}));
  EXPECT_EQ(m.deployment.at(1), (std::set<int>{0, 1}));
}

TEST(Load, CoordinatesParsed) {
  const RadioMap m = load_radiomap(fixture("clean.csv"));
  EXPECT_EQ(m.fingerprints[3].x, 12.5);
  EXPECT_EQ(m.fingerprints[3].y, 7.25);
}

TEST(Load, NonNumericCellNamesRowAndColumn) {
  try {
    load_radiomap(fixture("corrupt.csv"));
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.column(), "AP002");
    EXPECT_EQ(e.row(), 3u); // file line, header is line 1
  }
}

TEST(Load, MissingColumnIsSchemaError) { EXPECT_THROW(load_radiomap(fixture("missing_column.csv")), SchemaError); }

TEST(Load, HeaderOnlyIsEmptyDataset) {
  EXPECT_THROW(load_radiomap(fixture("header_only.csv")), EmptyDatasetError);
}

TEST(Load, ReplacementMustBeBelowWeakestReading) {
  // A -120 reading clamps to -110, which the default -105 replacement is not below.
  EXPECT_THROW(load_radiomap(fixture("weak_signal.csv")), ConfigError);
  DatasetFormat fmt;
  fmt.replacement_value = -115.0;
  const RadioMap m = load_radiomap(fixture("weak_signal.csv"), fmt);
  EXPECT_EQ(m.fingerprints[0].rss[1], -110.0);
}

TEST(Load, ReplacementAboveMinus100Rejected) {
  DatasetFormat fmt;
  fmt.replacement_value = -90.0;
  EXPECT_THROW(load_radiomap(fixture("clean.csv"), fmt), ConfigError);
}

TEST(Load, UjiLayoutDetected) {
  const DatasetFormat fmt = DatasetFormat::detect(fixture("uji_style.csv"));
  EXPECT_EQ(fmt.rss_column_prefix, "WAP");
  const RadioMap m = load_radiomap(fixture("uji_style.csv"), fmt);
  EXPECT_EQ(m.ap_count, 3u);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.fingerprints[2].floor, 1); // raw floor 3 is building 1's second floor
  EXPECT_DOUBLE_EQ(m.fingerprints[0].x, -7640.5);
}

TEST(Load, OriginSubtraction) {
  DatasetFormat fmt = DatasetFormat::ujiindoorloc();
  fmt.subtract_origin = true;
  const RadioMap m = load_radiomap(fixture("uji_style.csv"), fmt);
  double min_x = 1e300, min_y = 1e300;
  for (const auto &fp : m.fingerprints) {
    min_x = std::min(min_x, fp.x);
    min_y = std::min(min_y, fp.y);
  }
  EXPECT_EQ(min_x, 0.0);
  EXPECT_EQ(min_y, 0.0);
}

TEST(Load, UncheckedReportsViolations) {
  const LoadResult r = load_radiomap_unchecked(fixture("clean.csv"));
  EXPECT_TRUE(r.violations.empty());
}

TEST(SaveLoad, RoundTripIsExact) {
  const auto dir = testing_support::scratch_dir("roundtrip");
  SynthConfig cfg;
  cfg.buildings = 2;
  cfg.floors_per_building = 2;
  cfg.samples_per_floor = 15;
  cfg.noise_sigma = 1.5;
  const RadioMap m = synthesize_radiomap(cfg);
  save_radiomap(m, dir / "m.csv");
  EXPECT_TRUE(std::filesystem::exists(dir / "m.meta.json"));
  const RadioMap back = load_radiomap(dir / "m.csv");
  EXPECT_EQ(back.fingerprints, m.fingerprints);
  EXPECT_EQ(back.deployment, m.deployment);
  EXPECT_EQ(back.floor_height, m.floor_height);
  std::filesystem::remove_all(dir);
}

TEST(Metadata, SidecarPathsAndRoundTrip) {
  EXPECT_EQ(metadata_path_for("/d/foo.csv"), std::filesystem::path("/d/foo.meta.json"));
  EXPECT_EQ(metadata_path_for("/d/foo.test.csv"), std::filesystem::path("/d/foo.meta.json"));
  const auto dir = testing_support::scratch_dir("meta");
  DatasetMetadata meta;
  meta.ap_count = 7;
  meta.floor_height_m = 4.5;
  meta.deployment = {{0, {1, 3}}};
  write_metadata(meta, dir / "x.meta.json");
  const auto back = read_metadata(dir / "x.meta.json");
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->ap_count, 7u);
  EXPECT_EQ(back->floor_height_m, 4.5);
  EXPECT_EQ(back->deployment, meta.deployment);
  EXPECT_FALSE(read_metadata(dir / "absent.meta.json").has_value());
  std::ofstream(dir / "bad.meta.json") << "{not json";
  EXPECT_THROW(read_metadata(dir / "bad.meta.json"), SchemaError);
  std::filesystem::remove_all(dir);
}

TEST(TrainTestFiles, SharedFloorNumbering) {
  const auto dir = testing_support::scratch_dir("traintest");
  {
    std::ofstream tr(dir / "d.csv");
    tr << "AP001,X,Y,FLOOR,BUILDINGID\n-50,0,0,2,0\n-60,1,1,5,0\n";
    std::ofstream te(dir / "d.test.csv");
    te << "AP001,X,Y,FLOOR,BUILDINGID\n-55,0,0,5,0\n";
  }
  const TrainTest tt = load_train_test(dir / "d.csv", dir / "d.test.csv");
  EXPECT_EQ(tt.train.fingerprints[1].floor, 1);
  EXPECT_EQ(tt.test.fingerprints[0].floor, 1);
  std::filesystem::remove_all(dir);
}

TEST(Split, SizesOnOneFloor) {
  SynthConfig cfg;
  cfg.samples_per_floor = 100;
  const auto parts = split_train_validation(synthesize_radiomap(cfg), 0.8, 1);
  EXPECT_EQ(parts.train.size(), 80u);
  EXPECT_EQ(parts.test.size(), 20u);
}

TEST(Split, DeterministicForSeed) {
  SynthConfig cfg;
  cfg.samples_per_floor = 100;
  const RadioMap m = synthesize_radiomap(cfg);
  const auto a = split_train_validation(m, 0.8, 9);
  const auto b = split_train_validation(m, 0.8, 9);
  EXPECT_EQ(a.train.fingerprints, b.train.fingerprints);
  EXPECT_EQ(a.test.fingerprints, b.test.fingerprints);
}

TEST(Split, StratifiedPerFloor) {
  SynthConfig cfg;
  cfg.floors_per_building = 2;
  cfg.samples_per_floor = 50;
  const RadioMap m = synthesize_radiomap(cfg);
  const auto parts = split_train_validation(m, 0.8, 4);
  for (int f = 0; f < 2; ++f) {
    auto count = [f](const RadioMap &r) {
      return std::count_if(r.fingerprints.begin(), r.fingerprints.end(),
                           [f](const Fingerprint &fp) { return fp.floor == f; });
    };
    EXPECT_EQ(count(parts.train), 40);
    EXPECT_EQ(count(parts.test), 10);
  }
}

TEST(Split, DisjointExhaustiveAndOrderPreserving) {
  SynthConfig cfg;
  cfg.buildings = 2;
  cfg.floors_per_building = 3;
  cfg.samples_per_floor = 17;
  cfg.noise_sigma = 1.0;
  const RadioMap m = synthesize_radiomap(cfg);
  const auto parts = split_train_validation(m, 0.8, 2);
  EXPECT_EQ(parts.train.size() + parts.test.size(), m.size());
  std::size_t ti = 0, vi = 0;
  for (const auto &fp : m.fingerprints) {
    if (ti < parts.train.size() && parts.train.fingerprints[ti] == fp)
      ++ti;
    else if (vi < parts.test.size() && parts.test.fingerprints[vi] == fp)
      ++vi;
    else
      FAIL() << "fingerprint missing or out of order";
  }
}

TEST(Split, SingleSampleFloorGoesToTrainingWithWarning) {
  RadioMap m;
  m.ap_count = 1;
  m.deployment = {{0, {0, 1}}};
  m.fingerprints = {{{-50}, 0, 0, 0, 0}, {{-51}, 0, 0, 1, 1}, {{-60}, 0, 1, 2, 2}};
  int warnings = 0;
  log::ScopedWarningHandler h([&](std::string_view) { ++warnings; });
  const auto parts = split_train_validation(m, 0.8, 0);
  EXPECT_EQ(warnings, 1);
  EXPECT_EQ(parts.train.size(), 2u);
  EXPECT_EQ(parts.train.fingerprints.back().floor, 1);
}

TEST(Split, RejectsBadRatio) {
  SynthConfig cfg;
  const RadioMap m = synthesize_radiomap(cfg);
  EXPECT_THROW(split_train_validation(m, 0.0, 0), ParameterError);
  EXPECT_THROW(split_train_validation(m, 1.0, 0), ParameterError);
}

TEST(Synth, CountsAndLabels) {
  SynthConfig cfg;
  cfg.samples_per_floor = 10;
  const RadioMap one = synthesize_radiomap(cfg);
  EXPECT_EQ(one.size(), 10u);
  for (const auto &fp : one.fingerprints) {
    EXPECT_EQ(fp.building, 0);
    EXPECT_EQ(fp.floor, 0);
  }
  cfg.buildings = 3;
  cfg.floors_per_building = 4;
  cfg.samples_per_floor = 500;
  const RadioMap big = synthesize_radiomap(cfg);
  EXPECT_EQ(big.size(), 6000u);
  EXPECT_EQ(total_floors(big.deployment), 12u);
  EXPECT_TRUE(validate_radiomap(big).empty());
}

TEST(Synth, OneMeterReadsTxPower) {
  EXPECT_EQ(log_distance_rss(-30.0, 3.0, 1.0), -30.0);
  EXPECT_EQ(log_distance_rss(-30.0, 3.0, 0.2), -30.0);
  EXPECT_DOUBLE_EQ(log_distance_rss(-30.0, 3.0, 10.0), -60.0);
}

TEST(Synth, SampleOnApReadsTxPower) {
  SynthConfig cfg;
  cfg.samples_per_floor = 1;
  const auto aps = synthesize_layout(cfg);
  ASSERT_FALSE(aps.empty());
  // At distance <= 1 m from an AP, the reading is the transmit power.
  EXPECT_EQ(log_distance_rss(cfg.tx_power, cfg.path_loss_exponent, 0.5), cfg.tx_power);
}

TEST(Synth, OtherBuildingsReadNotDetected) {
  SynthConfig cfg;
  cfg.buildings = 2;
  cfg.samples_per_floor = 5;
  const auto aps = synthesize_layout(cfg);
  const RadioMap m = synthesize_radiomap(cfg);
  for (const auto &fp : m.fingerprints)
    for (std::size_t a = 0; a < aps.size(); ++a)
      if (aps[a].building != fp.building)
        EXPECT_EQ(fp.rss[a], kDefaultNotDetectedRss);
}

TEST(Synth, IdenticalSeedsGiveIdenticalCsv) {
  SynthConfig cfg;
  cfg.buildings = 2;
  cfg.samples_per_floor = 20;
  cfg.noise_sigma = 3.0;
  cfg.seed = 77;
  EXPECT_EQ(radiomap_to_csv(synthesize_radiomap(cfg)), radiomap_to_csv(synthesize_radiomap(cfg)));
  SynthConfig other = cfg;
  other.seed = 78;
  EXPECT_NE(radiomap_to_csv(synthesize_radiomap(cfg)), radiomap_to_csv(synthesize_radiomap(other)));
}

TEST(Synth, InvalidConfigRejected) {
  SynthConfig cfg;
  cfg.buildings = 0;
  EXPECT_THROW(synthesize_radiomap(cfg), ConfigError);
  cfg = {};
  cfg.noise_sigma = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.grid_extent = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
