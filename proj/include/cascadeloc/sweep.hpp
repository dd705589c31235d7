#pragma once

#include "cascadeloc/datamodel.hpp"
#include "cascadeloc/models/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cascadeloc {

enum class Stage { Bh, Fh, Loc2d };

std::string_view to_string(Stage stage); // "bh", "fh", "loc2d"
Stage stage_from_string(std::string_view name);

struct SweepCell {
  bool failed = false;
  std::string error;
  // Hit rate in percent for BH/FH, mean 2D error in meters for LOC2D.
  double metric = 0.0;
  double pt_seconds = 0.0;
};

/// One table row: a dataset (BH), one building of a dataset (FH) or one floor (LOC2D).
struct SweepRow {
  std::string name;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::vector<SweepCell> cells; // parallel to SweepResult::specs
  std::optional<std::size_t> winner; // index into specs
};

struct SweepResult {
  Stage stage = Stage::Bh;
  std::vector<models::ModelSpec> specs;
  std::vector<SweepRow> rows;

  std::vector<std::string> labels() const;
  /// Rows won per spec label (every label present, possibly 0).
  std::map<std::string, int> winner_tally() const;
  /// Mean metric / PT per spec over the rows where it did not fail.
  std::vector<std::optional<double>> mean_metric() const;
  std::vector<std::optional<double>> mean_pt() const;
};

struct SweepOptions {
  double ratio = 0.8;
  std::uint64_t split_seed = 0;
  // Score on the training part itself instead of a held-out part.
  bool resubstitution = false;
};

/// Splits each dataset, trains every spec on the stage's routed training samples
/// and scores it on the matching validation samples. BH only visits multi-building
/// datasets; FH assumes a perfect building split; LOC2D a perfect floor split.
/// A failing (dataset, spec) cell is recorded and the sweep continues. The winner
/// of a row is the best metric, ties going to the earlier spec.
SweepResult run_stage_sweep(Stage stage, std::span<const RadioMap> datasets, std::span<const models::ModelSpec> specs,
                            const SweepOptions &options = {});

} // namespace cascadeloc
