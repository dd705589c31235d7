#include "cascadeloc/sweep.hpp"

#include "cascadeloc/cascade.hpp"
#include "cascadeloc/errors.hpp"
#include "cascadeloc/eval.hpp"
#include "cascadeloc/ingest.hpp"
#include "cascadeloc/log.hpp"

#include <cmath>

namespace cascadeloc {

namespace {

using models::ModelSpec;
using models::Task;

struct Job {
  std::string name;
  FeatureMatrix train_x;
  std::vector<int> train_labels;
  std::vector<Point2> train_targets;
  FeatureMatrix val_x;
  std::vector<int> val_labels;
  std::vector<Point2> val_targets;
};

template <class Pred> Job make_job(std::string name, const RadioMap &train, const RadioMap &val, Stage stage,
                                  Pred keep) {
  Job job;
  job.name = std::move(name);
  job.train_x = FeatureMatrix(0, train.ap_count);
  job.val_x = FeatureMatrix(0, train.ap_count);
  auto add = [&](const Fingerprint &fp, FeatureMatrix &x, std::vector<int> &labels, std::vector<Point2> &targets) {
    x.append_row(fp.rss);
    labels.push_back(stage == Stage::Bh ? fp.building : fp.floor);
    targets.push_back(fp.position());
  };
  for (const auto &fp : train.fingerprints)
    if (keep(fp))
      add(fp, job.train_x, job.train_labels, job.train_targets);
  for (const auto &fp : val.fingerprints)
    if (keep(fp))
      add(fp, job.val_x, job.val_labels, job.val_targets);
  return job;
}

SweepCell run_cell(Stage stage, const ModelSpec &spec_in, const Job &job) {
  SweepCell cell;
  try {
    if (job.train_x.rows() == 0)
      throw EmptyDatasetError("no training samples");
    if (job.val_x.rows() == 0)
      throw EmptyDatasetError("no validation samples");
    const ModelSpec spec = clamp_knn(spec_in, job.train_x.rows(), job.name);
    const std::size_t n = job.val_x.rows();
    volatile double sink = 0.0;
    if (stage == Stage::Loc2d) {
      const auto model = models::fit_regressor(spec, job.train_x, job.train_targets);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = model->predict(job.val_x.row(i));
        sum += std::hypot(p.x - job.val_targets[i].x, p.y - job.val_targets[i].y);
      }
      cell.metric = sum / static_cast<double>(n);
      cell.pt_seconds = time_passes([&] {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                            const Point2 p = model->predict(job.val_x.row(i));
                            acc += p.x + p.y;
                          }
                          sink = sink + acc;
                        }).median_seconds;
    } else {
      const auto model = models::fit_classifier(spec, job.train_x, job.train_labels);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i)
        hits += model->predict(job.val_x.row(i)) == job.val_labels[i];
      cell.metric = 100.0 * static_cast<double>(hits) / static_cast<double>(n);
      cell.pt_seconds = time_passes([&] {
                          long acc = 0;
                          for (std::size_t i = 0; i < n; ++i)
                            acc += model->predict(job.val_x.row(i));
                          sink = sink + static_cast<double>(acc);
                        }).median_seconds;
    }
  } catch (const std::exception &e) {
    cell = SweepCell{};
    cell.failed = true;
    cell.error = e.what();
    log::warn(job.name + " / " + spec_in.label() + " failed: " + e.what());
  }
  return cell;
}

} // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
  case Stage::Bh: return "bh";
  case Stage::Fh: return "fh";
  case Stage::Loc2d: return "loc2d";
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  if (name == "bh" || name == "BH")
    return Stage::Bh;
  if (name == "fh" || name == "FH")
    return Stage::Fh;
  if (name == "loc2d" || name == "LOC2D")
    return Stage::Loc2d;
  throw ConfigError("unknown stage '" + std::string(name) + "' (expected bh, fh or loc2d)");
}

std::vector<std::string> SweepResult::labels() const {
  std::vector<std::string> out;
  for (const auto &s : specs)
    out.push_back(s.label());
  return out;
}

std::map<std::string, int> SweepResult::winner_tally() const {
  std::map<std::string, int> tally;
  for (const auto &s : specs)
    tally[s.label()];
  for (const auto &row : rows)
    if (row.winner)
      ++tally[specs[*row.winner].label()];
  return tally;
}

namespace {

template <class Get> std::vector<std::optional<double>> column_means(const SweepResult &r, Get get) {
  std::vector<std::optional<double>> out(r.specs.size());
  for (std::size_t j = 0; j < r.specs.size(); ++j) {
    double sum = 0.0;
    int count = 0;
    for (const auto &row : r.rows)
      if (!row.cells[j].failed) {
        sum += get(row.cells[j]);
        ++count;
      }
    if (count > 0)
      out[j] = sum / count;
  }
  return out;
}

} // namespace

std::vector<std::optional<double>> SweepResult::mean_metric() const {
  return column_means(*this, [](const SweepCell &c) { return c.metric; });
}

std::vector<std::optional<double>> SweepResult::mean_pt() const {
  return column_means(*this, [](const SweepCell &c) { return c.pt_seconds; });
}

SweepResult run_stage_sweep(Stage stage, std::span<const RadioMap> datasets, std::span<const ModelSpec> specs,
                            const SweepOptions &options) {
  const Task task = stage == Stage::Loc2d ? Task::Regression : Task::Classification;
  for (const auto &s : specs) {
    if (s.task != task)
      throw ParameterError(s.label() + " is a " + std::string(models::to_string(s.task)) + " spec; the " +
                           std::string(to_string(stage)) + " sweep needs " + std::string(models::to_string(task)));
    s.validate();
  }
  SweepResult result;
  result.stage = stage;
  result.specs.assign(specs.begin(), specs.end());

  std::vector<Job> jobs;
  for (const auto &map : datasets) {
    if (stage == Stage::Bh && !map.multi_building()) {
      log::warn(map.name + " has a single building; skipped by the building sweep");
      continue;
    }
    TrainTest parts = split_train_validation(map, options.ratio, options.split_seed);
    const RadioMap &val = options.resubstitution ? parts.train : parts.test;
    switch (stage) {
    case Stage::Bh:
      jobs.push_back(make_job(map.name, parts.train, val, stage, [](const Fingerprint &) { return true; }));
      break;
    case Stage::Fh:
      for (const auto &[b, floors] : map.deployment)
        jobs.push_back(make_job(map.name + "_b" + std::to_string(b), parts.train, val, stage,
                                [b](const Fingerprint &fp) { return fp.building == b; }));
      break;
    case Stage::Loc2d:
      for (const auto &[b, floors] : map.deployment)
        for (int f : floors)
          jobs.push_back(make_job(map.name + "_b" + std::to_string(b) + "_f" + std::to_string(f), parts.train, val,
                                  stage, [b, f](const Fingerprint &fp) { return fp.building == b && fp.floor == f; }));
      break;
    }
  }
  if (stage == Stage::Bh && jobs.empty())
    log::warn("building sweep has no multi-building dataset; table is empty");

  const bool lower_is_better = stage == Stage::Loc2d;
  for (const auto &job : jobs) {
    SweepRow row;
    row.name = job.name;
    row.n_train = job.train_x.rows();
    row.n_validation = job.val_x.rows();
    for (const auto &spec : specs) {
      row.cells.push_back(run_cell(stage, spec, job));
      const SweepCell &c = row.cells.back();
      if (c.failed)
        continue;
      const std::size_t j = row.cells.size() - 1;
      if (!row.winner) {
        row.winner = j;
        continue;
      }
      const double best = row.cells[*row.winner].metric;
      if (lower_is_better ? c.metric < best : c.metric > best)
        row.winner = j;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

} // namespace cascadeloc
