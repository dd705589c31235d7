#include "cascadeloc/cli.hpp"

#include "cascadeloc/cascade.hpp"
#include "cascadeloc/errors.hpp"
#include "cascadeloc/eval.hpp"
#include "cascadeloc/reports.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace cascadeloc::cli {

namespace fs = std::filesystem;

namespace {

bool ends_with(const std::string &s, std::string_view suffix) { return s.ends_with(suffix); }

std::string dataset_name(const fs::path &csv) { return csv.stem().string(); }

} // namespace

std::vector<DatasetSource> discover_datasets(const fs::path &root) {
  if (!fs::exists(root))
    throw ConfigError("data path " + root.string() + " does not exist");
  std::vector<fs::path> files;
  if (fs::is_directory(root)) {
    for (const auto &e : fs::directory_iterator(root))
      if (e.is_regular_file() && e.path().extension() == ".csv")
        files.push_back(e.path());
  } else {
    files.push_back(root);
  }
  std::sort(files.begin(), files.end());
  auto has = [&](const fs::path &p) { return std::find(files.begin(), files.end(), p) != files.end(); };

  std::vector<DatasetSource> out;
  for (const auto &f : files) {
    const std::string base = f.filename().string();
    if (ends_with(base, ".test.csv"))
      continue;
    DatasetSource src;
    src.train = f;
    src.name = dataset_name(f);
    if (base == "validationData.csv" && has(f.parent_path() / "trainingData.csv"))
      continue;
    if (base == "trainingData.csv") {
      src.name = "ujiindoorloc";
      if (has(f.parent_path() / "validationData.csv"))
        src.test = f.parent_path() / "validationData.csv";
    } else if (const fs::path t = f.parent_path() / (src.name + ".test.csv"); fs::exists(t)) {
      src.test = t;
    }
    src.format = DatasetFormat::detect(f);
    out.push_back(std::move(src));
  }
  return out;
}

std::vector<SynthConfig> read_synth_configs(const fs::path &json_path) {
  std::ifstream in(json_path);
  if (!in)
    throw ConfigError("cannot open synth config " + json_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(json_path.string() + ": " + e.what());
  }
  if (!j.is_array())
    j = nlohmann::json::array({j});
  std::vector<SynthConfig> out;
  for (const auto &o : j) {
    SynthConfig c;
    try {
      c.buildings = o.value("buildings", c.buildings);
      c.floors_per_building = o.value("floors_per_building", c.floors_per_building);
      c.aps_per_floor = o.value("aps_per_floor", c.aps_per_floor);
      c.samples_per_floor = o.value("samples_per_floor", c.samples_per_floor);
      c.grid_extent = o.value("grid_extent", c.grid_extent);
      c.noise_sigma = o.value("noise_sigma", c.noise_sigma);
      c.path_loss_exponent = o.value("path_loss_exponent", c.path_loss_exponent);
      c.tx_power = o.value("tx_power", c.tx_power);
      c.floor_height = o.value("floor_height", c.floor_height);
      c.seed = o.value("seed", c.seed);
      c.name = o.value("name", c.name);
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(json_path.string() + ": " + e.what());
    }
    c.validate();
    out.push_back(c);
  }
  return out;
}

namespace {

struct LoadedDataset {
  std::string name;
  RadioMap train;
  std::optional<RadioMap> test;
};

std::vector<LoadedDataset> load_sources(const DataSource &src) {
  if (src.data_dir.has_value() == src.synth_config.has_value())
    throw ConfigError("give exactly one data source: a data directory or a synth config");
  std::vector<LoadedDataset> out;
  if (src.synth_config) {
    for (const auto &c : read_synth_configs(*src.synth_config))
      out.push_back({c.name, synthesize_radiomap(c), std::nullopt});
  } else {
    for (const auto &d : discover_datasets(*src.data_dir)) {
      if (d.test) {
        TrainTest tt = load_train_test(d.train, *d.test, d.format);
        tt.train.name = d.name;
        tt.test.name = d.name;
        out.push_back({d.name, std::move(tt.train), std::move(tt.test)});
      } else {
        RadioMap m = load_radiomap(d.train, d.format);
        m.name = d.name;
        out.push_back({d.name, std::move(m), std::nullopt});
      }
    }
  }
  if (src.floor_height) {
    if (!(*src.floor_height > 0.0))
      throw ConfigError("floor height must be positive");
    for (auto &d : out) {
      d.train.floor_height = *src.floor_height;
      if (d.test)
        d.test->floor_height = *src.floor_height;
    }
  }
  return out;
}

} // namespace

int cmd_validate(const std::vector<fs::path> &paths, std::ostream &out, std::ostream &err) {
  if (paths.empty()) {
    err << "validate: no paths given\n";
    return kExitUsage;
  }
  std::vector<fs::path> files;
  for (const auto &p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto &e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".csv")
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<std::string> failing;
  for (const auto &f : files) {
    try {
      const LoadResult r = load_radiomap_unchecked(f, DatasetFormat::detect(f));
      out << f.string() << ": " << r.violations.size() << " violations\n";
      for (const auto &v : r.violations)
        out << "  " << to_string(v) << '\n';
      if (!r.violations.empty())
        failing.push_back(f.string());
    } catch (const std::exception &e) {
      out << f.string() << ": error: " << e.what() << '\n';
      failing.push_back(f.string());
    }
  }
  out << files.size() << " datasets checked, " << failing.size() << " failing\n";
  for (const auto &f : failing)
    out << "  failing: " << f << '\n';
  return failing.empty() ? kExitOk : kExitFailure;
}

int cmd_synth(const fs::path &config, const fs::path &out_dir, std::ostream &out, std::ostream &err) {
  try {
    fs::create_directories(out_dir);
    for (const auto &c : read_synth_configs(config)) {
      const RadioMap map = synthesize_radiomap(c);
      const fs::path csv = out_dir / (c.name + ".csv");
      save_radiomap(map, csv);
      out << "wrote " << csv.string() << " (" << map.size() << " fingerprints, " << map.ap_count << " APs)\n";
    }
  } catch (const ConfigError &e) {
    err << "synth: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "synth: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_sweep(const SweepConfig &config, std::ostream &out, std::ostream &err) {
  std::vector<RadioMap> maps;
  try {
    for (auto &d : load_sources(config.source))
      maps.push_back(std::move(d.train));
  } catch (const ConfigError &e) {
    err << "sweep: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "sweep: " << e.what() << '\n';
    return kExitFailure;
  }
  if (maps.empty()) {
    err << "sweep: no datasets found\n";
    return kExitUsage;
  }
  try {
    SweepOptions opt;
    opt.ratio = config.ratio;
    opt.split_seed = config.seed;
    opt.resubstitution = config.resubstitution;
    for (Stage stage : config.stages) {
      const auto specs =
          stage == Stage::Loc2d ? models::regression_roster(config.seed) : models::classification_roster(config.seed);
      const SweepResult r = run_stage_sweep(stage, maps, specs, opt);
      const fs::path path = write_sweep_csv(r, config.out);
      std::size_t failed = 0;
      for (const auto &row : r.rows)
        failed += static_cast<std::size_t>(std::count_if(row.cells.begin(), row.cells.end(),
                                                         [](const SweepCell &c) { return c.failed; }));
      out << "wrote " << path.string() << " (" << r.rows.size() << " rows, " << r.specs.size() << " specs, "
          << failed << " failed cells)\n";
    }
  } catch (const std::exception &e) {
    err << "sweep: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_benchmark(const BenchmarkConfig &config, std::ostream &out, std::ostream &err) {
  CascadeSpec spec;
  std::vector<models::ModelSpec> bench_specs;
  std::vector<LoadedDataset> datasets;
  try {
    spec = CascadeSpec::preset(config.preset, config.seed);
    if (config.benchmarks.empty())
      throw ConfigError("at least one benchmark model is required");
    for (const auto &b : config.benchmarks) {
      models::ModelSpec s;
      try {
        s = models::ModelSpec::from_label(b, models::Task::Regression, config.seed);
      } catch (const ParameterError &e) {
        throw ConfigError("benchmark '" + b + "': " + e.what());
      }
      if (!s.is_knn())
        throw ConfigError("benchmark '" + b + "' is not a kNN-family model");
      bench_specs.push_back(s);
    }
    if (!(config.ratio > 0.0 && config.ratio < 1.0))
      throw ConfigError("split ratio must lie in (0, 1)");
    datasets = load_sources(config.source);
  } catch (const ConfigError &e) {
    err << "benchmark: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "benchmark: " << e.what() << '\n';
    return kExitFailure;
  }
  if (datasets.empty()) {
    err << "benchmark: no datasets found\n";
    return kExitUsage;
  }

  const MachineFingerprint machine = machine_fingerprint();
  int status = kExitOk;
  for (auto &d : datasets) {
    try {
      RadioMap train, test;
      if (d.test) {
        train = std::move(d.train);
        test = std::move(*d.test);
      } else {
        TrainTest tt = split_train_validation(d.train, config.ratio, config.seed);
        train = std::move(tt.train);
        test = std::move(tt.test);
      }
      const CascadeModel cascade = train_cascade(train, spec);
      DatasetReport report;
      report.dataset = d.name;
      report.train_size = train.size();
      report.test_size = test.size();
      report.cascade_label = spec.label();
      report.cascade_models = cascade.model_count();
      report.cascade = evaluate(cascade, test);
      for (const auto &bs : bench_specs) {
        const BenchmarkModel bench = train_benchmark(train, bs);
        BenchmarkOutcome o;
        o.label = bs.label();
        o.metrics = evaluate(bench, test);
        o.normalized = normalize(report.cascade, o.metrics);
        report.benchmarks.push_back(std::move(o));
      }
      write_dataset_reports(report, machine, config.out);
      append_pt_vs_size(report, config.out);
      out << d.name << ": cascade " << report.cascade_label << " (" << report.cascade_models << " models)";
      for (const auto &b : report.benchmarks) {
        out << "; vs " << b.label << " pt_ratio=";
        out << (b.normalized.pt_ratio.has_value() ? format_number(b.normalized.pt_ratio.value) : "undefined");
      }
      out << '\n';
    } catch (const std::exception &e) {
      err << "benchmark: " << d.name << ": " << e.what() << '\n';
      status = kExitFailure;
    }
  }
  return status;
}

} // namespace cascadeloc::cli
