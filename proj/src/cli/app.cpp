#include "cascadeloc/cli.hpp"

#include "cascadeloc/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ostream>

namespace cascadeloc::cli {

namespace {

void add_source_options(CLI::App *cmd, std::string &data, std::string &synth, double &floor_height) {
  cmd->add_option("--data", data, "Data directory or CSV file (default: $CASCADELOC_DATA_DIR)");
  cmd->add_option("--synth", synth, "Synthesizer config (JSON) used instead of files");
  cmd->add_option("--floor-height", floor_height, "Floor height in meters for the 3D error");
}

DataSource make_source(const std::string &data, const std::string &synth, double floor_height) {
  DataSource s;
  if (!synth.empty())
    s.synth_config = synth;
  if (!data.empty()) {
    s.data_dir = data;
  } else if (synth.empty()) {
    if (const char *env = std::getenv(kDataDirEnv); env && *env)
      s.data_dir = env;
  }
  if (floor_height > 0.0)
    s.floor_height = floor_height;
  return s;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Cascaded Wi-Fi fingerprinting: building, floor and 2D position"};
  app.require_subcommand(1);

  std::vector<std::string> validate_paths;
  auto *validate = app.add_subcommand("validate", "Check radio map files for invariant violations");
  validate->add_option("paths", validate_paths, "CSV files or directories")->required();

  std::string synth_config, synth_out = ".";
  auto *synth = app.add_subcommand("synth", "Generate synthetic radio maps");
  synth->add_option("--config", synth_config, "Synthesizer config (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory");

  std::string sweep_data, sweep_synth, sweep_stages = "bh,fh,loc2d";
  double sweep_floor_height = 0.0;
  SweepConfig sweep_cfg;
  std::string sweep_out = ".";
  auto *sweep = app.add_subcommand("sweep", "Validate every roster model per cascade stage");
  add_source_options(sweep, sweep_data, sweep_synth, sweep_floor_height);
  sweep->add_option("--ratio", sweep_cfg.ratio, "Training share of the split")->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--seed", sweep_cfg.seed, "Split and model seed");
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--stages", sweep_stages, "Comma-separated subset of bh,fh,loc2d");
  sweep->add_flag("--resubstitution", sweep_cfg.resubstitution, "Score on the training part");

  std::string bench_data, bench_synth, bench_list = "1nn";
  double bench_floor_height = 0.0;
  BenchmarkConfig bench_cfg;
  std::string bench_out = ".";
  auto *bench = app.add_subcommand("benchmark", "Compare a cascade preset against stand-alone kNN");
  add_source_options(bench, bench_data, bench_synth, bench_floor_height);
  bench->add_option("--preset", bench_cfg.preset, "best, second or fastest");
  bench->add_option("--benchmark", bench_list, "Comma-separated benchmark models (1nn, w3nn, ...)");
  bench->add_option("--ratio", bench_cfg.ratio, "Training share when no test file exists")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seed", bench_cfg.seed, "Split and model seed");
  bench->add_option("--out", bench_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto split_list = [](const std::string &s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t comma = s.find(',', start);
      const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!part.empty())
        parts.push_back(part);
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
    return parts;
  };

  try {
    if (*validate)
      return cmd_validate(std::vector<std::filesystem::path>(validate_paths.begin(), validate_paths.end()), out, err);
    if (*synth)
      return cmd_synth(synth_config, synth_out, out, err);
    if (*sweep) {
      sweep_cfg.source = make_source(sweep_data, sweep_synth, sweep_floor_height);
      sweep_cfg.out = sweep_out;
      sweep_cfg.stages.clear();
      for (const auto &s : split_list(sweep_stages))
        sweep_cfg.stages.push_back(stage_from_string(s));
      if (!sweep_cfg.source.data_dir && !sweep_cfg.source.synth_config) {
        err << "sweep: no data source (use --data, --synth or set " << kDataDirEnv << ")\n";
        return kExitUsage;
      }
      return cmd_sweep(sweep_cfg, out, err);
    }
    if (*bench) {
      bench_cfg.source = make_source(bench_data, bench_synth, bench_floor_height);
      bench_cfg.out = bench_out;
      bench_cfg.benchmarks = split_list(bench_list);
      if (!bench_cfg.source.data_dir && !bench_cfg.source.synth_config) {
        err << "benchmark: no data source (use --data, --synth or set " << kDataDirEnv << ")\n";
        return kExitUsage;
      }
      return cmd_benchmark(bench_cfg, out, err);
    }
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace cascadeloc::cli
