#include "cascadeloc/reports.hpp"

#include "cascadeloc/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

namespace cascadeloc {

namespace fs = std::filesystem;

MachineFingerprint machine_fingerprint() {
  MachineFingerprint m;
  m.cores = std::thread::hardware_concurrency();
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        m.cpu_model = line.substr(colon + 1);
        m.cpu_model.erase(0, m.cpu_model.find_first_not_of(" \t"));
      }
      break;
    }
  }
  if (m.cpu_model.empty())
    m.cpu_model = "unknown";
  return m;
}

nlohmann::json to_json(const MachineFingerprint &m) { return {{"cpu_model", m.cpu_model}, {"cores", m.cores}}; }

nlohmann::json to_json(const MetricsReport &r) {
  return {{"bh_pct", r.bh_pct ? nlohmann::json(*r.bh_pct) : nlohmann::json(nullptr)},
          {"fh_pct", r.fh_pct},
          {"err2d_mean_m", r.err2d_mean},
          {"err3d_mean_m", r.err3d_mean},
          {"pt_seconds", r.pt_seconds},
          {"n_samples", r.n_samples},
          {"misclassified_buildings", r.misclassified_buildings}};
}

nlohmann::json to_json(const Ratio &r) {
  switch (r.state) {
  case Ratio::State::Value: return r.value;
  case Ratio::State::Undefined: return "undefined";
  case Ratio::State::Absent: break;
  }
  return nullptr;
}

nlohmann::json to_json(const NormalizedReport &r) {
  return {{"bh_ratio", to_json(r.bh_ratio)},
          {"fh_ratio", to_json(r.fh_ratio)},
          {"err2d_ratio", to_json(r.err2d_ratio)},
          {"err3d_ratio", to_json(r.err3d_ratio)},
          {"pt_ratio", to_json(r.pt_ratio)}};
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string sweep_to_csv(const SweepResult &result) {
  const bool loc = result.stage == Stage::Loc2d;
  const std::string metric = loc ? "err2d_m" : "hit_pct";
  std::ostringstream out;
  out << "dataset,n_train,n_validation,quantity";
  for (const auto &label : result.labels())
    out << ',' << label;
  out << '\n';
  for (const auto &row : result.rows) {
    const std::string prefix = row.name + ',' + std::to_string(row.n_train) + ',' + std::to_string(row.n_validation);
    out << prefix << ',' << metric;
    for (const auto &c : row.cells)
      out << ',' << (c.failed ? "failed" : format_number(c.metric));
    out << '\n' << prefix << ",pt_s";
    for (const auto &c : row.cells)
      out << ',' << (c.failed ? "failed" : format_number(c.pt_seconds));
    out << '\n';
  }
  auto means = [&](const std::vector<std::optional<double>> &values, const std::string &quantity) {
    out << "mean,,," << quantity;
    for (const auto &v : values)
      out << ',' << (v ? format_number(*v) : "");
    out << '\n';
  };
  means(result.mean_metric(), metric);
  means(result.mean_pt(), "pt_s");
  const auto tally = result.winner_tally();
  out << "wins,,,best_" << metric;
  for (const auto &label : result.labels())
    out << ',' << tally.at(label);
  out << '\n';
  return out.str();
}

namespace {

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  out << text;
}

} // namespace

fs::path write_sweep_csv(const SweepResult &result, const fs::path &dir) {
  fs::create_directories(dir);
  const fs::path path = dir / ("sweep_" + std::string(to_string(result.stage)) + ".csv");
  write_text(path, sweep_to_csv(result));
  return path;
}

void write_dataset_reports(const DatasetReport &report, const MachineFingerprint &machine, const fs::path &dir) {
  fs::create_directories(dir);
  nlohmann::json benchmarks = nlohmann::json::object();
  nlohmann::json normalized = nlohmann::json::object();
  for (const auto &b : report.benchmarks) {
    benchmarks[b.label] = to_json(b.metrics);
    normalized[b.label] = to_json(b.normalized);
  }
  const nlohmann::json metrics = {{"dataset", report.dataset},
                                  {"machine", to_json(machine)},
                                  {"train_size", report.train_size},
                                  {"test_size", report.test_size},
                                  {"cascade",
                                   {{"spec", report.cascade_label},
                                    {"model_count", report.cascade_models},
                                    {"metrics", to_json(report.cascade)}}},
                                  {"benchmarks", benchmarks}};
  const nlohmann::json norm = {{"dataset", report.dataset},
                               {"machine", to_json(machine)},
                               {"cascade", report.cascade_label},
                               {"relative_to", normalized}};
  write_text(dir / ("metrics_" + report.dataset + ".json"), metrics.dump(2) + "\n");
  write_text(dir / ("normalized_" + report.dataset + ".json"), norm.dump(2) + "\n");
}

void append_pt_vs_size(const DatasetReport &report, const fs::path &dir) {
  fs::create_directories(dir);
  const fs::path path = dir / "pt_vs_size.csv";
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  if (fresh)
    out << "dataset,train_size,benchmark_pt_s,cascade_pt_s\n";
  for (const auto &b : report.benchmarks)
    out << report.dataset << ',' << report.train_size << ',' << format_number(b.metrics.pt_seconds) << ','
        << format_number(report.cascade.pt_seconds) << '\n';
}

} // namespace cascadeloc
