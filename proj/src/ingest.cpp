#include "cascadeloc/ingest.hpp"

#include "cascadeloc/errors.hpp"
#include "cascadeloc/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace cascadeloc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct RawRow {
  std::vector<double> rss; // sentinel already replaced
  int building = 0;
  int floor = 0;
  double x = 0.0;
  double y = 0.0;
};

struct RawTable {
  std::vector<RawRow> rows;
  std::size_t ap_count = 0;
  double min_detected = std::numeric_limits<double>::infinity();
};

bool is_ap_column(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix)
    return false;
  return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()), name.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

int to_label(double v, std::size_t row, const std::string &column) {
  if (!std::isfinite(v) || v != std::floor(v) || v < 0 || v > std::numeric_limits<int>::max())
    throw ParseError(row, column,
                     "row " + std::to_string(row) + ", column " + column + ": label must be a non-negative integer");
  return static_cast<int>(v);
}

RawTable read_table(const fs::path &path, const DatasetFormat &fmt, double sentinel) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw EmptyDatasetError(path.string() + ": file is empty");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
    line.erase(0, 3); // UTF-8 BOM
  const std::vector<std::string> header = [&] {
    std::vector<std::string> h;
    for (auto f : split_fields(line))
      h.emplace_back(f);
    return h;
  }();

  std::vector<std::size_t> ap_cols;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (is_ap_column(header[c], fmt.rss_column_prefix))
      ap_cols.push_back(c);
  if (ap_cols.empty())
    throw SchemaError(path.string() + ": no columns with prefix '" + fmt.rss_column_prefix + "'");

  auto column = [&](const std::string &name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cx = column(fmt.label_columns.x);
  const std::size_t cy = column(fmt.label_columns.y);
  const std::size_t cf = column(fmt.label_columns.floor);
  const std::size_t cb = column(fmt.label_columns.building);

  RawTable table;
  table.ap_count = ap_cols.size();
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty())
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(row_no, "", path.string() + ": row " + std::to_string(row_no) + " has " +
                                       std::to_string(fields.size()) + " fields, header has " +
                                       std::to_string(header.size()));
    auto number = [&](std::size_t c) {
      auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError(row_no, header[c],
                         path.string() + ": row " + std::to_string(row_no) + ", column " + header[c] +
                             ": cannot parse '" + std::string(fields[c]) + "' as a number");
      return *v;
    };
    RawRow r;
    r.rss.reserve(ap_cols.size());
    for (std::size_t c : ap_cols) {
      double v = number(c);
      if (v == sentinel) {
        v = fmt.replacement_value;
      } else {
        v = std::clamp(v, kMinDetectedRss, kMaxDetectedRss);
        table.min_detected = std::min(table.min_detected, v);
      }
      r.rss.push_back(v);
    }
    r.x = number(cx);
    r.y = number(cy);
    r.floor = to_label(number(cf), row_no, header[cf]);
    r.building = to_label(number(cb), row_no, header[cb]);
    table.rows.push_back(std::move(r));
  }
  if (table.rows.empty())
    throw EmptyDatasetError(path.string() + ": no data rows");
  return table;
}

void check_replacement(const DatasetFormat &fmt, const RawTable &table, const fs::path &path) {
  if (!(fmt.replacement_value < -100.0))
    throw ConfigError("replacement value " + format_double(fmt.replacement_value) + " must be below -100 dBm");
  if (fmt.replacement_value >= table.min_detected)
    throw ConfigError(path.string() + ": replacement value " + format_double(fmt.replacement_value) +
                      " is not below the weakest detected RSS " + format_double(table.min_detected));
}

Deployment raw_deployment_of(const RawTable &t) {
  Deployment d;
  for (const auto &r : t.rows)
    d[r.building].insert(r.floor);
  return d;
}

// raw floor id -> contiguous index, per building
using FloorMapping = std::map<int, std::map<int, int>>;

FloorMapping floor_mapping(const Deployment &raw) {
  FloorMapping m;
  for (const auto &[b, floors] : raw) {
    int next = 0;
    for (int f : floors)
      m[b][f] = next++;
  }
  return m;
}

Deployment normalized_deployment(const FloorMapping &m) {
  Deployment d;
  for (const auto &[b, floors] : m)
    for (const auto &[raw, idx] : floors)
      d[b].insert(idx);
  return d;
}

struct Normalized {
  RadioMap map;
  std::vector<Violation> unmapped; // rows whose labels are absent from the registry
};

Normalized normalize(RawTable &&table, const FloorMapping &mapping, double floor_height, double replacement) {
  Normalized out;
  out.map.ap_count = table.ap_count;
  out.map.deployment = normalized_deployment(mapping);
  out.map.floor_height = floor_height;
  out.map.not_detected_rss = replacement;
  out.map.fingerprints.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    RawRow &r = table.rows[i];
    Fingerprint fp{std::move(r.rss), r.building, r.floor, r.x, r.y};
    auto b = mapping.find(r.building);
    if (b == mapping.end()) {
      out.unmapped.push_back({i, "building " + std::to_string(r.building) + " is not in the deployment registry"});
    } else if (auto f = b->second.find(r.floor); f == b->second.end()) {
      out.unmapped.push_back({i, "floor " + std::to_string(r.floor) + " of building " + std::to_string(r.building) +
                                     " is not in the deployment registry"});
    } else {
      fp.floor = f->second;
    }
    out.map.fingerprints.push_back(std::move(fp));
  }
  return out;
}

// validate_radiomap plus registry violations that renumbering could have masked.
std::vector<Violation> collect_violations(const Normalized &n) {
  std::vector<Violation> v = validate_radiomap(n.map);
  for (const auto &u : n.unmapped) {
    const bool reported = std::any_of(v.begin(), v.end(), [&](const Violation &x) {
      return x.index == u.index && x.rule.find("registry") != std::string::npos;
    });
    if (!reported)
      v.push_back(u);
  }
  std::stable_sort(v.begin(), v.end(), [](const Violation &a, const Violation &b) {
    return a.index.value_or(0) < b.index.value_or(0);
  });
  return v;
}

std::string dataset_name(const fs::path &csv) {
  std::string stem = csv.stem().string();
  if (stem.size() > 5 && stem.ends_with(".test"))
    stem.resize(stem.size() - 5);
  return stem;
}

void shift_origin(RadioMap &map, double ox, double oy) {
  for (auto &fp : map.fingerprints) {
    fp.x -= ox;
    fp.y -= oy;
  }
}

} // namespace

DatasetFormat DatasetFormat::ujiindoorloc() {
  DatasetFormat f;
  f.rss_column_prefix = "WAP";
  f.label_columns = {"LONGITUDE", "LATITUDE", "FLOOR", "BUILDINGID"};
  f.not_detected_sentinel = 100.0;
  return f;
}

DatasetFormat DatasetFormat::detect(const fs::path &csv) {
  std::ifstream in(csv);
  std::string line;
  if (in && std::getline(in, line)) {
    for (auto f : split_fields(line))
      if (f == "LONGITUDE")
        return ujiindoorloc();
  }
  return {};
}

fs::path metadata_path_for(const fs::path &csv) {
  return csv.parent_path() / (dataset_name(csv) + ".meta.json");
}

std::optional<DatasetMetadata> read_metadata(const fs::path &meta_json) {
  std::ifstream in(meta_json);
  if (!in)
    return std::nullopt;
  json j;
  try {
    in >> j;
    DatasetMetadata m;
    m.ap_count = j.at("ap_count").get<std::size_t>();
    m.floor_height_m = j.value("floor_height_m", kDefaultFloorHeight);
    m.not_detected_sentinel = j.value("not_detected_sentinel", 100.0);
    for (const auto &[key, floors] : j.at("deployment").items()) {
      const int b = std::stoi(key);
      auto &set = m.deployment[b];
      for (const auto &f : floors)
        set.insert(f.get<int>());
    }
    return m;
  } catch (const std::exception &e) {
    throw SchemaError(meta_json.string() + ": malformed metadata: " + e.what());
  }
}

void write_metadata(const DatasetMetadata &meta, const fs::path &meta_json) {
  json j;
  j["ap_count"] = meta.ap_count;
  j["floor_height_m"] = meta.floor_height_m;
  j["not_detected_sentinel"] = meta.not_detected_sentinel;
  json dep = json::object();
  for (const auto &[b, floors] : meta.deployment)
    dep[std::to_string(b)] = std::vector<int>(floors.begin(), floors.end());
  j["deployment"] = dep;
  std::ofstream out(meta_json);
  if (!out)
    throw Error("cannot write " + meta_json.string());
  out << j.dump(2) << '\n';
}

LoadResult load_radiomap_unchecked(const fs::path &csv, const DatasetFormat &fmt) {
  auto meta = read_metadata(metadata_path_for(csv));
  const double sentinel = meta ? meta->not_detected_sentinel : fmt.not_detected_sentinel;
  RawTable table = read_table(csv, fmt, sentinel);
  check_replacement(fmt, table, csv);
  if (meta && meta->ap_count != table.ap_count)
    throw SchemaError(csv.string() + ": metadata declares " + std::to_string(meta->ap_count) + " APs, file has " +
                      std::to_string(table.ap_count));

  const Deployment raw = meta ? meta->deployment : raw_deployment_of(table);
  const double floor_height = meta ? meta->floor_height_m : kDefaultFloorHeight;
  Normalized n = normalize(std::move(table), floor_mapping(raw), floor_height, fmt.replacement_value);
  n.map.name = dataset_name(csv);
  if (fmt.subtract_origin && !n.map.empty()) {
    double ox = std::numeric_limits<double>::infinity(), oy = ox;
    for (const auto &fp : n.map.fingerprints) {
      ox = std::min(ox, fp.x);
      oy = std::min(oy, fp.y);
    }
    shift_origin(n.map, ox, oy);
  }
  LoadResult out;
  out.violations = collect_violations(n);
  out.map = std::move(n.map);
  return out;
}

RadioMap load_radiomap(const fs::path &csv, const DatasetFormat &fmt) {
  LoadResult r = load_radiomap_unchecked(csv, fmt);
  if (!r.violations.empty()) {
    std::string msg = csv.string() + ": " + std::to_string(r.violations.size()) + " violation(s); first: " +
                      to_string(r.violations.front());
    throw ValidationError(msg);
  }
  return std::move(r.map);
}

TrainTest load_train_test(const fs::path &train_csv, const fs::path &test_csv, const DatasetFormat &fmt) {
  auto meta = read_metadata(metadata_path_for(train_csv));
  const double sentinel = meta ? meta->not_detected_sentinel : fmt.not_detected_sentinel;
  RawTable train = read_table(train_csv, fmt, sentinel);
  RawTable test = read_table(test_csv, fmt, sentinel);
  check_replacement(fmt, train, train_csv);
  check_replacement(fmt, test, test_csv);
  if (train.ap_count != test.ap_count)
    throw SchemaError(test_csv.string() + ": has " + std::to_string(test.ap_count) + " AP columns, training file has " +
                      std::to_string(train.ap_count));

  const Deployment raw = meta ? meta->deployment : raw_deployment_of(train);
  const FloorMapping mapping = floor_mapping(raw);
  const double floor_height = meta ? meta->floor_height_m : kDefaultFloorHeight;
  Normalized ntrain = normalize(std::move(train), mapping, floor_height, fmt.replacement_value);
  Normalized ntest = normalize(std::move(test), mapping, floor_height, fmt.replacement_value);
  ntrain.map.name = ntest.map.name = dataset_name(train_csv);

  if (fmt.subtract_origin) {
    double ox = std::numeric_limits<double>::infinity(), oy = ox;
    for (const auto &fp : ntrain.map.fingerprints) {
      ox = std::min(ox, fp.x);
      oy = std::min(oy, fp.y);
    }
    shift_origin(ntrain.map, ox, oy);
    shift_origin(ntest.map, ox, oy);
  }
  for (auto *n : {&ntrain, &ntest}) {
    auto v = collect_violations(*n);
    if (!v.empty())
      throw ValidationError((n == &ntrain ? train_csv : test_csv).string() + ": " + std::to_string(v.size()) +
                            " violation(s); first: " + to_string(v.front()));
  }
  return {std::move(ntrain.map), std::move(ntest.map)};
}

std::string radiomap_to_csv(const RadioMap &map, double not_detected_sentinel) {
  std::string out;
  const int width = std::max<int>(3, static_cast<int>(std::to_string(map.ap_count).size()));
  for (std::size_t a = 0; a < map.ap_count; ++a) {
    std::string idx = std::to_string(a + 1);
    out += "AP" + std::string(static_cast<std::size_t>(width) - idx.size(), '0') + idx + ',';
  }
  out += "X,Y,FLOOR,BUILDINGID\n";
  const std::string sentinel = format_double(not_detected_sentinel);
  for (const auto &fp : map.fingerprints) {
    for (double v : fp.rss) {
      out += v == map.not_detected_rss ? sentinel : format_double(v);
      out += ',';
    }
    out += format_double(fp.x) + ',' + format_double(fp.y) + ',' + std::to_string(fp.floor) + ',' +
           std::to_string(fp.building) + '\n';
  }
  return out;
}

void save_radiomap(const RadioMap &map, const fs::path &csv, double not_detected_sentinel) {
  if (csv.has_parent_path())
    fs::create_directories(csv.parent_path());
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out)
      throw Error("cannot write " + csv.string());
    out << radiomap_to_csv(map, not_detected_sentinel);
  }
  DatasetMetadata meta;
  meta.ap_count = map.ap_count;
  meta.floor_height_m = map.floor_height;
  meta.deployment = map.deployment;
  meta.not_detected_sentinel = not_detected_sentinel;
  write_metadata(meta, metadata_path_for(csv));
}

TrainTest split_train_validation(const RadioMap &map, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ParameterError("split ratio must lie in (0, 1)");
  if (map.empty())
    throw EmptyDatasetError("cannot split an empty radio map");

  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < map.fingerprints.size(); ++i)
    strata[{map.fingerprints[i].building, map.fingerprints[i].floor}].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<char> to_train(map.size(), 0);
  for (auto &[key, idx] : strata) {
    if (idx.size() == 1) {
      log::warn("building " + std::to_string(key.first) + " floor " + std::to_string(key.second) +
                " has a single sample; it goes to the training part");
      to_train[idx.front()] = 1;
      continue;
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n = static_cast<long long>(idx.size());
    const long long n_train = std::clamp<long long>(std::llround(ratio * static_cast<double>(n)), 1, n - 1);
    for (long long i = 0; i < n_train; ++i)
      to_train[idx[static_cast<std::size_t>(i)]] = 1;
  }

  TrainTest out{map.empty_like(), map.empty_like()};
  for (std::size_t i = 0; i < map.size(); ++i)
    (to_train[i] ? out.train : out.test).fingerprints.push_back(map.fingerprints[i]);
  return out;
}

void SynthConfig::validate() const {
  if (buildings < 1 || floors_per_building < 1 || aps_per_floor < 1 || samples_per_floor < 1)
    throw ConfigError("synth counts must all be >= 1");
  if (!(noise_sigma >= 0.0))
    throw ConfigError("noise_sigma must be >= 0");
  if (!(grid_extent > 0.0))
    throw ConfigError("grid_extent must be > 0");
  if (!(floor_height > 0.0))
    throw ConfigError("floor_height must be > 0");
  if (!(path_loss_exponent > 0.0))
    throw ConfigError("path_loss_exponent must be > 0");
}

double log_distance_rss(double tx_power, double path_loss_exponent, double distance) {
  return tx_power - 10.0 * path_loss_exponent * std::log10(std::max(distance, 1.0));
}

namespace {

// Buildings sit side by side along x with a gap of half a floor width.
double building_offset(const SynthConfig &cfg, int b) { return b * cfg.grid_extent * 1.5; }

std::vector<AccessPoint> layout_from(const SynthConfig &cfg, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> pos(0.0, cfg.grid_extent);
  std::vector<AccessPoint> aps;
  aps.reserve(static_cast<std::size_t>(cfg.buildings * cfg.floors_per_building * cfg.aps_per_floor));
  for (int b = 0; b < cfg.buildings; ++b)
    for (int f = 0; f < cfg.floors_per_building; ++f)
      for (int a = 0; a < cfg.aps_per_floor; ++a) {
        const double x = pos(rng);
        const double y = pos(rng);
        aps.push_back({b, f, building_offset(cfg, b) + x, y, f * cfg.floor_height});
      }
  return aps;
}

} // namespace

std::vector<AccessPoint> synthesize_layout(const SynthConfig &cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  return layout_from(cfg, rng);
}

RadioMap synthesize_radiomap(const SynthConfig &cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::vector<AccessPoint> aps = layout_from(cfg, rng);
  std::uniform_real_distribution<double> pos(0.0, cfg.grid_extent);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);

  RadioMap map;
  map.name = cfg.name;
  map.ap_count = aps.size();
  map.floor_height = cfg.floor_height;
  map.not_detected_rss = kDefaultNotDetectedRss;
  map.fingerprints.reserve(static_cast<std::size_t>(cfg.buildings * cfg.floors_per_building * cfg.samples_per_floor));
  for (int b = 0; b < cfg.buildings; ++b) {
    for (int f = 0; f < cfg.floors_per_building; ++f) {
      map.deployment[b].insert(f);
      const double z = f * cfg.floor_height;
      for (int s = 0; s < cfg.samples_per_floor; ++s) {
        Fingerprint fp;
        fp.building = b;
        fp.floor = f;
        fp.x = building_offset(cfg, b) + pos(rng);
        fp.y = pos(rng);
        fp.rss.assign(aps.size(), kDefaultNotDetectedRss);
        for (std::size_t a = 0; a < aps.size(); ++a) {
          if (aps[a].building != b)
            continue;
          const double dx = fp.x - aps[a].x, dy = fp.y - aps[a].y, dz = z - aps[a].z;
          double v = log_distance_rss(cfg.tx_power, cfg.path_loss_exponent, std::sqrt(dx * dx + dy * dy + dz * dz));
          if (cfg.noise_sigma > 0.0)
            v += noise(rng);
          fp.rss[a] = std::clamp(v, kDefaultNotDetectedRss, kMaxDetectedRss);
        }
        map.fingerprints.push_back(std::move(fp));
      }
    }
  }
  return map;
}

} // namespace cascadeloc
