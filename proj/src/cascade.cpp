#include "cascadeloc/cascade.hpp"

#include "cascadeloc/errors.hpp"
#include "cascadeloc/log.hpp"
#include "cascadeloc/models/knn.hpp"

#include <fstream>

namespace cascadeloc {

using models::ModelSpec;
using models::Task;

CascadeSpec CascadeSpec::from_labels(std::string_view bh, std::string_view fh, std::string_view loc2d,
                                     std::uint64_t seed) {
  CascadeSpec s{ModelSpec::from_label(bh, Task::Classification, seed),
                ModelSpec::from_label(fh, Task::Classification, seed),
                ModelSpec::from_label(loc2d, Task::Regression, seed)};
  s.validate();
  return s;
}

CascadeSpec CascadeSpec::preset(std::string_view name, std::uint64_t seed) {
  if (name == "best")
    return from_labels("NN", "NN", "1NN", seed);
  if (name == "second")
    return from_labels("NN", "NN", "W3NN", seed);
  if (name == "fastest")
    return from_labels("DT", "DT", "W3NN", seed);
  throw ConfigError("unknown cascade preset '" + std::string(name) + "' (expected best, second or fastest)");
}

std::string CascadeSpec::label() const { return bh.label() + "-" + fh.label() + "-" + loc2d.label(); }

void CascadeSpec::validate() const {
  if (bh.task != Task::Classification || fh.task != Task::Classification)
    throw ParameterError("building and floor stages need classification specs");
  if (loc2d.task != Task::Regression)
    throw ParameterError("the coordinate stage needs a regression spec");
  bh.validate();
  fh.validate();
  loc2d.validate();
}

nlohmann::json to_json(const CascadeSpec &spec) {
  return {{"bh", models::to_json(spec.bh)}, {"fh", models::to_json(spec.fh)}, {"loc2d", models::to_json(spec.loc2d)}};
}

CascadeSpec cascade_spec_from_json(const nlohmann::json &j) {
  CascadeSpec s{models::spec_from_json(j.at("bh")), models::spec_from_json(j.at("fh")),
                models::spec_from_json(j.at("loc2d"))};
  s.validate();
  return s;
}

ModelSpec clamp_knn(const ModelSpec &spec, std::size_t n, std::string_view where) {
  if (!spec.is_knn() || static_cast<std::size_t>(spec.k) <= n || n == 0)
    return spec;
  ModelSpec clamped = spec;
  clamped.k = static_cast<int>(n);
  log::warn(std::string(where) + " has " + std::to_string(n) + " samples; " + spec.label() + " uses k=" +
            std::to_string(n));
  return clamped;
}

CascadeModel::CascadeModel(CascadeSpec spec, Deployment deployment, std::size_t ap_count,
                           std::unique_ptr<models::Classifier> bh,
                           std::map<int, std::unique_ptr<models::Classifier>> fh,
                           std::map<FloorKey, std::unique_ptr<models::Regressor>> loc)
    : spec_(std::move(spec)), deployment_(std::move(deployment)), ap_count_(ap_count), bh_(std::move(bh)),
      fh_(std::move(fh)), loc_(std::move(loc)) {
  if (deployment_.empty())
    throw ParameterError("cascade needs a non-empty deployment");
  if ((deployment_.size() > 1) != static_cast<bool>(bh_))
    throw ParameterError("a building model is required exactly for multi-building deployments");
  if (fh_.size() != deployment_.size() || loc_.size() != total_floors(deployment_))
    throw ParameterError("cascade stage models do not match the deployment");
  for (const auto &[b, floors] : deployment_) {
    if (!fh_.contains(b) || !fh_.at(b))
      throw ParameterError("missing floor model for building " + std::to_string(b));
    for (int f : floors)
      if (!loc_.contains({b, f}) || !loc_.at({b, f}))
        throw ParameterError("missing coordinate model for building " + std::to_string(b) + " floor " +
                             std::to_string(f));
  }
}

PositionEstimate CascadeModel::locate(std::span<const double> rss) const {
  if (rss.size() != ap_count_)
    throw DimensionError("query has " + std::to_string(rss.size()) + " values, expected " + std::to_string(ap_count_));
  PositionEstimate out;
  out.building = bh_ ? bh_->predict(rss) : deployment_.begin()->first;
  out.floor = fh_.at(out.building)->predict(rss);
  const Point2 p = loc_.at({out.building, out.floor})->predict(rss);
  out.x = p.x;
  out.y = p.y;
  return out;
}

std::size_t CascadeModel::model_count() const { return (bh_ ? 1 : 0) + fh_.size() + loc_.size(); }

const models::Classifier &CascadeModel::fh_model(int building) const {
  auto it = fh_.find(building);
  if (it == fh_.end())
    throw ParameterError("no floor model for building " + std::to_string(building));
  return *it->second;
}

const models::Regressor &CascadeModel::loc_model(int building, int floor) const {
  auto it = loc_.find({building, floor});
  if (it == loc_.end())
    throw ParameterError("no coordinate model for building " + std::to_string(building) + " floor " +
                         std::to_string(floor));
  return *it->second;
}

nlohmann::json CascadeModel::to_json() const {
  nlohmann::json deployment = nlohmann::json::array();
  for (const auto &[b, floors] : deployment_)
    deployment.push_back({{"building", b}, {"floors", std::vector<int>(floors.begin(), floors.end())}});
  nlohmann::json fh = nlohmann::json::array();
  for (const auto &[b, m] : fh_)
    fh.push_back({{"building", b}, {"model", m->to_json()}});
  nlohmann::json loc = nlohmann::json::array();
  for (const auto &[key, m] : loc_)
    loc.push_back({{"building", key.first}, {"floor", key.second}, {"model", m->to_json()}});
  return {{"version", models::kSerializationVersion},
          {"spec", cascadeloc::to_json(spec_)},
          {"ap_count", ap_count_},
          {"deployment", deployment},
          {"bh", bh_ ? bh_->to_json() : nlohmann::json(nullptr)},
          {"fh", fh},
          {"loc", loc}};
}

CascadeModel CascadeModel::from_json(const nlohmann::json &j) {
  if (j.value("version", 0) != models::kSerializationVersion)
    throw SchemaError("unsupported cascade bundle version");
  Deployment deployment;
  for (const auto &e : j.at("deployment")) {
    auto floors = e.at("floors").get<std::vector<int>>();
    deployment[e.at("building").get<int>()] = std::set<int>(floors.begin(), floors.end());
  }
  std::unique_ptr<models::Classifier> bh;
  if (!j.at("bh").is_null())
    bh = models::classifier_from_json(j["bh"]);
  std::map<int, std::unique_ptr<models::Classifier>> fh;
  for (const auto &e : j.at("fh"))
    fh[e.at("building").get<int>()] = models::classifier_from_json(e.at("model"));
  std::map<FloorKey, std::unique_ptr<models::Regressor>> loc;
  for (const auto &e : j.at("loc"))
    loc[{e.at("building").get<int>(), e.at("floor").get<int>()}] = models::regressor_from_json(e.at("model"));
  return CascadeModel(cascade_spec_from_json(j.at("spec")), std::move(deployment), j.at("ap_count").get<std::size_t>(),
                      std::move(bh), std::move(fh), std::move(loc));
}

void CascadeModel::save(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

CascadeModel CascadeModel::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

CascadeModel train_cascade(const RadioMap &map, const CascadeSpec &spec) {
  spec.validate();
  if (map.empty())
    throw EmptyDatasetError("cannot train a cascade on an empty radio map");
  if (const auto v = validate_radiomap(map); !v.empty())
    throw ValidationError("radio map is invalid: " + to_string(v.front()));

  const FeatureMatrix all = features_of(map.fingerprints);
  std::map<int, std::vector<std::size_t>> by_building;
  std::map<CascadeModel::FloorKey, std::vector<std::size_t>> by_floor;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto &fp = map.fingerprints[i];
    by_building[fp.building].push_back(i);
    by_floor[{fp.building, fp.floor}].push_back(i);
  }
  for (const auto &[b, floors] : map.deployment)
    for (int f : floors)
      if (!by_floor.contains({b, f}))
        throw EmptyDatasetError("building " + std::to_string(b) + " floor " + std::to_string(f) +
                                " has no training samples");

  std::unique_ptr<models::Classifier> bh;
  if (map.multi_building())
    bh = models::fit_classifier(spec.bh, all, buildings_of(map.fingerprints));

  std::map<int, std::unique_ptr<models::Classifier>> fh;
  for (const auto &[b, rows] : by_building) {
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t i : rows)
      labels.push_back(map.fingerprints[i].floor);
    const std::string where = "building " + std::to_string(b);
    fh[b] = models::fit_classifier(clamp_knn(spec.fh, rows.size(), where), all.select_rows(rows), labels);
  }

  std::map<CascadeModel::FloorKey, std::unique_ptr<models::Regressor>> loc;
  for (const auto &[key, rows] : by_floor) {
    std::vector<Point2> targets;
    targets.reserve(rows.size());
    for (std::size_t i : rows)
      targets.push_back(map.fingerprints[i].position());
    const std::string where = "building " + std::to_string(key.first) + " floor " + std::to_string(key.second);
    loc[key] = models::fit_regressor(clamp_knn(spec.loc2d, rows.size(), where), all.select_rows(rows), targets);
  }

  return CascadeModel(spec, map.deployment, map.ap_count, std::move(bh), std::move(fh), std::move(loc));
}

BenchmarkModel::BenchmarkModel(ModelSpec spec, const RadioMap &map)
    : spec_(std::move(spec)), train_(features_of(map.fingerprints)), buildings_(buildings_of(map.fingerprints)),
      floors_(floors_of(map.fingerprints)), positions_(positions_of(map.fingerprints)) {
  if (!spec_.is_knn())
    throw UnsupportedBenchmarkError("benchmark models must be kNN or WkNN, got " + spec_.label());
  if (map.empty())
    throw EmptyDatasetError("cannot train a benchmark on an empty radio map");
  spec_ = clamp_knn(spec_, map.size(), "benchmark training set");
}

PositionEstimate BenchmarkModel::locate(std::span<const double> rss) const {
  const bool weighted = spec_.family == models::Family::Wknn;
  const auto neighbors = models::nearest_neighbors(train_, rss, static_cast<std::size_t>(spec_.k));
  PositionEstimate out;
  out.building = models::vote(neighbors, buildings_, weighted);
  std::vector<models::Neighbor> same_building;
  same_building.reserve(neighbors.size());
  for (const auto &n : neighbors)
    if (buildings_[n.index] == out.building)
      same_building.push_back(n);
  out.floor = models::vote(same_building, floors_, weighted);
  const Point2 p = models::average(neighbors, positions_, weighted);
  out.x = p.x;
  out.y = p.y;
  return out;
}

BenchmarkModel train_benchmark(const RadioMap &map, const ModelSpec &spec) { return BenchmarkModel(spec, map); }

} // namespace cascadeloc
