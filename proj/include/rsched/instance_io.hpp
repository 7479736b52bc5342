// Copyright 2026 The rsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSCHED_INSTANCE_IO_HPP
#define RSCHED_INSTANCE_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rsched/model.hpp"

namespace rsched {

/// Malformed document: bad syntax, wrong types, unknown references.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document describing an instance that breaks an invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid instance:";
    for (const auto& x : v) s += "\n  - " + x;
    return s;
  }
  std::vector<std::string> violations_;
};

// ---------------------------------------------------------------------------
// Instance document
//
//   {
//     "horizonEnd": 1440,
//     "stations": ["Berlin", ...],
//     "distanceKm":  {"Berlin": {"Berlin": 0, "Hamburg": 289, ...}, ...},
//     "durationMin": {"Berlin": {"Berlin": 0, "Hamburg": 105, ...}, ...},
//     "trips": [{"id": 0, "departureStation": "Berlin", "arrivalStation": "Hamburg",
//                "departureTime": 300, "arrivalTime": 405, "distance": 289,
//                "duration": 105, "postProc": 120}, ...],
//     "trains": [{"id": 0, "initialStation": "Berlin", "earliestTime": 0,
//                 "initialKm": [5120, 17003]}, ...],
//     "maintenanceTypes": [{"id": 0, "stations": ["Berlin"], "duration": 120,
//                           "isPeriodic": true, "limit": 8000}, ...]
//   }
//
// initialKm is indexed by maintenance type id. Keys are always written in the
// order above, so equal instances serialise to identical bytes.

namespace detail {

using Json = nlohmann::ordered_json;

inline const Json& require(const Json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + ": missing field '" + std::string(key) + "'");
  return *it;
}

inline std::int64_t requireInt(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + std::string(key) + ": expected an integer");
  return v.get<std::int64_t>();
}

inline StationId requireStation(const Network& net, const Json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a station name");
  auto id = net.find(v.get<std::string>());
  if (!id) throw ParseError(path + ": unknown station '" + v.get<std::string>() + "'");
  return *id;
}

inline void readMatrix(const Json& doc, std::string_view key, Network& net, std::vector<std::int64_t>& cells) {
  const std::string path(key);
  const Json& m = require(doc, key, "$");
  if (!m.is_object()) throw ParseError(path + ": expected an object keyed by station");
  const auto l = static_cast<std::size_t>(net.size());
  cells.assign(l * l, kMissing);
  for (auto row = m.begin(); row != m.end(); ++row) {
    const std::string rowPath = path + "." + row.key();
    auto from = net.find(row.key());
    if (!from) throw ParseError(rowPath + ": unknown station");
    if (!row.value().is_object()) throw ParseError(rowPath + ": expected an object");
    for (auto col = row.value().begin(); col != row.value().end(); ++col) {
      auto to = net.find(col.key());
      if (!to) throw ParseError(rowPath + "." + col.key() + ": unknown station");
      if (!col.value().is_number_integer()) throw ParseError(rowPath + "." + col.key() + ": expected an integer");
      cells[static_cast<std::size_t>(*from) * l + static_cast<std::size_t>(*to)] = col.value().get<std::int64_t>();
    }
  }
}

inline Json writeMatrix(const Network& net, const std::vector<std::int64_t>& cells) {
  Json m = Json::object();
  const auto l = static_cast<std::size_t>(net.size());
  for (std::size_t b = 0; b < l; ++b) {
    Json row = Json::object();
    for (std::size_t c = 0; c < l; ++c)
      if (cells[b * l + c] != kMissing) row[net.stations[c]] = cells[b * l + c];
    m[net.stations[b]] = std::move(row);
  }
  return m;
}

}  // namespace detail

/// Parses and validates an instance document.
inline Instance parseInstance(std::string_view document) {
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("$: expected an object");

  Instance inst;
  inst.horizonEnd = detail::requireInt(doc, "horizonEnd", "$");

  const Json& stations = detail::require(doc, "stations", "$");
  if (!stations.is_array()) throw ParseError("stations: expected an array");
  std::vector<std::string> names;
  for (std::size_t b = 0; b < stations.size(); ++b) {
    if (!stations[b].is_string()) throw ParseError("stations[" + std::to_string(b) + "]: expected a string");
    names.push_back(stations[b].get<std::string>());
  }
  inst.network.stations = std::move(names);
  detail::readMatrix(doc, "distanceKm", inst.network, inst.network.distanceKm);
  detail::readMatrix(doc, "durationMin", inst.network, inst.network.durationMin);

  const Json& trips = detail::require(doc, "trips", "$");
  if (!trips.is_array()) throw ParseError("trips: expected an array");
  for (std::size_t k = 0; k < trips.size(); ++k) {
    const std::string path = "trips[" + std::to_string(k) + "]";
    const Json& t = trips[k];
    Trip f;
    f.id = static_cast<TripId>(detail::requireInt(t, "id", path));
    f.departureStation = detail::requireStation(inst.network, detail::require(t, "departureStation", path), path + ".departureStation");
    f.arrivalStation = detail::requireStation(inst.network, detail::require(t, "arrivalStation", path), path + ".arrivalStation");
    f.departureTime = detail::requireInt(t, "departureTime", path);
    f.arrivalTime = detail::requireInt(t, "arrivalTime", path);
    f.distance = detail::requireInt(t, "distance", path);
    f.duration = detail::requireInt(t, "duration", path);
    f.postProc = detail::requireInt(t, "postProc", path);
    inst.trips.push_back(f);
  }

  const Json& types = detail::require(doc, "maintenanceTypes", "$");
  if (!types.is_array()) throw ParseError("maintenanceTypes: expected an array");
  for (std::size_t u = 0; u < types.size(); ++u) {
    const std::string path = "maintenanceTypes[" + std::to_string(u) + "]";
    const Json& t = types[u];
    MaintenanceType w;
    w.id = static_cast<MaintTypeId>(detail::requireInt(t, "id", path));
    const Json& st = detail::require(t, "stations", path);
    if (!st.is_array()) throw ParseError(path + ".stations: expected an array");
    for (std::size_t s = 0; s < st.size(); ++s)
      w.stations.push_back(detail::requireStation(inst.network, st[s], path + ".stations[" + std::to_string(s) + "]"));
    w.duration = detail::requireInt(t, "duration", path);
    const Json& periodic = detail::require(t, "isPeriodic", path);
    if (!periodic.is_boolean()) throw ParseError(path + ".isPeriodic: expected a boolean");
    w.isPeriodic = periodic.get<bool>();
    w.limit = detail::requireInt(t, "limit", path);
    inst.maintenanceTypes.push_back(std::move(w));
  }

  const Json& trains = detail::require(doc, "trains", "$");
  if (!trains.is_array()) throw ParseError("trains: expected an array");
  for (std::size_t i = 0; i < trains.size(); ++i) {
    const std::string path = "trains[" + std::to_string(i) + "]";
    const Json& t = trains[i];
    Train z;
    z.id = static_cast<TrainId>(detail::requireInt(t, "id", path));
    z.initialStation = detail::requireStation(inst.network, detail::require(t, "initialStation", path), path + ".initialStation");
    z.earliestTime = detail::requireInt(t, "earliestTime", path);
    const Json& km = detail::require(t, "initialKm", path);
    if (!km.is_array()) throw ParseError(path + ".initialKm: expected an array");
    for (std::size_t u = 0; u < km.size(); ++u) {
      if (!km[u].is_number_integer())
        throw ParseError(path + ".initialKm[" + std::to_string(u) + "]: expected an integer");
      z.initialKm.push_back(km[u].get<Km>());
    }
    inst.trains.push_back(std::move(z));
  }

  if (auto violations = validateInstance(inst); !violations.empty()) throw ValidationError(std::move(violations));
  return inst;
}

/// Canonical serialisation; parseInstance() inverts it.
inline std::string writeInstance(const Instance& inst) {
  if (inst.trips.empty()) throw std::invalid_argument("writeInstance: instance has no trips");
  if (auto violations = validateInstance(inst); !violations.empty()) throw ValidationError(std::move(violations));

  using detail::Json;
  const auto& net = inst.network;
  Json doc = Json::object();
  doc["horizonEnd"] = inst.horizonEnd;
  doc["stations"] = net.stations;
  doc["distanceKm"] = detail::writeMatrix(net, net.distanceKm);
  doc["durationMin"] = detail::writeMatrix(net, net.durationMin);

  Json trips = Json::array();
  for (const Trip& f : inst.trips) {
    Json t = Json::object();
    t["id"] = f.id;
    t["departureStation"] = net.stations[f.departureStation];
    t["arrivalStation"] = net.stations[f.arrivalStation];
    t["departureTime"] = f.departureTime;
    t["arrivalTime"] = f.arrivalTime;
    t["distance"] = f.distance;
    t["duration"] = f.duration;
    t["postProc"] = f.postProc;
    trips.push_back(std::move(t));
  }
  doc["trips"] = std::move(trips);

  Json trains = Json::array();
  for (const Train& z : inst.trains) {
    Json t = Json::object();
    t["id"] = z.id;
    t["initialStation"] = net.stations[z.initialStation];
    t["earliestTime"] = z.earliestTime;
    t["initialKm"] = z.initialKm;
    trains.push_back(std::move(t));
  }
  doc["trains"] = std::move(trains);

  Json types = Json::array();
  for (const MaintenanceType& w : inst.maintenanceTypes) {
    Json t = Json::object();
    t["id"] = w.id;
    Json st = Json::array();
    for (StationId s : w.stations) st.push_back(net.stations[s]);
    t["stations"] = std::move(st);
    t["duration"] = w.duration;
    t["isPeriodic"] = w.isPeriodic;
    t["limit"] = w.limit;
    types.push_back(std::move(t));
  }
  doc["maintenanceTypes"] = std::move(types);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Artificial instances

struct MaintenanceSpec {
  std::vector<std::string> stations;
  Minutes duration = 0;
  bool isPeriodic = true;
  Km limit = 0;
};

/// Settings for the random five-city timetable generator.
///
/// Only the Munich-Cologne entry (570 km, 259 min), the post-processing time
/// and the two maintenance intervals come from published figures. The other
/// distances, travel times, maintenance stations and maintenance durations
/// are plausible placeholders.
struct GeneratorConfig {
  std::vector<std::string> cities{"Berlin", "Frankfurt", "Hamburg", "Munich", "Cologne"};
  /// Symmetric tables; (a, b) entries are looked up in either order.
  std::vector<std::pair<std::pair<std::string, std::string>, std::pair<Km, Minutes>>> legs{
      {{"Berlin", "Frankfurt"}, {545, 240}}, {{"Berlin", "Hamburg"}, {289, 105}},
      {{"Berlin", "Munich"}, {585, 240}},    {{"Berlin", "Cologne"}, {575, 260}},
      {{"Frankfurt", "Hamburg"}, {495, 220}}, {{"Frankfurt", "Munich"}, {390, 190}},
      {{"Frankfurt", "Cologne"}, {180, 65}},  {{"Hamburg", "Munich"}, {780, 340}},
      {{"Hamburg", "Cologne"}, {425, 240}},  {{"Munich", "Cologne"}, {570, 259}},
  };
  int tripCount = 72;
  int trainCount = 39;
  Minutes horizonEnd = 1440;
  Minutes postProc = 120;
  Minutes earliestTime = 0;
  std::vector<MaintenanceSpec> maintenance{
      {{"Berlin", "Munich"}, 120, true, 8000},
      {{"Frankfurt"}, 240, true, 24000},
  };
  std::uint64_t seed = 1;
};

/// Looks up a symmetric leg table; throws when a city pair is absent.
inline Network buildNetwork(const GeneratorConfig& cfg) {
  Network net = Network::withStations(cfg.cities);
  for (const auto& [pair, value] : cfg.legs) {
    auto a = net.find(pair.first);
    auto b = net.find(pair.second);
    if (!a || !b) continue;
    net.distance(*a, *b) = net.distance(*b, *a) = value.first;
    net.duration(*a, *b) = net.duration(*b, *a) = value.second;
  }
  for (StationId a = 0; a < net.size(); ++a)
    for (StationId b = 0; b < net.size(); ++b)
      if (a != b && (net.distance(a, b) == kMissing || net.duration(a, b) == kMissing))
        throw std::invalid_argument("generator: no distance/duration for " + net.stations[a] + "-" + net.stations[b]);
  return net;
}

inline Instance generateArtificial(const GeneratorConfig& cfg) {
  if (cfg.tripCount <= 0 || cfg.trainCount <= 0) throw std::invalid_argument("generator: trip and train counts must be positive");
  if (cfg.cities.size() < 2) throw std::invalid_argument("generator: need at least two cities");

  Instance inst;
  inst.horizonEnd = cfg.horizonEnd;
  inst.network = buildNetwork(cfg);
  const int l = inst.network.size();
  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };

  for (std::size_t u = 0; u < cfg.maintenance.size(); ++u) {
    const auto& cm = cfg.maintenance[u];
    MaintenanceType w;
    w.id = static_cast<MaintTypeId>(u);
    for (const auto& name : cm.stations) {
      auto s = inst.network.find(name);
      if (!s) throw std::invalid_argument("generator: maintenance station '" + name + "' is not a configured city");
      w.stations.push_back(*s);
    }
    w.duration = cm.duration;
    w.isPeriodic = cm.isPeriodic;
    w.limit = cm.limit;
    inst.maintenanceTypes.push_back(std::move(w));
  }

  for (int k = 0; k < cfg.tripCount; ++k) {
    Trip f;
    f.id = k;
    f.departureStation = static_cast<StationId>(uniform(0, l - 1));
    f.arrivalStation = static_cast<StationId>(uniform(0, l - 2));
    if (f.arrivalStation >= f.departureStation) ++f.arrivalStation;
    f.distance = inst.network.distance(f.departureStation, f.arrivalStation);
    f.duration = inst.network.duration(f.departureStation, f.arrivalStation);
    if (f.duration >= cfg.horizonEnd) throw std::invalid_argument("generator: horizon shorter than a leg");
    f.departureTime = uniform(0, cfg.horizonEnd - f.duration - 1);
    f.arrivalTime = f.departureTime + f.duration;
    f.postProc = cfg.postProc;
    inst.trips.push_back(f);
  }

  for (int i = 0; i < cfg.trainCount; ++i) {
    Train z;
    z.id = i;
    z.initialStation = static_cast<StationId>(uniform(0, l - 1));
    z.earliestTime = cfg.earliestTime;
    for (const auto& w : inst.maintenanceTypes) z.initialKm.push_back(uniform(0, w.limit - 1));
    inst.trains.push_back(std::move(z));
  }

  if (auto violations = validateInstance(inst); !violations.empty()) throw ValidationError(std::move(violations));
  return inst;
}

/// Keeps ceil(fraction * n) trips and ceil(fraction * m) trains, chosen by seed,
/// in their original relative order and renumbered densely.
inline Instance subsetInstance(const Instance& inst, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("subset: fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  auto pick = [&](int total) {
    const int keep = std::min(total, static_cast<int>(std::ceil(fraction * total - 1e-9)));
    std::vector<int> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());
    return order;
  };

  Instance out;
  out.horizonEnd = inst.horizonEnd;
  out.network = inst.network;
  out.maintenanceTypes = inst.maintenanceTypes;
  for (int k : pick(inst.tripCount())) {
    Trip f = inst.trips[static_cast<std::size_t>(k)];
    f.id = out.tripCount();
    out.trips.push_back(f);
  }
  for (int i : pick(inst.trainCount())) {
    Train z = inst.trains[static_cast<std::size_t>(i)];
    z.id = out.trainCount();
    out.trains.push_back(std::move(z));
  }
  return out;
}

}  // namespace rsched

#endif  // RSCHED_INSTANCE_IO_HPP
