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

#ifndef RSCHED_REPORT_SOLUTION_IO_HPP
#define RSCHED_REPORT_SOLUTION_IO_HPP

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rsched/instance_io.hpp"
#include "rsched/model.hpp"
#include "rsched/qubo/model.hpp"
#include "rsched/report/validate.hpp"

namespace rsched {

// ---------------------------------------------------------------------------
// Solution document
//
//   {
//     "trains": [
//       {"train": 0, "activities": [
//         {"kind": "empty", "from": "Berlin", "to": "Munich", "km": 585},
//         {"kind": "maintenance", "type": 0, "station": "Munich"},
//         {"kind": "trip", "trip": 4, "slot": 0}]},
//       ...],
//     "summary": {"rawAllocatedTrips": 1, "correctedAllocatedTrips": 1,
//                 "emptyKm": 585, "usedTrains": 1, "flaggedTrips": [], ...}
//   }
//
// "summary" is informational and ignored when reading.

inline std::string writeSchedule(const Instance& inst, const Schedule& sched, const ValidationReport* rep = nullptr) {
  using detail::Json;
  const auto& names = inst.network.stations;
  Json doc = Json::object();
  Json trains = Json::array();
  for (std::size_t i = 0; i < sched.perTrain.size(); ++i) {
    Json acts = Json::array();
    for (const Activity& a : sched.perTrain[i]) {
      Json j = Json::object();
      if (const auto* rt = std::get_if<RegularTrip>(&a)) {
        j["kind"] = "trip";
        j["trip"] = rt->trip;
        j["slot"] = rt->slot;
      } else if (const auto* mt = std::get_if<MaintenanceTask>(&a)) {
        j["kind"] = "maintenance";
        j["type"] = mt->type;
        j["station"] = names.at(static_cast<std::size_t>(mt->station));
      } else {
        const auto& r = std::get<EmptyRide>(a);
        j["kind"] = "empty";
        j["from"] = names.at(static_cast<std::size_t>(r.from));
        j["to"] = names.at(static_cast<std::size_t>(r.to));
        j["km"] = r.km;
      }
      acts.push_back(std::move(j));
    }
    Json t = Json::object();
    t["train"] = static_cast<int>(i);
    t["activities"] = std::move(acts);
    trains.push_back(std::move(t));
  }
  doc["trains"] = std::move(trains);
  if (rep) {
    Json s = Json::object();
    s["rawAllocatedTrips"] = rep->rawAllocatedTrips;
    s["correctedAllocatedTrips"] = rep->correctedAllocatedTrips;
    s["emptyKm"] = rep->emptyKm;
    s["maintenanceLegKm"] = rep->maintenanceLegKm;
    s["usedTrains"] = rep->usedTrains;
    s["flaggedTrips"] = rep->flaggedTrips;
    Json v = Json::array();
    for (const Violation& x : rep->violations) {
      Json e = Json::object();
      e["kind"] = toString(x.kind);
      e["train"] = x.train;
      e["activity"] = x.activity;
      e["detail"] = x.detail;
      v.push_back(std::move(e));
    }
    s["violations"] = std::move(v);
    doc["summary"] = std::move(s);
  }
  return doc.dump(2) + "\n";
}

inline Schedule parseSchedule(const Instance& inst, std::string_view text) {
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("solution: ") + e.what());
  }
  auto station = [&](const Json& v, const std::string& path) -> StationId {
    if (!v.is_string()) throw ParseError(path + ": expected a station name");
    auto s = inst.network.find(v.get<std::string>());
    if (!s) throw ParseError(path + ": unknown station '" + v.get<std::string>() + "'");
    return *s;
  };
  auto integer = [](const Json& obj, const char* key, const std::string& path) -> std::int64_t {
    if (!obj.contains(key) || !obj[key].is_number_integer()) throw ParseError(path + "." + key + ": expected an integer");
    return obj[key].get<std::int64_t>();
  };
  if (!doc.is_object() || !doc.contains("trains") || !doc["trains"].is_array()) throw ParseError("solution: missing 'trains' array");
  Schedule s = Schedule::empty(inst);
  for (std::size_t n = 0; n < doc["trains"].size(); ++n) {
    const Json& t = doc["trains"][n];
    const std::string path = "trains[" + std::to_string(n) + "]";
    const auto i = integer(t, "train", path);
    if (i < 0 || i >= inst.trainCount()) throw ParseError(path + ".train: unknown train");
    if (!t.contains("activities") || !t["activities"].is_array()) throw ParseError(path + ".activities: expected an array");
    auto& acts = s.perTrain[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < t["activities"].size(); ++k) {
      const Json& a = t["activities"][k];
      const std::string ap = path + ".activities[" + std::to_string(k) + "]";
      const std::string kind = a.value("kind", "");
      if (kind == "trip") {
        acts.emplace_back(RegularTrip{static_cast<TripId>(integer(a, "trip", ap)), a.contains("slot") ? static_cast<int>(integer(a, "slot", ap)) : -1});
      } else if (kind == "maintenance") {
        acts.emplace_back(MaintenanceTask{static_cast<MaintTypeId>(integer(a, "type", ap)), station(a.value("station", Json()), ap + ".station")});
      } else if (kind == "empty") {
        acts.emplace_back(EmptyRide{station(a.value("from", Json()), ap + ".from"), station(a.value("to", Json()), ap + ".to"), integer(a, "km", ap)});
      } else {
        throw ParseError(ap + ".kind: expected trip, maintenance or empty");
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Bit vectors: one line of '0'/'1' characters in variable order.

inline std::string writeBits(const qubo::Bits& bits) {
  std::string s;
  s.reserve(bits.size() + 1);
  for (auto b : bits) s += b ? '1' : '0';
  return s + "\n";
}

inline qubo::Bits parseBits(std::string_view text) {
  qubo::Bits bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != '\n' && c != '\r' && c != ' ') throw ParseError("bits: unexpected character");
  }
  return bits;
}

}  // namespace rsched

#endif  // RSCHED_REPORT_SOLUTION_IO_HPP
