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

#ifndef RSCHED_MODEL_HPP
#define RSCHED_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rsched {

using StationId = int;
using TripId = int;
using TrainId = int;
using MaintTypeId = int;
/// Kilometres.
using Km = std::int64_t;
/// Minutes from the start of the scheduling horizon.
using Minutes = std::int64_t;

/// Marks an absent entry of a distance or duration matrix.
inline constexpr std::int64_t kMissing = -1;

/// Stations with full (possibly asymmetric) distance and duration matrices.
struct Network {
  std::vector<std::string> stations;
  std::vector<Km> distanceKm;        // row-major, stations.size()^2
  std::vector<Minutes> durationMin;  // row-major, stations.size()^2

  int size() const { return static_cast<int>(stations.size()); }
  Km distance(StationId b, StationId c) const { return distanceKm[index(b, c)]; }
  Minutes duration(StationId b, StationId c) const { return durationMin[index(b, c)]; }
  Km& distance(StationId b, StationId c) { return distanceKm[index(b, c)]; }
  Minutes& duration(StationId b, StationId c) { return durationMin[index(b, c)]; }

  std::optional<StationId> find(const std::string& name) const {
    auto it = std::find(stations.begin(), stations.end(), name);
    if (it == stations.end()) return std::nullopt;
    return static_cast<StationId>(it - stations.begin());
  }

  static Network withStations(std::vector<std::string> names) {
    Network n;
    const auto l = names.size();
    n.stations = std::move(names);
    n.distanceKm.assign(l * l, kMissing);
    n.durationMin.assign(l * l, kMissing);
    for (std::size_t b = 0; b < l; ++b) {
      n.distanceKm[b * l + b] = 0;
      n.durationMin[b * l + b] = 0;
    }
    return n;
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t index(StationId b, StationId c) const {
    return static_cast<std::size_t>(b) * stations.size() + static_cast<std::size_t>(c);
  }
};

struct Trip {
  TripId id = 0;
  StationId departureStation = 0;
  StationId arrivalStation = 0;
  Minutes departureTime = 0;
  Minutes arrivalTime = 0;
  Km distance = 0;
  Minutes duration = 0;
  Minutes postProc = 0;

  friend bool operator==(const Trip&, const Trip&) = default;
};

struct Train {
  TrainId id = 0;
  StationId initialStation = 0;
  Minutes earliestTime = 0;
  /// km since the last maintenance, indexed by maintenance type.
  std::vector<Km> initialKm;

  friend bool operator==(const Train&, const Train&) = default;
};

struct MaintenanceType {
  MaintTypeId id = 0;
  std::vector<StationId> stations;
  Minutes duration = 0;
  bool isPeriodic = true;
  /// Interval length for periodic types, absolute km reading otherwise.
  Km limit = 0;

  friend bool operator==(const MaintenanceType&, const MaintenanceType&) = default;
};

struct Instance {
  Minutes horizonEnd = 1440;
  Network network;
  std::vector<Trip> trips;
  std::vector<Train> trains;
  std::vector<MaintenanceType> maintenanceTypes;

  int tripCount() const { return static_cast<int>(trips.size()); }
  int trainCount() const { return static_cast<int>(trains.size()); }
  int typeCount() const { return static_cast<int>(maintenanceTypes.size()); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

// ---------------------------------------------------------------------------
// Schedules

struct RegularTrip {
  TripId trip = 0;
  /// Slot the trip was planned in, -1 when the producer has no slot notion.
  int slot = -1;
  friend bool operator==(const RegularTrip&, const RegularTrip&) = default;
};

struct MaintenanceTask {
  MaintTypeId type = 0;
  StationId station = 0;
  friend bool operator==(const MaintenanceTask&, const MaintenanceTask&) = default;
};

struct EmptyRide {
  StationId from = 0;
  StationId to = 0;
  Km km = 0;
  friend bool operator==(const EmptyRide&, const EmptyRide&) = default;
};

using Activity = std::variant<RegularTrip, MaintenanceTask, EmptyRide>;

struct Schedule {
  std::vector<std::vector<Activity>> perTrain;

  static Schedule empty(const Instance& inst) {
    Schedule s;
    s.perTrain.resize(inst.trains.size());
    return s;
  }

  int allocatedTrips() const {
    int n = 0;
    for (const auto& acts : perTrain)
      for (const auto& a : acts) n += std::holds_alternative<RegularTrip>(a) ? 1 : 0;
    return n;
  }

  Km emptyKm() const {
    Km total = 0;
    for (const auto& acts : perTrain)
      for (const auto& a : acts)
        if (const auto* r = std::get_if<EmptyRide>(&a)) total += r->km;
    return total;
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// ---------------------------------------------------------------------------
// Instance validation

namespace detail {

inline bool validStation(const Instance& inst, StationId s) { return s >= 0 && s < inst.network.size(); }

inline bool inHorizon(const Instance& inst, Minutes t) { return t >= 0 && t < inst.horizonEnd; }

}  // namespace detail

/// Every violated instance invariant, one human-readable entry each.
///
/// The result depends only on the instance contents; valid instances give an
/// empty list.
inline std::vector<std::string> validateInstance(const Instance& inst) {
  std::vector<std::string> out;
  auto report = [&](std::string msg) { out.push_back(std::move(msg)); };
  const int l = inst.network.size();

  if (inst.horizonEnd <= 0) report("horizonEnd must be positive");
  if (l == 0) report("network has no stations");
  {
    std::set<std::string> names(inst.network.stations.begin(), inst.network.stations.end());
    if (static_cast<int>(names.size()) != l) report("station names are not unique");
  }

  const auto cells = static_cast<std::size_t>(l) * static_cast<std::size_t>(l);
  if (inst.network.distanceKm.size() != cells) report("distanceKm matrix has wrong shape");
  if (inst.network.durationMin.size() != cells) report("durationMin matrix has wrong shape");
  if (inst.network.distanceKm.size() == cells && inst.network.durationMin.size() == cells) {
    const auto& names = inst.network.stations;
    for (StationId b = 0; b < l; ++b) {
      if (inst.network.distance(b, b) != 0) report("diagonal distance nonzero at " + names[b]);
      if (inst.network.duration(b, b) != 0) report("diagonal duration nonzero at " + names[b]);
      for (StationId c = 0; c < l; ++c) {
        if (b == c) continue;
        const std::string pair = names[b] + "->" + names[c];
        const Km d = inst.network.distance(b, c);
        const Minutes t = inst.network.duration(b, c);
        if (d == kMissing) report("distance missing for " + pair);
        else if (d <= 0) report("distance must be positive for " + pair);
        if (t == kMissing) report("duration missing for " + pair);
        else if (t <= 0) report("duration must be positive for " + pair);
      }
    }
  }

  for (std::size_t k = 0; k < inst.trips.size(); ++k) {
    const Trip& f = inst.trips[k];
    const std::string where = "trip " + std::to_string(k) + ": ";
    if (f.id != static_cast<TripId>(k)) report(where + "id does not match its position");
    const bool stationsOk = detail::validStation(inst, f.departureStation) && detail::validStation(inst, f.arrivalStation);
    if (!stationsOk) report(where + "unknown station");
    else if (f.departureStation == f.arrivalStation) report(where + "departure and arrival station coincide");
    if (!detail::inHorizon(inst, f.departureTime) || !detail::inHorizon(inst, f.arrivalTime))
      report(where + "time outside the horizon");
    if (f.departureTime >= f.arrivalTime) report(where + "departure not before arrival");
    if (f.arrivalTime - f.departureTime != f.duration) report(where + "arrival - departure differs from duration");
    if (f.distance <= 0) report(where + "distance must be positive");
    if (f.postProc < 0) report(where + "negative post-processing time");
  }

  for (std::size_t i = 0; i < inst.trains.size(); ++i) {
    const Train& z = inst.trains[i];
    const std::string where = "train " + std::to_string(i) + ": ";
    if (z.id != static_cast<TrainId>(i)) report(where + "id does not match its position");
    if (!detail::validStation(inst, z.initialStation)) report(where + "unknown initial station");
    if (!detail::inHorizon(inst, z.earliestTime)) report(where + "earliestTime outside the horizon");
    if (z.initialKm.size() != inst.maintenanceTypes.size()) {
      report(where + "initialKm must have one entry per maintenance type");
      continue;
    }
    for (std::size_t u = 0; u < z.initialKm.size(); ++u) {
      if (z.initialKm[u] < 0) report(where + "negative initialKm for type " + std::to_string(u));
      else if (z.initialKm[u] > inst.maintenanceTypes[u].limit)
        report(where + "initialKm exceeds the limit of type " + std::to_string(u));
    }
  }

  std::set<Km> nonPeriodicLimits;
  for (std::size_t u = 0; u < inst.maintenanceTypes.size(); ++u) {
    const MaintenanceType& w = inst.maintenanceTypes[u];
    const std::string where = "maintenance type " + std::to_string(u) + ": ";
    if (w.id != static_cast<MaintTypeId>(u)) report(where + "id does not match its position");
    if (w.stations.empty()) report(where + "no stations");
    for (StationId s : w.stations)
      if (!detail::validStation(inst, s)) report(where + "unknown station");
    if (std::set<StationId>(w.stations.begin(), w.stations.end()).size() != w.stations.size())
      report(where + "duplicate station");
    if (w.limit <= 0) report(where + "limit must be positive");
    if (w.duration < 0) report(where + "negative duration");
    if (!w.isPeriodic && !nonPeriodicLimits.insert(w.limit).second)
      report(where + "non-periodic limits must be pairwise distinct");
  }
  return out;
}

}  // namespace rsched

#endif  // RSCHED_MODEL_HPP
