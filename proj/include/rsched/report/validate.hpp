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

#ifndef RSCHED_REPORT_VALIDATE_HPP
#define RSCHED_REPORT_VALIDATE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rsched/model.hpp"

namespace rsched {

/// A schedule refers to a trip, train, type or station that does not exist.
class ScheduleError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class ViolationKind {
  SlotClash,           // two trips of one train share a slot
  DuplicateTrip,       // a trip is operated more than once
  Overlap,             // a later-slot trip departs before an earlier one is done
  Reachability,        // first trip of a train cannot be reached in time
  Timing,              // later trip cannot be reached in time
  Continuity,          // activity starts somewhere other than where the train is
  MaintenanceStation,  // maintenance at a station that cannot do it
  MaintenanceOrder,    // non-periodic tasks out of limit order
  LimitExceeded,       // trip runs while a counter is over its limit
  KmMismatch,          // empty ride km disagrees with the network
};

inline const char* toString(ViolationKind k) {
  switch (k) {
    case ViolationKind::SlotClash: return "slot-clash";
    case ViolationKind::DuplicateTrip: return "duplicate-trip";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::Reachability: return "reachability";
    case ViolationKind::Timing: return "timing";
    case ViolationKind::Continuity: return "continuity";
    case ViolationKind::MaintenanceStation: return "maintenance-station";
    case ViolationKind::MaintenanceOrder: return "maintenance-order";
    case ViolationKind::LimitExceeded: return "limit-exceeded";
    case ViolationKind::KmMismatch: return "km-mismatch";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  TrainId train = 0;
  /// Index into the train's activity list; for pairwise kinds, the later one.
  int activity = 0;
  std::string detail;
};

/// Where and when an activity happens in the forward simulation.
struct ActivityTiming {
  Minutes start = 0;
  Minutes end = 0;
  bool flagged = false;  // trip ran with a counter over its limit
};

/// Km readings of one train right after an activity.
struct KmLedgerEntry {
  int activity = 0;
  Minutes time = 0;
  std::vector<Km> km;
};

/// Forward simulation of one train's activity list.
struct TrainTrace {
  std::vector<ActivityTiming> timing;
  std::vector<Violation> violations;
  std::vector<TripId> flaggedTrips;
  std::vector<KmLedgerEntry> ledger;
  Km emptyKm = 0;
  /// Empty km driven from a maintenance station to the trip right after it.
  Km maintenanceLegKm = 0;
  int trips = 0;

  /// No sequential violation and no flagged trip.
  bool feasible() const { return violations.empty() && flaggedTrips.empty(); }
};

namespace detail {

inline const Trip& tripAt(const Instance& inst, TripId k) {
  if (k < 0 || k >= inst.tripCount()) throw ScheduleError("unknown trip id " + std::to_string(k));
  return inst.trips[static_cast<std::size_t>(k)];
}

inline const MaintenanceType& typeAt(const Instance& inst, MaintTypeId u) {
  if (u < 0 || u >= inst.typeCount()) throw ScheduleError("unknown maintenance type " + std::to_string(u));
  return inst.maintenanceTypes[static_cast<std::size_t>(u)];
}

inline void checkStation(const Instance& inst, StationId s) {
  if (s < 0 || s >= inst.network.size()) throw ScheduleError("unknown station " + std::to_string(s));
}

}  // namespace detail

/// Simulates one train from its initial station and earliest time.
///
/// Empty rides, maintenance legs and trips all add to every km counter.
/// Periodic counters reset when their maintenance task starts; a
/// non-periodic counter stops mattering once its task has been done. A
/// counter above its limit flags the next trip, or the current trip if the
/// trip itself crosses the limit.
inline TrainTrace simulateTrain(const Instance& inst, TrainId train, const std::vector<Activity>& acts) {
  if (train < 0 || train >= inst.trainCount()) throw ScheduleError("unknown train id " + std::to_string(train));
  const Train& z = inst.trains[static_cast<std::size_t>(train)];
  const auto& net = inst.network;
  const int p = inst.typeCount();

  TrainTrace tr;
  tr.timing.resize(acts.size());
  StationId pos = z.initialStation;
  Minutes t = z.earliestTime;
  std::vector<Km> km = z.initialKm;
  std::vector<bool> done(static_cast<std::size_t>(p), false);
  std::optional<Km> lastNonPeriodicLimit;
  bool pending = false;
  bool afterMaintenance = false;

  auto overLimit = [&] {
    for (int u = 0; u < p; ++u) {
      const auto& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
      if ((w.isPeriodic || !done[static_cast<std::size_t>(u)]) && km[static_cast<std::size_t>(u)] > w.limit) return true;
    }
    return false;
  };
  auto addKm = [&](Km d) {
    for (auto& c : km) c += d;
  };
  auto violate = [&](ViolationKind kind, int a, std::string detail) {
    tr.violations.push_back({kind, train, a, std::move(detail)});
  };

  for (std::size_t a = 0; a < acts.size(); ++a) {
    const int ai = static_cast<int>(a);
    ActivityTiming& at = tr.timing[a];
    at.start = t;
    if (const auto* ride = std::get_if<EmptyRide>(&acts[a])) {
      detail::checkStation(inst, ride->from);
      detail::checkStation(inst, ride->to);
      if (ride->from != pos) violate(ViolationKind::Continuity, ai, "empty ride starts away from the train");
      if (ride->km != net.distance(ride->from, ride->to)) violate(ViolationKind::KmMismatch, ai, "empty ride km differs from the network");
      t += net.duration(ride->from, ride->to);
      addKm(ride->km);
      tr.emptyKm += ride->km;
      if (afterMaintenance) tr.maintenanceLegKm += ride->km;
      pos = ride->to;
      pending = pending || overLimit();
    } else if (const auto* task = std::get_if<MaintenanceTask>(&acts[a])) {
      const MaintenanceType& w = detail::typeAt(inst, task->type);
      detail::checkStation(inst, task->station);
      if (task->station != pos) violate(ViolationKind::Continuity, ai, "maintenance away from the train");
      if (std::find(w.stations.begin(), w.stations.end(), task->station) == w.stations.end())
        violate(ViolationKind::MaintenanceStation, ai, "station cannot perform type " + std::to_string(task->type));
      pending = pending || overLimit();
      if (w.isPeriodic) {
        km[static_cast<std::size_t>(task->type)] = 0;
      } else {
        if (lastNonPeriodicLimit && w.limit < *lastNonPeriodicLimit)
          violate(ViolationKind::MaintenanceOrder, ai, "non-periodic task after one with a greater limit");
        lastNonPeriodicLimit = std::max(lastNonPeriodicLimit.value_or(w.limit), w.limit);
        done[static_cast<std::size_t>(task->type)] = true;
      }
      t += w.duration;
      pos = task->station;
    } else {
      const auto& rt = std::get<RegularTrip>(acts[a]);
      const Trip& f = detail::tripAt(inst, rt.trip);
      if (f.departureStation != pos) violate(ViolationKind::Continuity, ai, "trip departs away from the train");
      if (t > f.departureTime)
        violate(tr.trips == 0 ? ViolationKind::Reachability : ViolationKind::Timing, ai,
                "train available at " + std::to_string(t) + ", trip departs at " + std::to_string(f.departureTime));
      at.start = f.departureTime;
      bool over = pending || overLimit();
      addKm(f.distance);
      over = over || overLimit();
      if (over) {
        at.flagged = true;
        tr.flaggedTrips.push_back(rt.trip);
        violate(ViolationKind::LimitExceeded, ai, "trip " + std::to_string(rt.trip) + " runs over a maintenance limit");
      }
      pending = false;
      ++tr.trips;
      t = std::max(t, f.arrivalTime) + f.postProc;
      pos = f.arrivalStation;
      at.end = f.arrivalTime;
      afterMaintenance = false;
      tr.ledger.push_back({ai, at.end, km});
      continue;
    }
    afterMaintenance = std::holds_alternative<MaintenanceTask>(acts[a]) ||
                       (afterMaintenance && std::holds_alternative<EmptyRide>(acts[a]));
    at.end = t;
    tr.ledger.push_back({ai, at.end, km});
  }
  return tr;
}

/// Departure side of a trip as seen by the pairwise overlap test: a trip
/// preceded by a maintenance task starts at the maintenance station.
struct TripView {
  TripId trip = 0;
  int slot = 0;
  int activity = 0;
  StationId departureStation = 0;
  Minutes departureTime = 0;
  StationId arrivalStation = 0;
  Minutes arrivalTime = 0;
  Minutes postProc = 0;
};

inline bool overlaps(const Instance& inst, const TripView& a, const TripView& b) {
  return b.departureTime < a.arrivalTime + a.postProc + inst.network.duration(a.arrivalStation, b.departureStation);
}

inline std::vector<TripView> tripViews(const Instance& inst, const std::vector<Activity>& acts) {
  std::vector<TripView> out;
  int ordinal = 0;
  for (std::size_t a = 0; a < acts.size(); ++a) {
    const auto* rt = std::get_if<RegularTrip>(&acts[a]);
    if (!rt) continue;
    const Trip& f = detail::tripAt(inst, rt->trip);
    TripView v{rt->trip, rt->slot >= 0 ? rt->slot : ordinal, static_cast<int>(a), f.departureStation,
               f.departureTime, f.arrivalStation, f.arrivalTime, f.postProc};
    const MaintenanceTask* task = nullptr;
    if (a >= 1) task = std::get_if<MaintenanceTask>(&acts[a - 1]);
    if (!task && a >= 2) {
      const auto* ride = std::get_if<EmptyRide>(&acts[a - 1]);
      const auto* before = std::get_if<MaintenanceTask>(&acts[a - 2]);
      if (ride && before && ride->from == before->station) task = before;
    }
    if (task) {
      const MaintenanceType& w = detail::typeAt(inst, task->type);
      detail::checkStation(inst, task->station);
      v.departureStation = task->station;
      v.departureTime = f.departureTime - inst.network.duration(task->station, f.departureStation) - w.duration;
    }
    out.push_back(v);
    ++ordinal;
  }
  return out;
}

struct ValidationReport {
  std::vector<TrainTrace> trains;
  std::vector<Violation> violations;
  std::vector<TripId> flaggedTrips;
  int rawAllocatedTrips = 0;
  int correctedAllocatedTrips = 0;
  Km emptyKm = 0;
  Km maintenanceLegKm = 0;
  int usedTrains = 0;
  int slotClashPairs = 0;
  int duplicatePairs = 0;
  int overlapPairs = 0;

  int count(ViolationKind k) const {
    return static_cast<int>(std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; }));
  }
  /// Sequential timing problems: a train cannot be where a trip starts in time.
  int timingViolations() const {
    return count(ViolationKind::Reachability) + count(ViolationKind::Timing) + count(ViolationKind::Continuity);
  }
  bool clean() const { return violations.empty(); }
};

inline ValidationReport validateSchedule(const Instance& inst, const Schedule& sched) {
  if (sched.perTrain.size() > inst.trains.size()) throw ScheduleError("schedule has more trains than the instance");
  ValidationReport rep;
  std::map<TripId, int> uses;
  for (std::size_t i = 0; i < sched.perTrain.size(); ++i) {
    const auto& acts = sched.perTrain[i];
    TrainTrace tr = simulateTrain(inst, static_cast<TrainId>(i), acts);
    rep.rawAllocatedTrips += tr.trips;
    rep.emptyKm += tr.emptyKm;
    rep.maintenanceLegKm += tr.maintenanceLegKm;
    if (tr.trips > 0) ++rep.usedTrains;
    rep.flaggedTrips.insert(rep.flaggedTrips.end(), tr.flaggedTrips.begin(), tr.flaggedTrips.end());
    rep.violations.insert(rep.violations.end(), tr.violations.begin(), tr.violations.end());

    const auto views = tripViews(inst, acts);
    for (std::size_t x = 0; x < views.size(); ++x) {
      for (std::size_t y = x + 1; y < views.size(); ++y) {
        const TripView* a = &views[x];
        const TripView* b = &views[y];
        if (a->slot == b->slot) {
          ++rep.slotClashPairs;
          rep.violations.push_back({ViolationKind::SlotClash, static_cast<TrainId>(i), b->activity, "slot " + std::to_string(a->slot)});
          continue;
        }
        if (a->slot > b->slot) std::swap(a, b);
        if (overlaps(inst, *a, *b)) {
          ++rep.overlapPairs;
          rep.violations.push_back({ViolationKind::Overlap, static_cast<TrainId>(i), b->activity,
                                    "trip " + std::to_string(b->trip) + " overlaps trip " + std::to_string(a->trip)});
        }
      }
    }
    for (const auto& v : views) {
      const int before = uses[v.trip]++;
      if (before > 0) {
        rep.duplicatePairs += before;
        rep.violations.push_back({ViolationKind::DuplicateTrip, static_cast<TrainId>(i), v.activity, "trip " + std::to_string(v.trip)});
      }
    }
    rep.trains.push_back(std::move(tr));
  }
  rep.correctedAllocatedTrips = rep.rawAllocatedTrips - static_cast<int>(rep.flaggedTrips.size());
  return rep;
}

}  // namespace rsched

#endif  // RSCHED_REPORT_VALIDATE_HPP
