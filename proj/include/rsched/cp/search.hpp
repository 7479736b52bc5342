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

#ifndef RSCHED_CP_SEARCH_HPP
#define RSCHED_CP_SEARCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <tuple>
#include <vector>

#include "rsched/cp/propagate.hpp"
#include "rsched/cp/slot_plan.hpp"
#include "rsched/cp/static_sets.hpp"
#include "rsched/model.hpp"
#include "rsched/report/validate.hpp"

namespace rsched::cp {

struct SearchConfig {
  /// Wall-clock budget; unset means run until the tree is exhausted.
  std::optional<double> timeLimitSeconds;
  /// Weight of one trip against one empty km.
  std::int64_t bigM = 1'000'000;
  bool strongerMaintRule = false;
  std::optional<std::int64_t> nodeLimit;
  /// Overrides the computed slot count.
  std::optional<int> slots;
};

struct SearchStats {
  std::int64_t nodes = 0;
  std::int64_t fails = 0;
  std::int64_t prunes = 0;
  std::int64_t solutions = 0;
  double timeToFirst = -1;
  double timeToBest = -1;
  double elapsed = 0;
  int slots = 0;
  /// The whole tree was explored, so the incumbent is optimal.
  bool exhausted = false;
};

struct Improvement {
  double seconds = 0;
  int trips = 0;
  Km emptyKm = 0;
  std::int64_t objective = 0;
};

struct SearchResult {
  std::optional<Schedule> best;
  /// The first complete schedule found.
  std::optional<Schedule> first;
  int trips = 0;
  Km emptyKm = 0;
  std::int64_t objective = 0;
  SearchStats stats;
  std::vector<Improvement> log;
};

enum class VarKind { Trip, Maint };

struct VarRef {
  int train = 0;
  int slot = 0;
  VarKind kind = VarKind::Trip;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

/// First-fail: the train with the fewest potential trips, then the fewest
/// slots that can still hold a trip; inside it the lowest open slot, trip
/// variable before maintenance variable. nullopt when everything is fixed.
inline std::optional<VarRef> selectVariable(const SlotPlan& plan) {
  std::optional<VarRef> best;
  std::tuple<int, int, int> bestKey{0, 0, 0};
  for (int i = 0; i < plan.trains(); ++i) {
    std::optional<VarRef> open;
    Bitset potential(plan.tripCount());
    int slots = 0;
    for (int j = 0; j < plan.slots(); ++j) {
      const TripDomain& td = plan.trip(i, j);
      potential |= td.trips;
      if (td.hasReal()) ++slots;
      if (!open && !td.fixed()) open = VarRef{i, j, VarKind::Trip};
      if (!open && !plan.maint(i, j).fixed()) open = VarRef{i, j, VarKind::Maint};
    }
    if (!open) continue;
    const std::tuple<int, int, int> key{potential.count(), slots, i};
    if (!best || key < bestKey) {
      best = open;
      bestKey = key;
    }
  }
  return best;
}

/// Trips by descending id with the sentinel last; maintenance with -1 first.
inline std::vector<int> orderValues(const SlotPlan& plan, const VarRef& var) {
  if (var.kind == VarKind::Maint) return plan.maintValues(var.train, var.slot);
  const TripDomain& td = plan.trip(var.train, var.slot);
  const auto ids = td.trips.members();
  std::vector<int> out(ids.rbegin(), ids.rend());
  if (td.sentinel) out.push_back(plan.sentinel(var.train, var.slot));
  return out;
}

/// Activities for one train's fixed trip/maintenance sequence with the
/// given maintenance stations (one per maintenance slot, in order).
inline std::vector<Activity> trainActivities(const Instance& inst, int i, const std::vector<std::pair<int, int>>& slots,
                                             const std::vector<StationId>& stations) {
  const auto& net = inst.network;
  std::vector<Activity> acts;
  StationId pos = inst.trains[static_cast<std::size_t>(i)].initialStation;
  std::size_t next = 0;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const auto [k, u] = slots[j];
    const Trip& f = inst.trips[static_cast<std::size_t>(k)];
    if (u >= 0) {
      const StationId s = stations[next++];
      if (pos != s) acts.emplace_back(EmptyRide{pos, s, net.distance(pos, s)});
      acts.emplace_back(MaintenanceTask{u, s});
      pos = s;
    }
    if (pos != f.departureStation) acts.emplace_back(EmptyRide{pos, f.departureStation, net.distance(pos, f.departureStation)});
    acts.emplace_back(RegularTrip{k, static_cast<int>(j)});
    pos = f.arrivalStation;
  }
  return acts;
}

/// Cheapest feasible activity list for one train's (trip, maintenance type)
/// sequence, choosing maintenance stations; ties go to lower station ids.
inline std::optional<std::vector<Activity>> realizeTrain(const Instance& inst, int i, const std::vector<std::pair<int, int>>& slots) {
  std::vector<const std::vector<StationId>*> choices;
  for (const auto& [k, u] : slots)
    if (u >= 0) choices.push_back(&inst.maintenanceTypes[static_cast<std::size_t>(u)].stations);
  std::vector<StationId> pick(choices.size());
  std::optional<std::vector<Activity>> best;
  Km bestKm = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d == choices.size()) {
      auto acts = trainActivities(inst, i, slots, pick);
      const TrainTrace tr = simulateTrain(inst, i, acts);
      if (tr.feasible() && (!best || tr.emptyKm < bestKm)) {
        best = std::move(acts);
        bestKm = tr.emptyKm;
      }
      return;
    }
    std::vector<StationId> options = *choices[d];
    std::sort(options.begin(), options.end());
    for (StationId s : options) {
      pick[d] = s;
      rec(d + 1);
    }
  };
  rec(0);
  return best;
}

/// Schedule for a fully fixed plan, or nullopt when no station choice is feasible.
inline std::optional<Schedule> realize(const SlotPlan& plan, const Instance& inst) {
  Schedule s = Schedule::empty(inst);
  for (int i = 0; i < plan.trains(); ++i) {
    std::vector<std::pair<int, int>> slots;
    for (int j = 0; j < plan.slots(); ++j) {
      const int k = plan.trip(i, j).fixedTrip();
      if (k < 0) break;
      slots.emplace_back(k, plan.maint(i, j).fixedType());
    }
    auto acts = realizeTrain(inst, i, slots);
    if (!acts) return std::nullopt;
    s.perTrain[static_cast<std::size_t>(i)] = std::move(*acts);
  }
  return s;
}

/// Depth-first branch and bound maximising bigM * trips - emptyKm.
inline SearchResult branchAndBound(const Instance& inst, const SearchConfig& cfg = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SearchResult res;
  const int q = cfg.slots.value_or(computeSlotCount(inst));
  res.stats.slots = q;
  if (q <= 0 || inst.tripCount() == 0) {
    res.best = Schedule::empty(inst);
    res.first = res.best;
    res.stats.nodes = 1;
    res.stats.solutions = 1;
    res.stats.timeToFirst = res.stats.timeToBest = seconds();
    res.stats.exhausted = true;
    res.log.push_back({res.stats.timeToBest, 0, 0, 0});
    res.stats.elapsed = seconds();
    return res;
  }

  const StaticSets sets = computeStaticSets(inst);
  PropagationConfig pcfg;
  pcfg.strongerMaintRule = cfg.strongerMaintRule;
  bool stopped = false;
  auto shouldStop = [&] {
    if (stopped) return true;
    if (cfg.nodeLimit && res.stats.nodes >= *cfg.nodeLimit) stopped = true;
    if (cfg.timeLimitSeconds && (res.stats.nodes & 15) == 0 && seconds() >= *cfg.timeLimitSeconds) stopped = true;
    return stopped;
  };

  std::function<void(SlotPlan&)> dfs = [&](SlotPlan& plan) {
    if (shouldStop()) return;
    ++res.stats.nodes;
    const FixpointResult fp = propagateFixpoint(plan, sets, inst, pcfg);
    if (fp.failed) {
      ++res.stats.fails;
      return;
    }
    const ObjectiveBounds b = boundObjectives(plan, fp.km, inst);
    if (res.best && cfg.bigM * b.maxTrips - b.emptyKmLowerBound <= res.objective) {
      ++res.stats.prunes;
      return;
    }
    const auto var = selectVariable(plan);
    if (!var) {
      auto sched = realize(plan, inst);
      if (!sched) {
        ++res.stats.fails;
        return;
      }
      const int trips = sched->allocatedTrips();
      const Km km = sched->emptyKm();
      const std::int64_t obj = cfg.bigM * trips - km;
      if (!res.best || obj > res.objective) {
        const double now = seconds();
        if (!res.best) {
          res.stats.timeToFirst = now;
          res.first = sched;
        }
        res.stats.timeToBest = now;
        ++res.stats.solutions;
        res.best = std::move(sched);
        res.trips = trips;
        res.emptyKm = km;
        res.objective = obj;
        res.log.push_back({now, trips, km, obj});
      }
      return;
    }
    for (int v : orderValues(plan, *var)) {
      if (shouldStop()) return;
      SlotPlan child = plan;
      if (var->kind == VarKind::Trip) child.assignTrip(var->train, var->slot, v);
      else child.assignMaint(var->train, var->slot, v);
      dfs(child);
    }
  };

  SlotPlan root = SlotPlan::full(inst, q);
  dfs(root);
  res.stats.exhausted = !stopped;
  res.stats.elapsed = seconds();
  return res;
}

}  // namespace rsched::cp

#endif  // RSCHED_CP_SEARCH_HPP
