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

#ifndef RSCHED_CP_PROPAGATE_HPP
#define RSCHED_CP_PROPAGATE_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "rsched/cp/slot_plan.hpp"
#include "rsched/cp/static_sets.hpp"
#include "rsched/model.hpp"

namespace rsched::cp {

enum class Status { Unchanged, Changed, Fail };

inline Status combine(Status a, Status b) {
  if (a == Status::Fail || b == Status::Fail) return Status::Fail;
  return (a == Status::Changed || b == Status::Changed) ? Status::Changed : Status::Unchanged;
}

enum class SweepOrder {
  /// trip -> maint -> km rule groups, slots ascending.
  Forward,
  /// km -> maint -> trip rule groups, slots descending.
  Reverse,
};

struct PropagationConfig {
  /// Prune maint_{i,j} with the successors of the current slot j-1 trips
  /// instead of all of W_k|2.
  bool strongerMaintRule = false;
  SweepOrder order = SweepOrder::Forward;
};

/// Lower bounds km_{i,u,j} for j = 0..q; entry q is the reading after the last slot.
class KmState {
 public:
  KmState() = default;
  KmState(int trains, int types, int slots)
      : p_(types), q_(slots), km_(static_cast<std::size_t>(trains * types * (slots + 1)), 0) {}

  Km& at(int i, int u, int j) { return km_[idx(i, u, j)]; }
  Km at(int i, int u, int j) const { return km_[idx(i, u, j)]; }
  int slots() const { return q_; }

  friend bool operator==(const KmState&, const KmState&) = default;

 private:
  std::size_t idx(int i, int u, int j) const { return static_cast<std::size_t>((i * p_ + u) * (q_ + 1) + j); }
  int p_ = 0;
  int q_ = 0;
  std::vector<Km> km_;
};

namespace detail {

inline constexpr Km kUnreachable = std::numeric_limits<Km>::max() / 4;

/// Stations train i may stand at right before slot j: its initial station
/// for j = 0, else the arrival stations of slot j-1's real trips.
inline std::vector<bool> positionsBefore(const SlotPlan& plan, const Instance& inst, int i, int j) {
  std::vector<bool> at(static_cast<std::size_t>(inst.network.size()), false);
  if (j == 0) {
    at[static_cast<std::size_t>(inst.trains[static_cast<std::size_t>(i)].initialStation)] = true;
  } else {
    plan.trip(i, j - 1).trips.forEach(
        [&](int h) { at[static_cast<std::size_t>(inst.trips[static_cast<std::size_t>(h)].arrivalStation)] = true; });
  }
  return at;
}

/// legTo[b]: fewest empty km from any position before slot j to station b,
/// over the routes maint_{i,j} still allows (direct, or via a station of a
/// possible maintenance type).
inline std::vector<Km> emptyLegTo(const SlotPlan& plan, const Instance& inst, int i, int j) {
  const auto& net = inst.network;
  const int l = net.size();
  const auto at = positionsBefore(plan, inst, i, j);
  std::vector<Km> fromPos(static_cast<std::size_t>(l), kUnreachable);
  for (int b = 0; b < l; ++b)
    for (int s = 0; s < l; ++s)
      if (at[static_cast<std::size_t>(s)]) fromPos[static_cast<std::size_t>(b)] = std::min(fromPos[static_cast<std::size_t>(b)], net.distance(s, b));

  const MaintDomain& md = plan.maint(i, j);
  std::vector<Km> leg(static_cast<std::size_t>(l), kUnreachable);
  if (md.none) leg = fromPos;
  md.types.forEach([&](int v) {
    for (StationId r : inst.maintenanceTypes[static_cast<std::size_t>(v)].stations) {
      if (fromPos[static_cast<std::size_t>(r)] >= kUnreachable) continue;
      for (int b = 0; b < l; ++b)
        leg[static_cast<std::size_t>(b)] = std::min(leg[static_cast<std::size_t>(b)], fromPos[static_cast<std::size_t>(r)] + net.distance(r, b));
    }
  });
  return leg;
}

/// Fewest km from any position before slot j to a station of type v.
inline Km reachMaintenance(const std::vector<bool>& at, const Instance& inst, int v) {
  Km best = kUnreachable;
  for (int s = 0; s < inst.network.size(); ++s) {
    if (!at[static_cast<std::size_t>(s)]) continue;
    for (StationId r : inst.maintenanceTypes[static_cast<std::size_t>(v)].stations) best = std::min(best, inst.network.distance(s, r));
  }
  return best;
}

class Narrow {
 public:
  Status status() const { return fail_ ? Status::Fail : (changed_ ? Status::Changed : Status::Unchanged); }
  bool failed() const { return fail_; }
  void fail() { fail_ = true; }

  void intersect(TripDomain& d, const Bitset& keep) { changed_ |= d.trips.intersectWith(keep); check(d); }
  void clearTrips(TripDomain& d) {
    if (d.trips.any()) { d.trips.clear(); changed_ = true; }
    check(d);
  }
  void dropSentinel(TripDomain& d) {
    if (d.sentinel) { d.sentinel = false; changed_ = true; }
    check(d);
  }
  void removeTrip(TripDomain& d, int k) {
    if (d.trips.test(k)) { d.trips.reset(k); changed_ = true; }
    check(d);
  }
  void removeType(MaintDomain& d, int u) {
    if (d.types.test(u)) { d.types.reset(u); changed_ = true; }
    check(d);
  }
  void clearTypes(MaintDomain& d) {
    if (d.types.any()) { d.types.clear(); changed_ = true; }
    check(d);
  }
  void dropNone(MaintDomain& d) {
    if (d.none) { d.none = false; changed_ = true; }
    check(d);
  }

 private:
  void check(const TripDomain& d) { fail_ |= d.empty(); }
  void check(const MaintDomain& d) { fail_ |= d.empty(); }
  bool changed_ = false;
  bool fail_ = false;
};

/// trip_{i,k} < 0 and maint_{i,k} < 0 for k = from..q-1.
inline void forceIdleFrom(SlotPlan& plan, Narrow& nr, int i, int from) {
  for (int k = std::max(0, from); k < plan.slots() && !nr.failed(); ++k) {
    nr.clearTrips(plan.trip(i, k));
    nr.clearTypes(plan.maint(i, k));
  }
}

inline std::vector<int> slotOrder(int q, SweepOrder order) {
  std::vector<int> js(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) js[static_cast<std::size_t>(j)] = order == SweepOrder::Forward ? j : q - 1 - j;
  return js;
}

}  // namespace detail

/// Gap, reachability, successor and allDifferent rules.
///
/// A trip is kept in slot j only if it can follow some trip of slot j-1 (or
/// the train's start for j = 0) by a route maint_{i,j} still allows: directly
/// when -1 is possible, via a maintenance station of each possible type
/// otherwise. With non-metric travel times a detour through a maintenance
/// station can be faster than the direct transfer, so both routes count.
inline Status propagateTripRules(SlotPlan& plan, const StaticSets& sets, const Instance& inst,
                                 SweepOrder order = SweepOrder::Forward) {
  (void)inst;
  detail::Narrow nr;
  const int q = plan.slots();
  const int n = plan.tripCount();
  for (int i = 0; i < plan.trains() && !nr.failed(); ++i) {
    for (int j : detail::slotOrder(q, order)) {
      TripDomain& td = plan.trip(i, j);
      const MaintDomain& md = plan.maint(i, j);
      Bitset allowed(n);
      if (j == 0) {
        if (md.none) allowed |= sets.direct[static_cast<std::size_t>(i)];
        md.types.forEach([&](int u) { allowed |= sets.first[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)]; });
      } else {
        plan.trip(i, j - 1).trips.forEach([&](int h) {
          if (md.none) allowed |= sets.succ[static_cast<std::size_t>(h)];
          md.types.forEach([&](int u) { allowed |= sets.maintSucc[static_cast<std::size_t>(u)][static_cast<std::size_t>(h)]; });
        });
      }
      nr.intersect(td, allowed);
      if (nr.failed()) break;

      if (j > 0) {
        TripDomain& prev = plan.trip(i, j - 1);
        // trip_{i,j-1} < 0 => trip_{i,j} < 0, and its contrapositive.
        if (prev.onlySentinel()) nr.clearTrips(td);
        if (!td.sentinel) nr.dropSentinel(prev);
        // A forced trip in slot j needs a predecessor in slot j-1.
        if (!td.sentinel && !nr.failed()) {
          Bitset before(n);
          td.trips.forEach([&](int k) {
            if (md.none) before |= sets.pred[static_cast<std::size_t>(k)];
            md.types.forEach([&](int u) { before |= sets.maintPred[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)]; });
          });
          nr.intersect(prev, before);
        }
      }
      if (nr.failed()) break;
    }
  }
  if (nr.failed()) return Status::Fail;

  // allDifferent: forward checking on fixed trips, then a pigeonhole test on
  // the slots that must hold a real trip.
  for (int i = 0; i < plan.trains() && !nr.failed(); ++i) {
    for (int j = 0; j < q && !nr.failed(); ++j) {
      const int k = plan.trip(i, j).fixedTrip();
      if (k < 0) continue;
      for (int i2 = 0; i2 < plan.trains() && !nr.failed(); ++i2)
        for (int j2 = 0; j2 < q && !nr.failed(); ++j2)
          if (i2 != i || j2 != j) nr.removeTrip(plan.trip(i2, j2), k);
    }
  }
  if (nr.failed()) return Status::Fail;
  int forced = 0;
  Bitset pool(n);
  for (int i = 0; i < plan.trains(); ++i)
    for (int j = 0; j < q; ++j)
      if (!plan.trip(i, j).sentinel) {
        ++forced;
        pool |= plan.trip(i, j).trips;
      }
  if (pool.count() < forced) return Status::Fail;
  return nr.status();
}

/// Maintenance/trip linkage and the W / U based maintenance pruning rules.
inline Status propagateMaintRules(SlotPlan& plan, const StaticSets& sets, const Instance& inst,
                                  const PropagationConfig& cfg = {}) {
  (void)inst;
  detail::Narrow nr;
  const int q = plan.slots();
  const int n = plan.tripCount();
  for (int i = 0; i < plan.trains() && !nr.failed(); ++i) {
    for (int j : detail::slotOrder(q, cfg.order)) {
      TripDomain& td = plan.trip(i, j);
      MaintDomain& md = plan.maint(i, j);
      // trip_{i,j} < 0 => maint_{i,j} < 0, and its contrapositive.
      if (td.onlySentinel()) nr.clearTypes(md);
      if (!md.none) nr.dropSentinel(td);
      if (nr.failed()) break;

      for (int u : md.types.members()) {
        bool keep;
        if (j == 0) {
          keep = sets.first[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)].intersects(td.trips);
        } else {
          const TripDomain& prev = plan.trip(i, j - 1);
          keep = sets.maintFirst[static_cast<std::size_t>(u)].intersects(prev.trips);
          if (keep && !cfg.strongerMaintRule) keep = sets.maintSecond[static_cast<std::size_t>(u)].intersects(td.trips);
          if (keep && cfg.strongerMaintRule) {
            Bitset reach(n);
            prev.trips.forEach([&](int x) { reach |= sets.maintSucc[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)]; });
            keep = reach.intersects(td.trips);
          }
        }
        if (!keep) nr.removeType(md, u);
      }
      if (nr.failed()) break;

      // "No maintenance" needs a direct connection when slot j must be used.
      if (md.none && !td.sentinel) {
        bool direct;
        if (j == 0) {
          direct = sets.direct[static_cast<std::size_t>(i)].intersects(td.trips);
        } else {
          direct = false;
          plan.trip(i, j - 1).trips.forEach([&](int h) { direct = direct || sets.succ[static_cast<std::size_t>(h)].intersects(td.trips); });
        }
        if (!direct) nr.dropNone(md);
      }
      if (nr.failed()) break;

      const int u = md.fixedType();
      if (u < 0) continue;
      if (j == 0) {
        nr.intersect(td, sets.first[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)]);
        nr.dropSentinel(td);
        continue;
      }
      TripDomain& prev = plan.trip(i, j - 1);
      nr.intersect(prev, sets.maintFirst[static_cast<std::size_t>(u)]);
      nr.dropSentinel(prev);
      nr.intersect(td, sets.maintSecond[static_cast<std::size_t>(u)]);
      nr.dropSentinel(td);
      if (nr.failed()) break;
      bool pair = false;
      prev.trips.forEach([&](int x) { pair = pair || sets.maintSucc[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)].intersects(td.trips); });
      if (!pair) nr.fail();
    }
  }
  return nr.status();
}

/// km_{i,u,j} lower bounds under the current domains.
///
/// Slot j adds the cheapest empty leg the domains allow plus the trip's
/// distance. A periodic type u that may be serviced in slot j also offers the
/// reset reading G_u; the bound takes the smaller of the two, since the
/// maintenance is possible but not certain. Slots without a real trip add 0.
inline KmState computeKmReadings(const SlotPlan& plan, const Instance& inst) {
  const int q = plan.slots();
  const int p = inst.typeCount();
  const auto& net = inst.network;
  KmState km(plan.trains(), p, q);
  for (int i = 0; i < plan.trains(); ++i) {
    const Train& z = inst.trains[static_cast<std::size_t>(i)];
    for (int u = 0; u < p; ++u) km.at(i, u, 0) = z.initialKm[static_cast<std::size_t>(u)];
    for (int j = 0; j < q; ++j) {
      const TripDomain& td = plan.trip(i, j);
      const MaintDomain& md = plan.maint(i, j);
      Km kk = 0;
      if (td.hasReal() && (j == 0 || plan.trip(i, j - 1).hasReal())) {
        const auto leg = detail::emptyLegTo(plan, inst, i, j);
        kk = detail::kUnreachable;
        td.trips.forEach([&](int k) {
          const Trip& f = inst.trips[static_cast<std::size_t>(k)];
          kk = std::min(kk, leg[static_cast<std::size_t>(f.departureStation)] + f.distance);
        });
        if (kk >= detail::kUnreachable) kk = 0;
      }
      for (int u = 0; u < p; ++u) {
        Km next = km.at(i, u, j) + kk;
        const MaintenanceType& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
        if (w.isPeriodic && md.types.test(u) && td.hasReal()) {
          Km g = detail::kUnreachable;
          for (StationId s : w.stations)
            td.trips.forEach([&](int k) {
              const Trip& f = inst.trips[static_cast<std::size_t>(k)];
              g = std::min(g, net.distance(s, f.departureStation) + f.distance);
            });
          next = std::min(next, g);
        }
        km.at(i, u, j + 1) = next;
      }
    }
  }
  return km;
}

/// Limit, reachability-of-maintenance and non-periodic ordering rules.
///
/// Readings are lower bounds that hold when every slot before j carries a
/// real trip, so a breach at j forbids the trip of slot j-1 (and, through the
/// gap rule, everything after it).
inline Status propagateKmRules(SlotPlan& plan, const KmState& km, const Instance& inst, SweepOrder order = SweepOrder::Forward) {
  detail::Narrow nr;
  const int q = plan.slots();
  const int p = inst.typeCount();
  for (int i = 0; i < plan.trains() && !nr.failed(); ++i) {
    auto maybeBefore = [&](int u, int j) {  // u possible in some slot < j
      for (int l = 0; l < j; ++l)
        if (plan.maint(i, l).types.test(u)) return true;
      return false;
    };

    for (int u = 0; u < p && !nr.failed(); ++u) {
      const MaintenanceType& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
      if (!w.isPeriodic && plan.trip(i, 0).hasReal() && km.at(i, u, 0) > w.limit) {
        nr.fail();
        break;
      }
      for (int j = 0; j <= q && !nr.failed(); ++j) {
        const int last = std::max(0, j - 1);
        if (!plan.trip(i, last).hasReal() || km.at(i, u, j) <= w.limit) continue;
        if (w.isPeriodic || !maybeBefore(u, j)) detail::forceIdleFrom(plan, nr, i, last);
      }
    }
    if (nr.failed()) break;

    // A maintenance task in slot j must be reached before any counter that
    // still matters runs over.
    for (int j : detail::slotOrder(q, order)) {
      MaintDomain& md = plan.maint(i, j);
      if (!md.hasType() || (j > 0 && !plan.trip(i, j - 1).hasReal())) continue;
      const auto at = detail::positionsBefore(plan, inst, i, j);
      for (int v : md.types.members()) {
        const Km reach = detail::reachMaintenance(at, inst, v);
        for (int u = 0; u < p; ++u) {
          const MaintenanceType& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
          if (!w.isPeriodic && maybeBefore(u, j)) continue;
          if (km.at(i, u, j) + reach > w.limit) {
            nr.removeType(md, v);
            break;
          }
        }
      }
      if (nr.failed()) break;
    }
    if (nr.failed()) break;

    // Non-periodic tasks follow the order of their limits.
    for (int x = 0; x < p; ++x) {
      const MaintenanceType& wx = inst.maintenanceTypes[static_cast<std::size_t>(x)];
      if (wx.isPeriodic) continue;
      for (int r = 0; r < q && !nr.failed(); ++r) {
        if (plan.maint(i, r).fixedType() != x) continue;
        bool firstOcc = true;
        bool lastOcc = true;
        for (int k = 0; k < r; ++k) firstOcc = firstOcc && !plan.maint(i, k).types.test(x);
        for (int k = r + 1; k < q; ++k) lastOcc = lastOcc && !plan.maint(i, k).types.test(x);
        for (int y = 0; y < p; ++y) {
          const MaintenanceType& wy = inst.maintenanceTypes[static_cast<std::size_t>(y)];
          if (wy.isPeriodic) continue;
          if (firstOcc && wy.limit > wx.limit)
            for (int k = 0; k <= r; ++k) nr.removeType(plan.maint(i, k), y);
          if (lastOcc && wy.limit < wx.limit)
            for (int k = r; k < q; ++k) nr.removeType(plan.maint(i, k), y);
        }
      }
    }
  }
  return nr.status();
}

struct FixpointResult {
  bool failed = false;
  KmState km;
  int rounds = 0;
};

/// Applies all rule groups until no domain changes.
inline FixpointResult propagateFixpoint(SlotPlan& plan, const StaticSets& sets, const Instance& inst,
                                        const PropagationConfig& cfg = {}) {
  FixpointResult res;
  if (plan.anyEmpty()) {
    res.failed = true;
    return res;
  }
  while (true) {
    ++res.rounds;
    Status s = Status::Unchanged;
    if (cfg.order == SweepOrder::Forward) {
      s = combine(s, propagateTripRules(plan, sets, inst, cfg.order));
      if (s != Status::Fail) s = combine(s, propagateMaintRules(plan, sets, inst, cfg));
      if (s != Status::Fail) s = combine(s, propagateKmRules(plan, computeKmReadings(plan, inst), inst, cfg.order));
    } else {
      s = combine(s, propagateKmRules(plan, computeKmReadings(plan, inst), inst, cfg.order));
      if (s != Status::Fail) s = combine(s, propagateMaintRules(plan, sets, inst, cfg));
      if (s != Status::Fail) s = combine(s, propagateTripRules(plan, sets, inst, cfg.order));
    }
    if (s == Status::Fail) {
      res.failed = true;
      return res;
    }
    if (s == Status::Unchanged) break;
  }
  res.km = computeKmReadings(plan, inst);
  return res;
}

struct ObjectiveBounds {
  /// |AT(F)|: trips still possible somewhere.
  int maxTrips = 0;
  /// Empty km no completion can avoid.
  Km emptyKmLowerBound = 0;
};

/// Bounds for branch and bound.
///
/// The empty-km bound adds, for every slot that must hold a real trip, the
/// cheapest empty leg into any of its possible trips.
inline ObjectiveBounds boundObjectives(const SlotPlan& plan, const KmState& km, const Instance& inst) {
  (void)km;
  ObjectiveBounds b;
  Bitset at(plan.tripCount());
  for (int i = 0; i < plan.trains(); ++i)
    for (int j = 0; j < plan.slots(); ++j) at |= plan.trip(i, j).trips;
  b.maxTrips = at.count();
  for (int i = 0; i < plan.trains(); ++i) {
    for (int j = 0; j < plan.slots(); ++j) {
      const TripDomain& td = plan.trip(i, j);
      if (td.sentinel || !td.hasReal()) break;
      const auto leg = detail::emptyLegTo(plan, inst, i, j);
      Km best = detail::kUnreachable;
      td.trips.forEach([&](int k) { best = std::min(best, leg[static_cast<std::size_t>(inst.trips[static_cast<std::size_t>(k)].departureStation)]); });
      if (best < detail::kUnreachable) b.emptyKmLowerBound += best;
    }
  }
  return b;
}

}  // namespace rsched::cp

#endif  // RSCHED_CP_PROPAGATE_HPP
