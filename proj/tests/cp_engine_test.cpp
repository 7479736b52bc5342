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

#include <gtest/gtest.h>

#include <random>

#include "rsched/cp/propagate.hpp"
#include "rsched/cp/search.hpp"
#include "rsched/report/validate.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

namespace rsched::cp {
namespace {

using test::makeTrain;
using test::makeTrip;
using test::makeType;

Instance withDurations(std::vector<Minutes> durations, Minutes horizon) {
  Instance inst;
  inst.horizonEnd = horizon;
  inst.network = test::uniformNetwork({"A", "B"}, 10, 10);
  for (std::size_t k = 0; k < durations.size(); ++k) inst.trips.push_back(makeTrip(static_cast<TripId>(k), 0, 1, 0, durations[k], 10));
  inst.trains = {makeTrain(0, 0)};
  return inst;
}

// A at 0, B at 1, C at 2; every leg 60 min and 100 km unless overridden.
Instance threeStations() {
  Instance inst;
  inst.horizonEnd = 1440;
  inst.network = test::uniformNetwork({"A", "B", "C"}, 100, 60);
  return inst;
}

TEST(ComputeSlotCount, CappedByTripCount) { EXPECT_EQ(computeSlotCount(withDurations({60, 60, 60}, 1440)), 3); }
TEST(ComputeSlotCount, SmallestDurationsMustFit) { EXPECT_EQ(computeSlotCount(withDurations({800, 800}, 1000)), 1); }
TEST(ComputeSlotCount, NothingFits) { EXPECT_EQ(computeSlotCount(withDurations({1000}, 1000)), 0); }

TEST(StaticSets, PredecessorInequality) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 0, 60, 100, 120), makeTrip(1, 1, 2, 200, 60, 100)};
  inst.trains = {makeTrain(0, 0)};
  auto sets = computeStaticSets(inst);
  EXPECT_TRUE(sets.pred[1].test(0));
  EXPECT_TRUE(sets.succ[0].test(1));
  inst.trips[1] = makeTrip(1, 1, 2, 179, 60, 100);
  sets = computeStaticSets(inst);
  EXPECT_FALSE(sets.pred[1].test(0));
  EXPECT_FALSE(sets.succ[0].test(1));
}

TEST(StaticSets, MaintenancePairsMatchBruteForce) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 40; ++it) {
    Instance inst = oracle::randomInstance(rng, {6, 2, 2, 3, 900});
    const auto sets = computeStaticSets(inst);
    const auto& net = inst.network;
    for (int h = 0; h < inst.tripCount(); ++h)
      for (int k = 0; k < inst.tripCount(); ++k) {
        const Trip& a = inst.trips[static_cast<std::size_t>(h)];
        const Trip& b = inst.trips[static_cast<std::size_t>(k)];
        EXPECT_EQ(sets.pred[static_cast<std::size_t>(k)].test(h), sets.succ[static_cast<std::size_t>(h)].test(k));
        for (int u = 0; u < inst.typeCount(); ++u) {
          const auto& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
          bool any = false;
          for (StationId s : w.stations)
            any = any || a.arrivalTime + a.postProc + net.duration(a.arrivalStation, s) + w.duration + net.duration(s, b.departureStation) <=
                             b.departureTime;
          EXPECT_EQ(sets.inW(u, h, k), any);
          EXPECT_EQ(sets.maintPred[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)].test(h), any);
          if (any) {
            EXPECT_TRUE(sets.maintFirst[static_cast<std::size_t>(u)].test(h));
            EXPECT_TRUE(sets.maintSecond[static_cast<std::size_t>(u)].test(k));
          }
        }
      }
  }
}

TEST(TripRules, SlotZeroReachability) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 2, 1, 30, 60, 100), makeTrip(1, 2, 1, 300, 60, 100)};
  inst.trains = {makeTrain(0, 0)};
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignMaint(0, 0, -1);
  ASSERT_NE(propagateTripRules(plan, computeStaticSets(inst), inst), Status::Fail);
  EXPECT_FALSE(plan.trip(0, 0).trips.test(0));
  EXPECT_TRUE(plan.trip(0, 0).trips.test(1));
}

TEST(TripRules, GapRule) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100), makeTrip(1, 1, 2, 400, 60, 100), makeTrip(2, 2, 0, 700, 60, 100)};
  inst.trains = {makeTrain(0, 0)};
  SlotPlan plan = SlotPlan::full(inst, 3);
  plan.assignTrip(0, 0, plan.sentinel(0, 0));
  ASSERT_NE(propagateTripRules(plan, computeStaticSets(inst), inst), Status::Fail);
  for (int j = 1; j < 3; ++j) EXPECT_TRUE(plan.trip(0, j).onlySentinel()) << j;
}

TEST(TripRules, AllDifferentForwardChecking) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100), makeTrip(1, 1, 2, 400, 60, 100)};
  inst.trains = {makeTrain(0, 0), makeTrain(1, 0)};
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignTrip(0, 0, 1);
  ASSERT_NE(propagateTripRules(plan, computeStaticSets(inst), inst), Status::Fail);
  EXPECT_FALSE(plan.trip(1, 0).trips.test(1));
  EXPECT_FALSE(plan.trip(1, 1).trips.test(1));
  EXPECT_FALSE(plan.trip(0, 1).trips.test(1));
}

TEST(TripRules, PigeonholeFailure) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100)};
  inst.trains = {makeTrain(0, 0), makeTrain(1, 0)};
  SlotPlan plan = SlotPlan::full(inst, 1);
  plan.trip(0, 0).sentinel = false;
  plan.trip(1, 0).sentinel = false;
  EXPECT_EQ(propagateTripRules(plan, computeStaticSets(inst), inst), Status::Fail);
}

TEST(MaintRules, TypeWithoutSuccessorSupportIsRemoved) {
  const Instance inst = test::deskInstance();
  const auto sets = computeStaticSets(inst);
  SlotPlan plan = SlotPlan::full(inst, 2);
  // Trip 0 is not in W_0|2: nothing can be serviced and still reach it.
  ASSERT_FALSE(sets.maintSecond[0].test(0));
  plan.trip(0, 1).trips = Bitset(4);
  plan.trip(0, 1).trips.set(0);
  ASSERT_NE(propagateMaintRules(plan, sets, inst, {}), Status::Fail);
  EXPECT_FALSE(plan.maint(0, 1).types.test(0));
}

TEST(MaintRules, FixedMaintenanceNarrowsPredecessorSlot) {
  const Instance inst = test::deskInstance();
  const auto sets = computeStaticSets(inst);
  ASSERT_TRUE(sets.maintFirst[0].test(2));
  ASSERT_FALSE(sets.maintFirst[0].test(3));
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.trip(0, 0).trips = Bitset(4);
  plan.trip(0, 0).trips.set(2);
  plan.trip(0, 0).trips.set(3);
  plan.assignMaint(0, 1, 0);
  ASSERT_NE(propagateMaintRules(plan, sets, inst, {}), Status::Fail);
  EXPECT_EQ(plan.trip(0, 0).trips.members(), std::vector<int>{2});
}

TEST(MaintRules, EmptyPairIntersectionFails) {
  Instance inst = threeStations();
  // The only maintenance station is far away; no pair (0, 1) fits.
  inst.network.duration(1, 2) = inst.network.duration(2, 1) = 300;
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100), makeTrip(1, 1, 0, 300, 60, 100)};
  inst.maintenanceTypes = {makeType(0, {2}, 30, true, 5000)};
  inst.trains = {makeTrain(0, 0, {0})};
  const auto sets = computeStaticSets(inst);
  ASSERT_FALSE(sets.inW(0, 0, 1));
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignTrip(0, 0, 0);
  plan.assignTrip(0, 1, 1);
  plan.assignMaint(0, 1, 0);
  EXPECT_EQ(propagateMaintRules(plan, sets, inst, {}), Status::Fail);
}

TEST(MaintRules, LinkageRule) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignTrip(0, 1, plan.sentinel(0, 1));
  ASSERT_NE(propagateMaintRules(plan, computeStaticSets(inst), inst, {}), Status::Fail);
  EXPECT_EQ(plan.maintValues(0, 1), std::vector<int>{-1});
}

TEST(KmReadings, AllSentinelKeepsInitialReadings) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) plan.assignTrip(i, j, plan.sentinel(i, j));
  const KmState km = computeKmReadings(plan, inst);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= 3; ++j) EXPECT_EQ(km.at(i, 0, j), inst.trains[static_cast<std::size_t>(i)].initialKm[0]);
}

TEST(KmReadings, ForcedSlotZeroTripWithoutMaintenance) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignTrip(0, 0, 2);
  plan.assignMaint(0, 0, -1);
  const KmState km = computeKmReadings(plan, inst);
  const Trip& f = inst.trips[2];
  EXPECT_EQ(km.at(0, 0, 1), 450 + inst.network.distance(0, f.departureStation) + f.distance);
}

TEST(KmReadings, ForcedPeriodicMaintenanceResets) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 2);
  plan.assignTrip(0, 0, 0);
  plan.assignMaint(0, 0, 0);
  const KmState km = computeKmReadings(plan, inst);
  const Trip& f = inst.trips[0];
  const StationId bonn = 1;
  EXPECT_EQ(km.at(0, 0, 1), inst.network.distance(bonn, f.departureStation) + f.distance);
}

TEST(KmRules, PeriodicBreachForcesIdleFromPreviousSlot) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100), makeTrip(1, 1, 2, 400, 60, 100), makeTrip(2, 2, 0, 700, 60, 100)};
  inst.maintenanceTypes = {makeType(0, {0}, 30, true, 8000)};
  inst.trains = {makeTrain(0, 0, {7000})};
  SlotPlan plan = SlotPlan::full(inst, 3);
  for (int j = 0; j < 3; ++j) plan.maint(0, j).types = Bitset(1);  // no maintenance anywhere
  KmState km(1, 1, 3);
  km.at(0, 0, 0) = 7000;
  km.at(0, 0, 1) = 7500;
  km.at(0, 0, 2) = 8100;
  km.at(0, 0, 3) = 8200;
  ASSERT_NE(propagateKmRules(plan, km, inst), Status::Fail);
  EXPECT_TRUE(plan.trip(0, 0).hasReal());
  EXPECT_TRUE(plan.trip(0, 1).onlySentinel());
  EXPECT_TRUE(plan.trip(0, 2).onlySentinel());
}

TEST(KmRules, NonPeriodicBreachAtSlotZeroFails) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 100)};
  inst.maintenanceTypes = {makeType(0, {0}, 30, false, 500)};
  inst.trains = {makeTrain(0, 0, {400})};
  SlotPlan plan = SlotPlan::full(inst, 1);
  KmState km(1, 1, 1);
  km.at(0, 0, 0) = 501;
  EXPECT_EQ(propagateKmRules(plan, km, inst), Status::Fail);
}

TEST(KmRules, NonPeriodicOrdering) {
  Instance inst = threeStations();
  inst.network = test::uniformNetwork({"A", "B", "C"}, 1, 1);
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 1), makeTrip(1, 1, 2, 400, 60, 1), makeTrip(2, 2, 0, 700, 60, 1)};
  inst.maintenanceTypes = {makeType(0, {0, 1, 2}, 10, false, 500), makeType(1, {0, 1, 2}, 10, false, 900)};
  inst.trains = {makeTrain(0, 0, {0, 0})};
  {
    SlotPlan plan = SlotPlan::full(inst, 3);
    plan.maint(0, 0).types.reset(0);  // slot 1 holds the first task of type 0
    plan.assignMaint(0, 1, 0);
    ASSERT_NE(propagateKmRules(plan, computeKmReadings(plan, inst), inst), Status::Fail);
    EXPECT_FALSE(plan.maint(0, 0).types.test(1));
    EXPECT_TRUE(plan.maint(0, 2).types.test(1));
  }
  {
    SlotPlan plan = SlotPlan::full(inst, 3);
    plan.maint(0, 2).types.reset(1);  // slot 1 holds the last task of type 1
    plan.assignMaint(0, 1, 1);
    ASSERT_NE(propagateKmRules(plan, computeKmReadings(plan, inst), inst), Status::Fail);
    EXPECT_FALSE(plan.maint(0, 2).types.test(0));
    EXPECT_TRUE(plan.maint(0, 0).types.test(0));
  }
}

TEST(Fixpoint, FeasibleFullAssignmentIsUnchanged) {
  const Instance inst = test::deskInstance();
  SearchConfig cfg;
  cfg.slots = 2;
  const auto res = branchAndBound(inst, cfg);
  ASSERT_TRUE(res.best);
  SlotPlan plan = SlotPlan::full(inst, 2);
  for (int i = 0; i < 2; ++i) {
    int j = 0;
    int pendingType = -1;
    for (const Activity& a : res.best->perTrain[static_cast<std::size_t>(i)]) {
      if (const auto* mt = std::get_if<MaintenanceTask>(&a)) pendingType = mt->type;
      if (const auto* rt = std::get_if<RegularTrip>(&a)) {
        plan.assignTrip(i, j, rt->trip);
        plan.assignMaint(i, j, pendingType);
        pendingType = -1;
        ++j;
      }
    }
    for (; j < 2; ++j) {
      plan.assignTrip(i, j, plan.sentinel(i, j));
      plan.assignMaint(i, j, -1);
    }
  }
  ASSERT_TRUE(plan.allFixed());
  const SlotPlan before = plan;
  const auto fp = propagateFixpoint(plan, computeStaticSets(inst), inst);
  ASSERT_FALSE(fp.failed);
  EXPECT_EQ(plan, before);
  const auto b = boundObjectives(plan, fp.km, inst);
  EXPECT_EQ(b.maxTrips, res.trips);
  EXPECT_EQ(b.emptyKmLowerBound, res.emptyKm);
  EXPECT_EQ(validateSchedule(inst, *res.best).emptyKm, res.emptyKm);
}

TEST(Fixpoint, UnreachableMaintenanceFails) {
  Instance inst = threeStations();
  inst.trips = {makeTrip(0, 0, 1, 100, 60, 300)};
  inst.maintenanceTypes = {makeType(0, {2}, 30, true, 1000)};
  inst.trains = {makeTrain(0, 0, {800})};
  SlotPlan plan = SlotPlan::full(inst, 1);
  plan.assignTrip(0, 0, 0);
  EXPECT_TRUE(propagateFixpoint(plan, computeStaticSets(inst), inst).failed);
  EXPECT_TRUE(oracle::feasibleSequences(inst, 0, 1).size() == 1);  // only the empty sequence
}

TEST(Fixpoint, SweepOrderDoesNotChangeTheResult) {
  std::mt19937_64 rng(99);
  int compared = 0;
  for (int it = 0; it < 300; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    const int q = 1 + it % 3;
    const auto sets = computeStaticSets(inst);
    SlotPlan plan = SlotPlan::full(inst, q);
    for (int i = 0; i < plan.trains(); ++i)
      for (int j = 0; j < q; ++j) {
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
          const auto vals = plan.tripValues(i, j);
          plan.assignTrip(i, j, vals[std::uniform_int_distribution<std::size_t>(0, vals.size() - 1)(rng)]);
        }
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
          const auto vals = plan.maintValues(i, j);
          plan.assignMaint(i, j, vals[std::uniform_int_distribution<std::size_t>(0, vals.size() - 1)(rng)]);
        }
      }
    if (plan.anyEmpty()) continue;
    SlotPlan fwd = plan;
    SlotPlan rev = plan;
    PropagationConfig a;
    PropagationConfig b;
    b.order = SweepOrder::Reverse;
    const bool fa = propagateFixpoint(fwd, sets, inst, a).failed;
    const bool fb = propagateFixpoint(rev, sets, inst, b).failed;
    ASSERT_EQ(fa, fb) << "instance " << it;
    if (!fa) { EXPECT_EQ(fwd, rev) << "instance " << it; }
    ++compared;
  }
  EXPECT_GT(compared, 250);
}

// Every value of every feasible per-train sequence survives propagation
// from full domains, and the propagated km readings stay below the true ones.
TEST(Fixpoint, SoundAgainstBruteForce) {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 80; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    const int q = 1 + it % 3;
    const auto sets = computeStaticSets(inst);
    SlotPlan plan = SlotPlan::full(inst, q);
    const auto fp = propagateFixpoint(plan, sets, inst);
    ASSERT_FALSE(fp.failed);
    for (int i = 0; i < inst.trainCount(); ++i) {
      for (const auto& seq : oracle::feasibleSequences(inst, i, q)) {
        std::vector<Activity> acts;
        StationId pos = inst.trains[static_cast<std::size_t>(i)].initialStation;
        for (std::size_t j = 0; j < seq.size(); ++j) {
          const auto& st = seq[j];
          EXPECT_TRUE(plan.trip(i, static_cast<int>(j)).trips.test(st.trip)) << "instance " << it;
          if (st.type >= 0) { EXPECT_TRUE(plan.maint(i, static_cast<int>(j)).types.test(st.type)) << "instance " << it; }
          else { EXPECT_TRUE(plan.maint(i, static_cast<int>(j)).none) << "instance " << it; }
          const Trip& f = inst.trips[static_cast<std::size_t>(st.trip)];
          if (st.type >= 0) {
            if (pos != st.station) acts.emplace_back(EmptyRide{pos, st.station, inst.network.distance(pos, st.station)});
            acts.emplace_back(MaintenanceTask{st.type, st.station});
            pos = st.station;
          }
          if (pos != f.departureStation) acts.emplace_back(EmptyRide{pos, f.departureStation, inst.network.distance(pos, f.departureStation)});
          acts.emplace_back(RegularTrip{st.trip, static_cast<int>(j)});
          pos = f.arrivalStation;
        }
        if (seq.size() < static_cast<std::size_t>(q)) { EXPECT_TRUE(plan.trip(i, static_cast<int>(seq.size())).sentinel); }
        const TrainTrace tr = simulateTrain(inst, i, acts);
        ASSERT_TRUE(tr.feasible());
        int j = 0;
        for (const auto& entry : tr.ledger) {
          if (!std::holds_alternative<RegularTrip>(acts[static_cast<std::size_t>(entry.activity)])) continue;
          ++j;
          for (int u = 0; u < inst.typeCount(); ++u) EXPECT_LE(fp.km.at(i, u, j), entry.km[static_cast<std::size_t>(u)]) << "instance " << it;
        }
      }
    }
  }
}

TEST(Bounds, FullDomains) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 2);
  const auto b = boundObjectives(plan, computeKmReadings(plan, inst), inst);
  EXPECT_EQ(b.maxTrips, 4);
  EXPECT_EQ(b.emptyKmLowerBound, 0);
}

TEST(Bounds, TripRemovedEverywhere) {
  const Instance inst = test::deskInstance();
  SlotPlan plan = SlotPlan::full(inst, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) plan.trip(i, j).trips.reset(1);
  EXPECT_EQ(boundObjectives(plan, computeKmReadings(plan, inst), inst).maxTrips, 3);
}

}  // namespace
}  // namespace rsched::cp
