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

#include <cmath>
#include <random>

#include "rsched/cp/search.hpp"
#include "rsched/qubo/decode.hpp"
#include "rsched/qubo/model.hpp"
#include "rsched/report/validate.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

namespace rsched::qubo {
namespace {

using test::makeTrain;
using test::makeTrip;
using test::makeType;

Instance singleTrip(Km initialLeg) {
  Instance inst;
  inst.horizonEnd = 1440;
  inst.network = test::uniformNetwork({"A", "B"}, initialLeg, 60);
  inst.trips = {makeTrip(0, 1, 0, 300, 60, 200)};
  inst.trains = {makeTrain(0, 0)};
  return inst;
}

Train trainWithKm(Km km) { return makeTrain(0, 0, {km}); }

TEST(Overlap, TransferTooLong) {
  Network net = test::uniformNetwork({"A", "B", "C"}, 100, 240);
  ExtendedTrip f1;
  f1.arrivalStation = 1;
  f1.arrivalTime = 600;
  f1.postProc = 120;
  ExtendedTrip f2;
  f2.departureStation = 2;
  f2.departureTime = 900;
  EXPECT_TRUE(overlap(f1, f2, net));
  f2.departureTime = 960;
  EXPECT_FALSE(overlap(f1, f2, net));
}

TEST(Overlap, SameStationAtTheBoundary) {
  Network net = test::uniformNetwork({"A", "B"}, 100, 240);
  ExtendedTrip f1;
  f1.arrivalStation = 1;
  f1.arrivalTime = 600;
  f1.postProc = 120;
  ExtendedTrip f2;
  f2.departureStation = 1;
  f2.departureTime = 720;
  EXPECT_FALSE(overlap(f1, f2, net));
}

TEST(BuildExtendedTrips, OneVariantPerStation) {
  Instance inst = singleTrip(50);
  inst.maintenanceTypes = {makeType(0, {0, 1}, 30, true, 1000)};
  inst.trains[0].initialKm = {0};
  const auto all = buildExtendedTrips(inst);
  ASSERT_EQ(all.size(), 3U);
  EXPECT_FALSE(all[0].hasMaintenance());
  EXPECT_EQ(all[0].departureTime, 300);
  EXPECT_EQ(all[0].departureStation, 1);
  // Station A: 60 min transfer to B.
  EXPECT_EQ(all[1].maintenanceStation, 0);
  EXPECT_EQ(all[1].departureStation, 0);
  EXPECT_EQ(all[1].departureTime, 300 - 60 - 30);
  EXPECT_EQ(all[1].maintenanceLegKm, 50);
  EXPECT_EQ(all[1].arrivalTime, all[0].arrivalTime);
  // Station B is the departure station itself.
  EXPECT_EQ(all[2].departureTime, 300 - 30);
  EXPECT_EQ(all[2].maintenanceLegKm, 0);
}

TEST(BuildExtendedTrips, BaseVariantMirrorsTheTrip) {
  const Instance inst = singleTrip(50);
  const auto all = buildExtendedTrips(inst);
  ASSERT_EQ(all.size(), 1U);
  const Trip& f = inst.trips[0];
  EXPECT_EQ(all[0].baseTrip, f.id);
  EXPECT_EQ(all[0].departureStation, f.departureStation);
  EXPECT_EQ(all[0].arrivalStation, f.arrivalStation);
  EXPECT_EQ(all[0].departureTime, f.departureTime);
  EXPECT_EQ(all[0].arrivalTime, f.arrivalTime);
  EXPECT_EQ(all[0].duration, f.duration);
  EXPECT_EQ(all[0].postProc, f.postProc);
  EXPECT_EQ(all[0].baseKm, f.distance);
}

TEST(BuildExtendedTrips, NegativeDepartureDropped) {
  Instance inst = singleTrip(50);
  inst.trips[0] = makeTrip(0, 1, 0, 80, 60, 200);
  inst.maintenanceTypes = {makeType(0, {0}, 30, true, 1000)};
  inst.trains[0].initialKm = {0};
  // 80 - 60 - 30 = -10
  EXPECT_EQ(buildExtendedTrips(inst).size(), 1U);
}

TEST(FilterVariables, SlotZeroReachability) {
  Instance inst;
  inst.horizonEnd = 1440;
  inst.network = test::uniformNetwork({"A", "B", "C"}, 100, 60);
  inst.trips = {makeTrip(0, 2, 1, 30, 60, 100)};
  inst.trains = {makeTrain(0, 0)};
  const auto all = buildExtendedTrips(inst);
  const auto idx = filterVariables(inst, all, 3);
  EXPECT_EQ(idx.find(0, 0, 0), -1);
  EXPECT_GE(idx.find(1, 0, 0), 0);
  EXPECT_GE(idx.find(2, 0, 0), 0);
  EXPECT_EQ(idx.size(), 2);
}

TEST(FilterVariables, CountWhenNothingIsFiltered) {
  GeneratorConfig gc;
  gc.tripCount = 12;
  gc.trainCount = 5;
  Instance inst = generateArtificial(gc);
  // Shift every trip late enough to be reachable from anywhere.
  for (Trip& f : inst.trips) {
    f.departureTime += 2000;
    f.arrivalTime += 2000;
  }
  inst.horizonEnd += 2000;
  const auto all = buildExtendedTrips(inst);
  for (int q : {1, 3}) {
    const auto idx = filterVariables(inst, all, q);
    EXPECT_EQ(idx.size(), static_cast<int>(all.size()) * inst.trainCount() * q);
    for (int v = 1; v < idx.size(); ++v) {
      const auto& a = idx.key(v - 1);
      const auto& b = idx.key(v);
      EXPECT_LT(std::tie(a.slot, a.ext, a.train), std::tie(b.slot, b.ext, b.train));
    }
  }
  EXPECT_THROW(filterVariables(inst, all, 0), std::invalid_argument);
}

TEST(Alpha, LogisticValues) {
  const MaintenanceType u = makeType(0, {0}, 30, true, 8000);
  EXPECT_NEAR(alpha(u, trainWithKm(6700)), 0.5, 1e-12);
  EXPECT_NEAR(alpha(u, trainWithKm(8000)), 1.0 / (std::exp(-2.6) + 1.0), 1e-12);
  EXPECT_NEAR(alpha(u, trainWithKm(8000)), 0.9309, 5e-5);
  EXPECT_NEAR(alpha(u, trainWithKm(0)), 1.0 / (std::exp(13.4) + 1.0), 1e-15);
  EXPECT_NEAR(alpha(u, trainWithKm(0)), 1.5e-6, 0.05e-6);
}

TEST(ImmediateAction, StrictInequality) {
  const MaintenanceType u = makeType(0, {0}, 30, true, 8000);
  EXPECT_TRUE(immediateAction(u, trainWithKm(7600)));
  EXPECT_FALSE(immediateAction(u, trainWithKm(7500)));
  EXPECT_FALSE(immediateAction(u, trainWithKm(7400)));
}

TEST(AssembleQubo, DefaultWeightsAndSlots) {
  const BuildOptions opt;
  EXPECT_EQ(opt.slots, 3);
  EXPECT_EQ(opt.weights.reward, Coeff(100));
  EXPECT_EQ(opt.weights.penalty, Coeff(1000));
  EXPECT_EQ(opt.weights.km, Coeff(1));
  EXPECT_EQ(opt.weights.maintenance, Coeff(40));
}

TEST(AssembleQubo, SingleVariableDiagonal) {
  const Instance inst = singleTrip(70);
  BuildOptions opt;
  opt.slots = 1;
  const QuboModel md = assembleQubo(inst, opt);
  ASSERT_EQ(md.variableCount(), 1);
  ASSERT_EQ(md.matrix.entries.size(), 1U);
  EXPECT_EQ(md.matrix.entries[0].value, Coeff(-100 + 70));
  EXPECT_EQ(md.tags[0], termBit(Term::Reward) | termBit(Term::EmptyKm));
  EXPECT_TRUE(md.matrix.offset.isZero());
  const std::string doc = exportQubo(md.matrix);
  EXPECT_EQ(doc, "1 1 0\n0 0 -30\n");
}

TEST(AssembleQubo, SameTripOnTwoTrains) {
  Instance inst = singleTrip(70);
  inst.trains.push_back(makeTrain(1, 1));
  BuildOptions opt;
  opt.slots = 1;
  const QuboModel md = assembleQubo(inst, opt);
  ASSERT_EQ(md.variableCount(), 2);
  const auto it = std::find_if(md.matrix.entries.begin(), md.matrix.entries.end(), [](const QuboEntry& e) { return e.i == 0 && e.j == 1; });
  ASSERT_NE(it, md.matrix.entries.end());
  EXPECT_EQ(it->value, Coeff(2000));
  EXPECT_EQ(md.tags[static_cast<std::size_t>(it - md.matrix.entries.begin())], termBit(Term::C2));
}

TEST(AssembleQubo, UpperTriangularSortedAndTagged) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 30; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    BuildOptions opt;
    opt.slots = 1 + it % 3;
    const QuboModel md = assembleQubo(inst, opt);
    ASSERT_EQ(md.tags.size(), md.matrix.entries.size());
    for (std::size_t k = 0; k < md.matrix.entries.size(); ++k) {
      const auto& e = md.matrix.entries[k];
      EXPECT_LE(e.i, e.j);
      EXPECT_FALSE(e.value.isZero());
      EXPECT_NE(md.tags[k], 0);
      if (k > 0) { EXPECT_LT(std::pair(md.matrix.entries[k - 1].i, md.matrix.entries[k - 1].j), std::pair(e.i, e.j)); }
    }
  }
}

TEST(AssembleQubo, SizeCap) {
  const Instance inst = test::deskInstance();
  BuildOptions opt;
  opt.maxNonZeros = 5;
  EXPECT_THROW(assembleQubo(inst, opt), QuboSizeError);
  opt.maxNonZeros.reset();
  EXPECT_NO_THROW(assembleQubo(inst, opt));
}

TEST(AssembleQubo, NoKmAblationDropsTheKmTerm) {
  const Instance inst = test::deskInstance();
  BuildOptions opt;
  opt.slots = 2;
  opt.terms = kAllTerms & ~termBit(Term::EmptyKm);
  const QuboModel md = assembleQubo(inst, opt);
  for (auto tag : md.tags) EXPECT_EQ(tag & termBit(Term::EmptyKm), 0);
}

// Hard energy is penalty * (2 clash pairs + 2 duplicate pairs + overlap pairs),
// so a schedule without any of them costs nothing.
TEST(HardEnergy, FeasibleSchedulesCostNothing) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int it = 0; it < 60; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    const int q = 1 + it % 3;
    cp::SearchConfig cfg;
    cfg.slots = q;
    const auto res = cp::branchAndBound(inst, cfg);
    ASSERT_TRUE(res.best);
    BuildOptions opt;
    opt.slots = q;
    const QuboModel md = assembleQubo(inst, opt);
    const auto bits = encodeSchedule(md, *res.best);
    ASSERT_TRUE(bits) << "instance " << it;
    const ValidationReport rep = validateSchedule(inst, decodeSolution(md, *bits));
    EXPECT_EQ(hardEnergy(md, *bits), toEnergy(Coeff(1000)) * rep.overlapPairs) << "instance " << it;
    EXPECT_EQ(rep.slotClashPairs + rep.duplicatePairs, 0);
    if (rep.overlapPairs == 0) {
      EXPECT_TRUE(hardEnergy(md, *bits).isZero());
      ++checked;
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(HardEnergy, MatchesValidatorPairCounts) {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 40; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    BuildOptions opt;
    opt.slots = 1 + it % 3;
    const QuboModel md = assembleQubo(inst, opt);
    for (int r = 0; r < 20; ++r) {
      Bits x(static_cast<std::size_t>(md.variableCount()));
      for (auto& b : x) b = std::bernoulli_distribution(0.15)(rng);
      const ValidationReport rep = validateSchedule(inst, decodeSolution(md, x));
      const Energy expected = toEnergy(Coeff(1000)) * (2 * rep.slotClashPairs + 2 * rep.duplicatePairs + rep.overlapPairs);
      EXPECT_EQ(hardEnergy(md, x), expected);
      const bool clean = rep.slotClashPairs == 0 && rep.duplicatePairs == 0 && rep.overlapPairs == 0;
      EXPECT_EQ(hardEnergy(md, x).isZero(), clean);
      if (!clean) { EXPECT_GE(hardEnergy(md, x), toEnergy(Coeff(1000))); }
    }
  }
}

TEST(MaintenanceTerms, ImmediateSquareVanishesWithOneVariant) {
  Instance inst;
  inst.horizonEnd = 1440;
  inst.network = test::uniformNetwork({"A", "B"}, 50, 30);
  inst.trips = {makeTrip(0, 0, 1, 300, 60, 100)};
  inst.maintenanceTypes = {makeType(0, {0, 1}, 30, true, 1000)};
  inst.trains = {makeTrain(0, 0, {700})};
  ASSERT_TRUE(immediateAction(inst.maintenanceTypes[0], inst.trains[0]));
  BuildOptions opt;
  opt.slots = 1;
  const QuboModel md = assembleQubo(inst, opt);
  ASSERT_EQ(md.variableCount(), 3);
  const Coeff A = md.urgencyWeight[0][0];
  EXPECT_EQ(A, Coeff::fromDouble(alpha(inst.maintenanceTypes[0], inst.trains[0]) * 40.0));
  const std::size_t cm1 = static_cast<std::size_t>(Term::Cm1);
  EXPECT_EQ(energyByTerm(md, Bits{0, 0, 0})[cm1], toEnergy(A));
  EXPECT_TRUE(energyByTerm(md, Bits{0, 1, 0})[cm1].isZero());
  EXPECT_TRUE(energyByTerm(md, Bits{0, 0, 1})[cm1].isZero());
  EXPECT_EQ(energyByTerm(md, Bits{0, 1, 1})[cm1], toEnergy(A));
  EXPECT_TRUE(energyByTerm(md, Bits{0, 0, 0})[static_cast<std::size_t>(Term::Cm2)].isZero());
  // cm3 charges each maintenance variant wgMaintenance - A.
  EXPECT_EQ(energyByTerm(md, Bits{0, 1, 0})[static_cast<std::size_t>(Term::Cm3)], toEnergy(Coeff(40) - A));
}

TEST(MaintenanceTerms, NonImmediateSquareSpansAllSlots) {
  Instance inst;
  inst.horizonEnd = 1440;
  inst.network = test::uniformNetwork({"A", "B"}, 50, 30);
  inst.trips = {makeTrip(0, 0, 1, 300, 60, 100), makeTrip(1, 1, 0, 600, 60, 100)};
  inst.maintenanceTypes = {makeType(0, {0}, 30, true, 8000)};
  inst.trains = {makeTrain(0, 0, {100})};
  BuildOptions opt;
  opt.slots = 2;
  const QuboModel md = assembleQubo(inst, opt);
  const Coeff A = md.urgencyWeight[0][0];
  const std::size_t cm2 = static_cast<std::size_t>(Term::Cm2);
  Bits x(static_cast<std::size_t>(md.variableCount()), 0);
  EXPECT_EQ(energyByTerm(md, x)[cm2], toEnergy(A));
  // One maintenance variant in slot 1.
  int slotOne = -1;
  for (int v = 0; v < md.variableCount(); ++v)
    if (md.index.key(v).slot == 1 && md.trips[static_cast<std::size_t>(md.index.key(v).ext)].hasMaintenance()) slotOne = v;
  ASSERT_GE(slotOne, 0);
  x[static_cast<std::size_t>(slotOne)] = 1;
  EXPECT_TRUE(energyByTerm(md, x)[cm2].isZero());
}

TEST(EmptyKm, TaggedEnergyMatchesRepresentedLegs) {
  std::mt19937_64 rng(123);
  for (int it = 0; it < 60; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    const int q = 1 + it % 3;
    cp::SearchConfig cfg;
    cfg.slots = q;
    const auto res = cp::branchAndBound(inst, cfg);
    BuildOptions opt;
    opt.slots = q;
    const QuboModel md = assembleQubo(inst, opt);
    const auto bits = encodeSchedule(md, *res.best);
    ASSERT_TRUE(bits);
    const ValidationReport rep = validateSchedule(inst, decodeSolution(md, *bits));
    EXPECT_EQ(energyByTerm(md, *bits)[static_cast<std::size_t>(Term::EmptyKm)], toEnergy(Coeff(rep.emptyKm - rep.maintenanceLegKm)))
        << "instance " << it;
  }
}

TEST(EvaluateEnergy, MatchesDenseDoubleLoop) {
  std::mt19937_64 rng(9);
  int models = 0;
  for (int it = 0; it < 200 && models < 25; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    BuildOptions opt;
    opt.slots = 1 + it % 2;
    const QuboModel md = assembleQubo(inst, opt);
    const int n = md.variableCount();
    if (n > 20) continue;
    ++models;
    std::vector<std::vector<Coeff>> dense(static_cast<std::size_t>(n), std::vector<Coeff>(static_cast<std::size_t>(n)));
    for (const auto& e : md.matrix.entries) dense[static_cast<std::size_t>(e.i)][static_cast<std::size_t>(e.j)] += e.value;
    for (int r = 0; r < 20; ++r) {
      Bits x(static_cast<std::size_t>(n));
      for (auto& b : x) b = std::bernoulli_distribution(0.4)(rng);
      Energy e = md.matrix.offset;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (x[static_cast<std::size_t>(a)] && x[static_cast<std::size_t>(b)]) e += toEnergy(dense[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
      EXPECT_EQ(evaluateEnergy(md.matrix, x), e);
      Energy parts;
      for (const Energy& p : energyByTerm(md, x)) parts += p;
      EXPECT_EQ(parts, e);
    }
  }
  EXPECT_EQ(models, 25);
}

TEST(EvaluateEnergy, ZeroVectorAndSingleDiagonal) {
  QuboMatrix m;
  m.variables = 2;
  m.offset = Energy(7);
  m.entries = {{1, 1, Coeff(-3)}};
  EXPECT_EQ(evaluateEnergy(m, Bits{0, 0}), Energy(7));
  EXPECT_EQ(evaluateEnergy(m, Bits{0, 1}), Energy(4));
  EXPECT_THROW(evaluateEnergy(m, Bits{1}), std::invalid_argument);
}

TEST(ExportQubo, EmptyModelIsHeaderOnly) {
  QuboMatrix m;
  EXPECT_EQ(exportQubo(m), "0 0 0\n");
  EXPECT_EQ(parseQubo(exportQubo(m)), m);
}

TEST(ExportQubo, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(55);
  for (int it = 0; it < 30; ++it) {
    const Instance inst = oracle::randomInstance(rng);
    BuildOptions opt;
    opt.slots = 1 + it % 3;
    const QuboModel md = assembleQubo(inst, opt);
    const std::string doc = exportQubo(md.matrix);
    const QuboMatrix back = parseQubo(doc);
    EXPECT_EQ(back, md.matrix);
    EXPECT_EQ(exportQubo(back), doc);
  }
}

TEST(ExportQubo, RejectsMalformedDocuments) {
  EXPECT_THROW(parseQubo("2 1 0\n1 0 5\n"), QuboFormatError);
  EXPECT_THROW(parseQubo("2 2 0\n0 0 1\n"), QuboFormatError);
  EXPECT_THROW(parseQubo("x y z\n"), QuboFormatError);
}

}  // namespace
}  // namespace rsched::qubo
