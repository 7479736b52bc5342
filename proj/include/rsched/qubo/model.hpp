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

#ifndef RSCHED_QUBO_MODEL_HPP
#define RSCHED_QUBO_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsched/fixed.hpp"
#include "rsched/model.hpp"

namespace rsched::qubo {

// ---------------------------------------------------------------------------
// Extended trips

/// A timetabled trip, optionally preceded by a maintenance task at one station.
struct ExtendedTrip {
  int id = 0;
  TripId baseTrip = 0;
  MaintTypeId maintenanceType = -1;
  StationId maintenanceStation = -1;
  StationId departureStation = 0;
  Minutes departureTime = 0;
  Minutes duration = 0;
  StationId arrivalStation = 0;
  Minutes arrivalTime = 0;
  Minutes postProc = 0;
  /// Empty km from the maintenance station to the trip's own departure.
  Km maintenanceLegKm = 0;
  Km baseKm = 0;

  bool hasMaintenance() const { return maintenanceType >= 0; }
  friend bool operator==(const ExtendedTrip&, const ExtendedTrip&) = default;
};

/// f2 cannot follow f1 on the same train.
inline bool overlap(const ExtendedTrip& f1, const ExtendedTrip& f2, const Network& net) {
  return f2.departureTime < f1.arrivalTime + f1.postProc + net.duration(f1.arrivalStation, f2.departureStation);
}

/// Base trips followed by their maintenance variants, per trip in id order;
/// variants iterate types by id and stations in declaration order. Variants
/// that would have to start before time 0 are dropped.
inline std::vector<ExtendedTrip> buildExtendedTrips(const Instance& inst) {
  std::vector<ExtendedTrip> out;
  const auto& net = inst.network;
  for (const Trip& f : inst.trips) {
    ExtendedTrip base;
    base.id = static_cast<int>(out.size());
    base.baseTrip = f.id;
    base.departureStation = f.departureStation;
    base.departureTime = f.departureTime;
    base.duration = f.duration;
    base.arrivalStation = f.arrivalStation;
    base.arrivalTime = f.arrivalTime;
    base.postProc = f.postProc;
    base.baseKm = f.distance;
    out.push_back(base);
    for (const MaintenanceType& w : inst.maintenanceTypes) {
      for (StationId s : w.stations) {
        const Minutes transfer = net.duration(s, f.departureStation);
        const Minutes dep = f.departureTime - transfer - w.duration;
        if (dep < 0) continue;
        ExtendedTrip e = base;
        e.id = static_cast<int>(out.size());
        e.maintenanceType = w.id;
        e.maintenanceStation = s;
        e.departureStation = s;
        e.departureTime = dep;
        e.duration = f.duration + w.duration + transfer;
        e.maintenanceLegKm = net.distance(s, f.departureStation);
        out.push_back(e);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variables

struct VariableKey {
  int slot = 0;
  int ext = 0;
  TrainId train = 0;
  friend bool operator==(const VariableKey&, const VariableKey&) = default;
};

/// Dense ids for X[slot, extended trip, train], ordered lexicographically by
/// (slot, extended trip, train).
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(int slots, int extCount, int trains)
      : q_(slots), e_(extCount), m_(trains), lookup_(static_cast<std::size_t>(slots) * extCount * trains, -1) {}

  int size() const { return static_cast<int>(keys_.size()); }
  int slots() const { return q_; }
  const VariableKey& key(int id) const { return keys_[static_cast<std::size_t>(id)]; }
  const std::vector<VariableKey>& keys() const { return keys_; }
  /// -1 when the variable was filtered out.
  int find(int slot, int ext, TrainId train) const {
    if (slot < 0 || slot >= q_ || ext < 0 || ext >= e_ || train < 0 || train >= m_) return -1;
    return lookup_[pos(slot, ext, train)];
  }
  void add(const VariableKey& k) {
    lookup_[pos(k.slot, k.ext, k.train)] = size();
    keys_.push_back(k);
  }

 private:
  std::size_t pos(int slot, int ext, int train) const {
    return (static_cast<std::size_t>(slot) * static_cast<std::size_t>(e_) + static_cast<std::size_t>(ext)) * static_cast<std::size_t>(m_) +
           static_cast<std::size_t>(train);
  }
  int q_ = 0;
  int e_ = 0;
  int m_ = 0;
  std::vector<int> lookup_;
  std::vector<VariableKey> keys_;
};

/// All (slot, extended trip, train) combinations except slot-0 trips the
/// train cannot reach from its initial station in time.
inline VariableIndex filterVariables(const Instance& inst, const std::vector<ExtendedTrip>& all, int q) {
  if (q < 1) throw std::invalid_argument("filterVariables: q must be at least 1");
  VariableIndex idx(q, static_cast<int>(all.size()), inst.trainCount());
  for (int i = 0; i < q; ++i)
    for (const ExtendedTrip& f : all)
      for (const Train& z : inst.trains) {
        if (i == 0 && f.departureTime < inst.network.duration(z.initialStation, f.departureStation) + z.earliestTime) continue;
        idx.add({i, f.id, z.id});
      }
  return idx;
}

// ---------------------------------------------------------------------------
// Weights and maintenance urgency

struct Weights {
  Coeff reward = 100;
  Coeff penalty = 1000;
  Coeff km = 1;
  Coeff maintenance = 40;
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Constants of the logistic maintenance urgency.
struct UrgencyConstants {
  double slope = 0.002;
  double offsetKm = 1300;
  Km immediateMarginKm = 500;
};

inline double alpha(const MaintenanceType& u, const Train& z, const UrgencyConstants& c = {}) {
  const double x = c.slope * (static_cast<double>(u.limit) - c.offsetKm - static_cast<double>(z.initialKm[static_cast<std::size_t>(u.id)]));
  return 1.0 / (std::exp(x) + 1.0);
}

inline bool immediateAction(const MaintenanceType& u, const Train& z, const UrgencyConstants& c = {}) {
  return u.limit < z.initialKm[static_cast<std::size_t>(u.id)] + c.immediateMarginKm;
}

// ---------------------------------------------------------------------------
// Matrix

enum class Term : std::uint8_t { Reward, C1, C2, C3, EmptyKm, Cm1, Cm2, Cm3 };
inline constexpr int kTermCount = 8;
inline constexpr std::uint16_t kAllTerms = 0xFF;
inline constexpr std::uint16_t termBit(Term t) { return static_cast<std::uint16_t>(1U << static_cast<unsigned>(t)); }
inline constexpr std::uint16_t kHardTerms = termBit(Term::C1) | termBit(Term::C2) | termBit(Term::C3);

inline const char* toString(Term t) {
  static constexpr std::array<const char*, kTermCount> names{"reward", "c1", "c2", "c3", "emptyKm", "cm1", "cm2", "cm3"};
  return names[static_cast<std::size_t>(t)];
}

struct QuboEntry {
  int i = 0;
  int j = 0;
  Coeff value;
  friend bool operator==(const QuboEntry&, const QuboEntry&) = default;
};

/// Upper-triangular sparse matrix (i <= j, sorted) plus a constant.
struct QuboMatrix {
  int variables = 0;
  std::vector<QuboEntry> entries;
  Energy offset;
  friend bool operator==(const QuboMatrix&, const QuboMatrix&) = default;
};

/// The model exceeded the configured non-zero budget.
class QuboSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuildOptions {
  int slots = 3;
  Weights weights;
  UrgencyConstants urgency;
  /// Terms to include; others contribute nothing.
  std::uint16_t terms = kAllTerms;
  std::optional<std::size_t> maxNonZeros;
};

/// The assembled model together with what is needed to interpret it.
struct QuboModel {
  Instance instance;
  std::vector<ExtendedTrip> trips;
  VariableIndex index;
  Weights weights;
  UrgencyConstants urgency;
  int slots = 0;
  std::uint16_t terms = kAllTerms;
  QuboMatrix matrix;
  /// Terms that contributed to each entry of matrix.entries.
  std::vector<std::uint16_t> tags;
  /// alpha(u, z) * wgMaintenance, rounded to the coefficient grid; [train][type].
  std::vector<std::vector<Coeff>> urgencyWeight;
  /// extOfBase[f]: extended trip ids of base trip f.
  std::vector<std::vector<int>> extOfBase;

  int variableCount() const { return index.size(); }
};

namespace detail {

/// Visits every term contribution to entry (a, b) with b >= a, as given by
/// the literal sums: ordered pairs count twice after folding.
template <class Emit>
void forEachContribution(const QuboModel& md, int a, Emit&& emit) {
  const auto& inst = md.instance;
  const auto& net = inst.network;
  const VariableKey ka = md.index.key(a);
  const ExtendedTrip& fa = md.trips[static_cast<std::size_t>(ka.ext)];
  const Train& z = inst.trains[static_cast<std::size_t>(ka.train)];
  const int q = md.slots;
  const int nExt = static_cast<int>(md.trips.size());
  const Weights& w = md.weights;
  auto on = [&](Term t) { return (md.terms & termBit(t)) != 0; };
  auto partner = [&](int slot, int ext, TrainId train) { return md.index.find(slot, ext, train); };

  if (ka.slot == 0) {
    if (on(Term::Reward)) emit(a, Term::Reward, -w.reward);
    if (on(Term::EmptyKm)) emit(a, Term::EmptyKm, w.km * net.distance(z.initialStation, fa.departureStation));
  }

  // c1: two extended trips of one train in one slot.
  if (on(Term::C1))
    for (int e = 0; e < nExt; ++e) {
      if (e == ka.ext) continue;
      const int b = partner(ka.slot, e, ka.train);
      if (b > a) emit(b, Term::C1, w.penalty * 2);
    }

  // c2: two variables that operate the same base trip.
  if (on(Term::C2))
    for (int e : md.extOfBase[static_cast<std::size_t>(fa.baseTrip)])
      for (int s = 0; s < q; ++s)
        for (int t = 0; t < inst.trainCount(); ++t) {
          const int b = partner(s, e, t);
          if (b > a) emit(b, Term::C2, w.penalty * 2);
        }

  // c3, successive-slot reward and empty km: same train, later slots.
  for (int s = ka.slot + 1; s < q; ++s) {
    for (int e = 0; e < nExt; ++e) {
      const int b = partner(s, e, ka.train);
      if (b < 0) continue;
      const ExtendedTrip& fb = md.trips[static_cast<std::size_t>(e)];
      if (on(Term::C3) && overlap(fa, fb, net)) emit(b, Term::C3, w.penalty);
      if (s == ka.slot + 1 && e != ka.ext) {
        if (on(Term::Reward)) emit(b, Term::Reward, -w.reward);
        if (on(Term::EmptyKm)) emit(b, Term::EmptyKm, w.km * net.distance(fa.arrivalStation, fb.departureStation));
      }
    }
  }
  // Pairs with earlier slots are emitted from the earlier variable; ids are
  // ordered by slot first, so those partners have smaller ids.

  if (!fa.hasMaintenance()) return;
  const int u = fa.maintenanceType;
  const MaintenanceType& mt = inst.maintenanceTypes[static_cast<std::size_t>(u)];
  const Coeff A = md.urgencyWeight[static_cast<std::size_t>(ka.train)][static_cast<std::size_t>(u)];
  const bool immediate = immediateAction(mt, z, md.urgency);
  // (sum x - 1)^2 = -sum x + 2 sum_{pairs} x x + 1 for binary x.
  const Term sq = immediate ? Term::Cm1 : Term::Cm2;
  if (on(sq) && (!immediate || ka.slot == 0)) {
    emit(a, sq, -A);
    const int lastSlot = immediate ? 0 : q - 1;
    for (int s = ka.slot; s <= lastSlot; ++s)
      for (int e = 0; e < nExt; ++e) {
        if (md.trips[static_cast<std::size_t>(e)].maintenanceType != u) continue;
        const int b = partner(s, e, ka.train);
        if (b > a) emit(b, sq, A * 2);
      }
  }
  if (on(Term::Cm3)) emit(a, Term::Cm3, w.maintenance - A);
}

/// Constant parts of the expanded squares.
inline std::array<Energy, kTermCount> constantTerms(const QuboModel& md) {
  std::array<Energy, kTermCount> c{};
  for (const Train& z : md.instance.trains)
    for (const MaintenanceType& u : md.instance.maintenanceTypes) {
      const Term sq = immediateAction(u, z, md.urgency) ? Term::Cm1 : Term::Cm2;
      if (md.terms & termBit(sq))
        c[static_cast<std::size_t>(sq)] += toEnergy(md.urgencyWeight[static_cast<std::size_t>(z.id)][static_cast<std::size_t>(u.id)]);
    }
  return c;
}

}  // namespace detail

/// Builds the full cost function for inst.
inline QuboModel assembleQubo(const Instance& inst, const BuildOptions& opt = {}) {
  if (opt.slots < 1) throw std::invalid_argument("assembleQubo: q must be at least 1");
  QuboModel md;
  md.instance = inst;
  md.trips = buildExtendedTrips(inst);
  md.index = filterVariables(inst, md.trips, opt.slots);
  md.weights = opt.weights;
  md.urgency = opt.urgency;
  md.slots = opt.slots;
  md.terms = opt.terms;
  md.extOfBase.assign(inst.trips.size(), {});
  for (const ExtendedTrip& e : md.trips) md.extOfBase[static_cast<std::size_t>(e.baseTrip)].push_back(e.id);
  md.urgencyWeight.assign(inst.trains.size(), std::vector<Coeff>(inst.maintenanceTypes.size()));
  for (const Train& z : inst.trains)
    for (const MaintenanceType& u : inst.maintenanceTypes)
      md.urgencyWeight[static_cast<std::size_t>(z.id)][static_cast<std::size_t>(u.id)] =
          Coeff::fromDouble(alpha(u, z, md.urgency) * opt.weights.maintenance.toDouble());

  const int n = md.index.size();
  md.matrix.variables = n;
  std::vector<Coeff> row(static_cast<std::size_t>(n));
  std::vector<std::uint16_t> rowTags(static_cast<std::size_t>(n), 0);
  std::vector<int> touched;
  for (int a = 0; a < n; ++a) {
    touched.clear();
    detail::forEachContribution(md, a, [&](int b, Term t, Coeff c) {
      if (rowTags[static_cast<std::size_t>(b)] == 0) touched.push_back(b);
      row[static_cast<std::size_t>(b)] += c;
      rowTags[static_cast<std::size_t>(b)] |= termBit(t);
    });
    std::sort(touched.begin(), touched.end());
    for (int b : touched) {
      if (!row[static_cast<std::size_t>(b)].isZero()) {
        md.matrix.entries.push_back({a, b, row[static_cast<std::size_t>(b)]});
        md.tags.push_back(rowTags[static_cast<std::size_t>(b)]);
      }
      row[static_cast<std::size_t>(b)] = Coeff{};
      rowTags[static_cast<std::size_t>(b)] = 0;
    }
    if (opt.maxNonZeros && md.matrix.entries.size() > *opt.maxNonZeros)
      throw QuboSizeError("QUBO has more than " + std::to_string(*opt.maxNonZeros) + " non-zero coefficients (" +
                          std::to_string(n) + " variables)");
  }
  for (const Energy& c : detail::constantTerms(md)) md.matrix.offset += c;
  return md;
}

using Bits = std::vector<std::uint8_t>;

/// x^T Q x + offset.
inline Energy evaluateEnergy(const QuboMatrix& m, const Bits& x) {
  if (static_cast<int>(x.size()) != m.variables) throw std::invalid_argument("evaluateEnergy: bit vector has wrong length");
  Energy e = m.offset;
  for (const QuboEntry& en : m.entries)
    if (x[static_cast<std::size_t>(en.i)] && x[static_cast<std::size_t>(en.j)]) e += toEnergy(en.value);
  return e;
}

/// Energy split by the term that produced it; the parts sum to evaluateEnergy().
inline std::array<Energy, kTermCount> energyByTerm(const QuboModel& md, const Bits& x) {
  if (static_cast<int>(x.size()) != md.variableCount()) throw std::invalid_argument("energyByTerm: bit vector has wrong length");
  auto out = detail::constantTerms(md);
  for (int a = 0; a < md.variableCount(); ++a) {
    if (!x[static_cast<std::size_t>(a)]) continue;
    detail::forEachContribution(md, a, [&](int b, Term t, Coeff c) {
      if (x[static_cast<std::size_t>(b)]) out[static_cast<std::size_t>(t)] += toEnergy(c);
    });
  }
  return out;
}

inline Energy hardEnergy(const QuboModel& md, const Bits& x) {
  const auto parts = energyByTerm(md, x);
  return parts[static_cast<std::size_t>(Term::C1)] + parts[static_cast<std::size_t>(Term::C2)] + parts[static_cast<std::size_t>(Term::C3)];
}

// ---------------------------------------------------------------------------
// Coordinate-list text format
//
//   <variables> <non-zeros> <offset>
//   <i> <j> <coefficient>        (i <= j, sorted, one line per entry)
//
// Numbers are exact decimals; every coefficient is a multiple of 2^-24.

inline std::string exportQubo(const QuboMatrix& m) {
  std::string out = std::to_string(m.variables) + " " + std::to_string(m.entries.size()) + " " + m.offset.toString() + "\n";
  for (const QuboEntry& e : m.entries) out += std::to_string(e.i) + " " + std::to_string(e.j) + " " + e.value.toString() + "\n";
  return out;
}

class QuboFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline QuboMatrix parseQubo(std::string_view text) {
  std::istringstream in{std::string(text)};
  QuboMatrix m;
  std::string line;
  int lineNo = 0;
  auto fail = [&](const std::string& why) { throw QuboFormatError("line " + std::to_string(lineNo) + ": " + why); };
  std::size_t nnz = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a >> b >> c) || (ls >> extra)) fail("expected three fields");
    if (!header) {
      try {
        m.variables = std::stoi(a);
        nnz = static_cast<std::size_t>(std::stoull(b));
      } catch (const std::exception&) {
        fail("bad header counts");
      }
      auto off = Energy::parse(c);
      if (!off || m.variables < 0) fail("bad header");
      m.offset = *off;
      header = true;
      continue;
    }
    QuboEntry e;
    try {
      e.i = std::stoi(a);
      e.j = std::stoi(b);
    } catch (const std::exception&) {
      fail("bad index");
    }
    auto v = Coeff::parse(c);
    if (!v) fail("bad coefficient '" + c + "'");
    e.value = *v;
    if (e.i < 0 || e.j < e.i || e.j >= m.variables) fail("index out of range or below the diagonal");
    if (!m.entries.empty()) {
      const auto& p = m.entries.back();
      if (std::pair(p.i, p.j) >= std::pair(e.i, e.j)) fail("entries not strictly sorted");
    }
    m.entries.push_back(e);
  }
  if (!header) throw QuboFormatError("missing header");
  if (m.entries.size() != nnz) throw QuboFormatError("header announces " + std::to_string(nnz) + " entries, found " + std::to_string(m.entries.size()));
  return m;
}

}  // namespace rsched::qubo

#endif  // RSCHED_QUBO_MODEL_HPP
