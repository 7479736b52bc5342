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

#ifndef RSCHED_CP_SLOT_PLAN_HPP
#define RSCHED_CP_SLOT_PLAN_HPP

#include <algorithm>
#include <cassert>
#include <vector>

#include "rsched/bitset.hpp"
#include "rsched/model.hpp"

namespace rsched::cp {

/// Largest q such that the q shortest trips fit into {0, ..., e-1}, capped at n.
inline int computeSlotCount(const Instance& inst) {
  std::vector<Minutes> d;
  d.reserve(inst.trips.size());
  for (const Trip& f : inst.trips) d.push_back(f.duration);
  std::sort(d.begin(), d.end());
  Minutes sum = 0;
  int q = 0;
  for (Minutes x : d) {
    if (sum + x > inst.horizonEnd - 1) break;
    sum += x;
    ++q;
  }
  return q;
}

/// Domain of trip_{i,j}: real trip ids plus the slot's own sentinel.
struct TripDomain {
  Bitset trips;
  bool sentinel = true;

  bool empty() const { return !sentinel && trips.none(); }
  bool hasReal() const { return trips.any(); }
  bool onlySentinel() const { return sentinel && trips.none(); }
  int size() const { return trips.count() + (sentinel ? 1 : 0); }
  bool fixed() const { return size() == 1; }
  /// The single real id, or -1.
  int fixedTrip() const { return (!sentinel && trips.count() == 1) ? trips.next() : -1; }

  friend bool operator==(const TripDomain&, const TripDomain&) = default;
};

/// Domain of maint_{i,j}: -1 ("none") plus maintenance type ids.
struct MaintDomain {
  Bitset types;
  bool none = true;

  bool empty() const { return !none && types.none(); }
  bool hasType() const { return types.any(); }
  int size() const { return types.count() + (none ? 1 : 0); }
  bool fixed() const { return size() == 1; }
  /// The single type id, or -1.
  int fixedType() const { return (!none && types.count() == 1) ? types.next() : -1; }

  friend bool operator==(const MaintDomain&, const MaintDomain&) = default;
};

/// Trip and maintenance variables of every train and slot.
class SlotPlan {
 public:
  SlotPlan() = default;
  /// Full domains for m trains, q slots, n trips and p maintenance types.
  SlotPlan(int trains, int slots, int trips, int types) : m_(trains), q_(slots), n_(trips), p_(types) {
    assert(slots >= 1);
    trip_.assign(static_cast<std::size_t>(m_ * q_), TripDomain{Bitset(n_, true), true});
    maint_.assign(static_cast<std::size_t>(m_ * q_), MaintDomain{Bitset(p_, true), true});
  }
  static SlotPlan full(const Instance& inst, int q) { return SlotPlan(inst.trainCount(), q, inst.tripCount(), inst.typeCount()); }

  int trains() const { return m_; }
  int slots() const { return q_; }
  int tripCount() const { return n_; }
  int typeCount() const { return p_; }

  /// The "no trip" value of trip_{i,j}.
  int sentinel(int i, int j) const { return -(i * q_ + j + 1); }

  TripDomain& trip(int i, int j) { return trip_[idx(i, j)]; }
  const TripDomain& trip(int i, int j) const { return trip_[idx(i, j)]; }
  MaintDomain& maint(int i, int j) { return maint_[idx(i, j)]; }
  const MaintDomain& maint(int i, int j) const { return maint_[idx(i, j)]; }

  /// Sorted values of trip_{i,j}, the sentinel first.
  std::vector<int> tripValues(int i, int j) const {
    std::vector<int> out;
    if (trip(i, j).sentinel) out.push_back(sentinel(i, j));
    trip(i, j).trips.forEach([&](int k) { out.push_back(k); });
    return out;
  }
  /// Sorted values of maint_{i,j}.
  std::vector<int> maintValues(int i, int j) const {
    std::vector<int> out;
    if (maint(i, j).none) out.push_back(-1);
    maint(i, j).types.forEach([&](int u) { out.push_back(u); });
    return out;
  }

  void assignTrip(int i, int j, int value) {
    TripDomain& d = trip(i, j);
    const bool real = value >= 0;
    const bool had = real ? d.trips.test(value) : d.sentinel;
    d.trips.clear();
    d.sentinel = !real && had;
    if (real && had) d.trips.set(value);
  }
  void assignMaint(int i, int j, int value) {
    MaintDomain& d = maint(i, j);
    const bool had = value >= 0 ? d.types.test(value) : d.none;
    d.types.clear();
    d.none = value < 0 && had;
    if (value >= 0 && had) d.types.set(value);
  }

  bool anyEmpty() const {
    for (const auto& d : trip_)
      if (d.empty()) return true;
    for (const auto& d : maint_)
      if (d.empty()) return true;
    return false;
  }
  bool allFixed() const {
    for (const auto& d : trip_)
      if (!d.fixed()) return false;
    for (const auto& d : maint_)
      if (!d.fixed()) return false;
    return true;
  }

  friend bool operator==(const SlotPlan&, const SlotPlan&) = default;

 private:
  std::size_t idx(int i, int j) const {
    assert(i >= 0 && i < m_ && j >= 0 && j < q_);
    return static_cast<std::size_t>(i * q_ + j);
  }

  int m_ = 0;
  int q_ = 0;
  int n_ = 0;
  int p_ = 0;
  std::vector<TripDomain> trip_;
  std::vector<MaintDomain> maint_;
};

}  // namespace rsched::cp

#endif  // RSCHED_CP_SLOT_PLAN_HPP
