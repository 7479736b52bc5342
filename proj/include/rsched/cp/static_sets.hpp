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

#ifndef RSCHED_CP_STATIC_SETS_HPP
#define RSCHED_CP_STATIC_SETS_HPP

#include <vector>

#include "rsched/bitset.hpp"
#include "rsched/model.hpp"

namespace rsched::cp {

/// Instance-level compatibility sets, computed once and shared read-only.
struct StaticSets {
  /// pred[k] = V_k: trips h after which k can follow directly.
  std::vector<Bitset> pred;
  /// succ[k] = N_k: trips h that can follow k directly.
  std::vector<Bitset> succ;
  /// maintSucc[u][x] = {y | (x, y) in W_u}.
  std::vector<std::vector<Bitset>> maintSucc;
  /// maintPred[u][y] = {x | (x, y) in W_u}.
  std::vector<std::vector<Bitset>> maintPred;
  /// W_u|1 and W_u|2.
  std::vector<Bitset> maintFirst;
  std::vector<Bitset> maintSecond;
  /// first[i][u] = U_{i,u}: possible first trips of train i after maintenance u.
  std::vector<std::vector<Bitset>> first;
  /// direct[i]: trips train i can reach from its initial station without maintenance.
  std::vector<Bitset> direct;

  bool inW(int u, int x, int y) const {
    return maintSucc[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)].test(y);
  }
};

inline StaticSets computeStaticSets(const Instance& inst) {
  const int n = inst.tripCount();
  const int m = inst.trainCount();
  const int p = inst.typeCount();
  const auto& net = inst.network;
  StaticSets s;
  s.pred.assign(static_cast<std::size_t>(n), Bitset(n));
  s.succ.assign(static_cast<std::size_t>(n), Bitset(n));
  for (int h = 0; h < n; ++h) {
    const Trip& a = inst.trips[static_cast<std::size_t>(h)];
    for (int k = 0; k < n; ++k) {
      const Trip& b = inst.trips[static_cast<std::size_t>(k)];
      if (a.arrivalTime + a.postProc + net.duration(a.arrivalStation, b.departureStation) <= b.departureTime) {
        s.succ[static_cast<std::size_t>(h)].set(k);
        s.pred[static_cast<std::size_t>(k)].set(h);
      }
    }
  }

  s.maintSucc.assign(static_cast<std::size_t>(p), std::vector<Bitset>(static_cast<std::size_t>(n), Bitset(n)));
  s.maintPred.assign(static_cast<std::size_t>(p), std::vector<Bitset>(static_cast<std::size_t>(n), Bitset(n)));
  s.maintFirst.assign(static_cast<std::size_t>(p), Bitset(n));
  s.maintSecond.assign(static_cast<std::size_t>(p), Bitset(n));
  for (int u = 0; u < p; ++u) {
    const MaintenanceType& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
    for (int x = 0; x < n; ++x) {
      const Trip& a = inst.trips[static_cast<std::size_t>(x)];
      for (int y = 0; y < n; ++y) {
        const Trip& b = inst.trips[static_cast<std::size_t>(y)];
        for (StationId st : w.stations) {
          if (a.arrivalTime + a.postProc + net.duration(a.arrivalStation, st) + w.duration +
                  net.duration(st, b.departureStation) <= b.departureTime) {
            s.maintSucc[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)].set(y);
            s.maintPred[static_cast<std::size_t>(u)][static_cast<std::size_t>(y)].set(x);
            s.maintFirst[static_cast<std::size_t>(u)].set(x);
            s.maintSecond[static_cast<std::size_t>(u)].set(y);
            break;
          }
        }
      }
    }
  }

  s.first.assign(static_cast<std::size_t>(m), std::vector<Bitset>(static_cast<std::size_t>(p), Bitset(n)));
  s.direct.assign(static_cast<std::size_t>(m), Bitset(n));
  for (int i = 0; i < m; ++i) {
    const Train& z = inst.trains[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) {
      const Trip& f = inst.trips[static_cast<std::size_t>(k)];
      if (z.earliestTime + net.duration(z.initialStation, f.departureStation) <= f.departureTime)
        s.direct[static_cast<std::size_t>(i)].set(k);
      for (int u = 0; u < p; ++u) {
        const MaintenanceType& w = inst.maintenanceTypes[static_cast<std::size_t>(u)];
        for (StationId st : w.stations) {
          if (z.earliestTime + net.duration(z.initialStation, st) + w.duration + net.duration(st, f.departureStation) <=
              f.departureTime) {
            s.first[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)].set(k);
            break;
          }
        }
      }
    }
  }
  return s;
}

}  // namespace rsched::cp

#endif  // RSCHED_CP_STATIC_SETS_HPP
