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

#ifndef RSCHED_QUBO_DECODE_HPP
#define RSCHED_QUBO_DECODE_HPP

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rsched/model.hpp"
#include "rsched/qubo/model.hpp"

namespace rsched::qubo {

/// Raw schedule for a bit vector: per train, the selected variables in id
/// order (slot, then extended trip), with empty rides wherever the train is
/// not already at the next departure station. Nothing is checked here.
inline Schedule decodeSolution(const Instance& inst, const std::vector<ExtendedTrip>& all, const VariableIndex& index, const Bits& bits) {
  if (static_cast<int>(bits.size()) != index.size()) throw std::invalid_argument("decodeSolution: bit vector has wrong length");
  const auto& net = inst.network;
  Schedule s = Schedule::empty(inst);
  std::vector<StationId> pos(inst.trains.size());
  for (const Train& z : inst.trains) pos[static_cast<std::size_t>(z.id)] = z.initialStation;
  for (int v = 0; v < index.size(); ++v) {
    if (!bits[static_cast<std::size_t>(v)]) continue;
    const VariableKey& k = index.key(v);
    const ExtendedTrip& f = all[static_cast<std::size_t>(k.ext)];
    auto& acts = s.perTrain[static_cast<std::size_t>(k.train)];
    StationId& at = pos[static_cast<std::size_t>(k.train)];
    if (at != f.departureStation) acts.emplace_back(EmptyRide{at, f.departureStation, net.distance(at, f.departureStation)});
    at = f.departureStation;
    if (f.hasMaintenance()) {
      acts.emplace_back(MaintenanceTask{f.maintenanceType, f.maintenanceStation});
      const StationId dep = inst.trips[static_cast<std::size_t>(f.baseTrip)].departureStation;
      if (at != dep) acts.emplace_back(EmptyRide{at, dep, net.distance(at, dep)});
    }
    acts.emplace_back(RegularTrip{f.baseTrip, k.slot});
    at = f.arrivalStation;
  }
  return s;
}

inline Schedule decodeSolution(const QuboModel& md, const Bits& bits) {
  return decodeSolution(md.instance, md.trips, md.index, bits);
}

/// Bit vector whose decode is sched, or nullopt when some trip has no slot
/// or no variable in the index.
inline std::optional<Bits> encodeSchedule(const QuboModel& md, const Schedule& sched) {
  Bits bits(static_cast<std::size_t>(md.variableCount()), 0);
  for (std::size_t i = 0; i < sched.perTrain.size(); ++i) {
    const auto& acts = sched.perTrain[i];
    for (std::size_t a = 0; a < acts.size(); ++a) {
      const auto* rt = std::get_if<RegularTrip>(&acts[a]);
      if (!rt) continue;
      if (rt->slot < 0 || rt->trip < 0 || rt->trip >= md.instance.tripCount()) return std::nullopt;
      const MaintenanceTask* task = nullptr;
      if (a >= 1) task = std::get_if<MaintenanceTask>(&acts[a - 1]);
      if (!task && a >= 2 && std::holds_alternative<EmptyRide>(acts[a - 1])) task = std::get_if<MaintenanceTask>(&acts[a - 2]);
      int ext = -1;
      for (int e : md.extOfBase[static_cast<std::size_t>(rt->trip)]) {
        const ExtendedTrip& f = md.trips[static_cast<std::size_t>(e)];
        if (task ? (f.maintenanceType == task->type && f.maintenanceStation == task->station) : !f.hasMaintenance()) {
          ext = e;
          break;
        }
      }
      const int v = ext < 0 ? -1 : md.index.find(rt->slot, ext, static_cast<TrainId>(i));
      if (v < 0) return std::nullopt;
      bits[static_cast<std::size_t>(v)] = 1;
    }
  }
  return bits;
}

}  // namespace rsched::qubo

#endif  // RSCHED_QUBO_DECODE_HPP
