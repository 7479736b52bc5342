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

#ifndef RSCHED_TESTS_FIXTURES_HPP
#define RSCHED_TESTS_FIXTURES_HPP

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "rsched/instance_io.hpp"
#include "rsched/model.hpp"

namespace rsched::test {

inline std::string readText(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef RSCHED_SAMPLES_DIR
inline Instance deskInstance() { return parseInstance(readText(std::string(RSCHED_SAMPLES_DIR) + "/desk_instance.json")); }
#endif

/// Network over the given names with every off-diagonal entry set to km/min.
inline Network uniformNetwork(std::vector<std::string> names, Km km, Minutes min) {
  Network net = Network::withStations(std::move(names));
  for (int b = 0; b < net.size(); ++b)
    for (int c = 0; c < net.size(); ++c)
      if (b != c) {
        net.distance(b, c) = km;
        net.duration(b, c) = min;
      }
  return net;
}

inline Trip makeTrip(TripId id, StationId from, StationId to, Minutes dep, Minutes dur, Km km, Minutes postProc = 0) {
  Trip f;
  f.id = id;
  f.departureStation = from;
  f.arrivalStation = to;
  f.departureTime = dep;
  f.arrivalTime = dep + dur;
  f.duration = dur;
  f.distance = km;
  f.postProc = postProc;
  return f;
}

inline Train makeTrain(TrainId id, StationId at, std::vector<Km> initialKm = {}, Minutes earliest = 0) {
  Train z;
  z.id = id;
  z.initialStation = at;
  z.earliestTime = earliest;
  z.initialKm = std::move(initialKm);
  return z;
}

inline MaintenanceType makeType(MaintTypeId id, std::vector<StationId> stations, Minutes duration, bool periodic, Km limit) {
  MaintenanceType w;
  w.id = id;
  w.stations = std::move(stations);
  w.duration = duration;
  w.isPeriodic = periodic;
  w.limit = limit;
  return w;
}

}  // namespace rsched::test

#endif  // RSCHED_TESTS_FIXTURES_HPP
