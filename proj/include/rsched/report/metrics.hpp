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

#ifndef RSCHED_REPORT_METRICS_HPP
#define RSCHED_REPORT_METRICS_HPP

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rsched/model.hpp"
#include "rsched/report/validate.hpp"

namespace rsched {

/// One solver run to be tabulated.
struct MethodRun {
  std::string method;
  ValidationReport report;
  /// Wall-clock of the solve phase only.
  double solveSeconds = 0;
  /// Model construction or propagation set-up, if measured.
  std::optional<double> buildSeconds;
};

struct MetricsRow {
  std::string dataset;
  std::string method;
  int rawTrips = 0;
  int correctedTrips = 0;
  int availableTrips = 0;
  int usedTrains = 0;
  int availableTrains = 0;
  Km emptyKm = 0;
  double solveSeconds = 0;
  std::optional<double> buildSeconds;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
};

/// "123" when nothing was flagged, "123(118)" otherwise.
inline std::string tripsCell(int raw, int corrected) {
  if (raw == corrected) return std::to_string(raw);
  return std::to_string(raw) + "(" + std::to_string(corrected) + ")";
}

inline MetricsTable computeMetrics(const Instance& inst, const std::string& dataset, const std::vector<MethodRun>& runs) {
  MetricsTable t;
  for (const MethodRun& r : runs) {
    MetricsRow row;
    row.dataset = dataset;
    row.method = r.method;
    row.rawTrips = r.report.rawAllocatedTrips;
    row.correctedTrips = r.report.correctedAllocatedTrips;
    row.availableTrips = inst.tripCount();
    row.usedTrains = r.report.usedTrains;
    row.availableTrains = inst.trainCount();
    row.emptyKm = r.report.emptyKm;
    row.solveSeconds = r.solveSeconds;
    row.buildSeconds = r.buildSeconds;
    t.rows.push_back(row);
  }
  return t;
}

inline const std::vector<std::string>& metricsColumns() {
  static const std::vector<std::string> cols{"dataset",          "allocated trips", "available trips", "used trains", "available trains",
                                             "method",           "empty rides [km]", "run-time [s]"};
  return cols;
}

namespace detail {

inline std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

inline std::vector<std::string> cells(const MetricsRow& r) {
  std::string time = seconds(r.solveSeconds);
  if (r.buildSeconds) time = seconds(*r.buildSeconds) + " + " + time;
  return {r.dataset,
          tripsCell(r.rawTrips, r.correctedTrips),
          std::to_string(r.availableTrips),
          std::to_string(r.usedTrains),
          std::to_string(r.availableTrains),
          r.method,
          std::to_string(r.emptyKm),
          time};
}

}  // namespace detail

/// Pipe-delimited text table. Run-time reads "build + solve" when the build
/// phase was measured.
inline std::string renderTable(const MetricsTable& t) {
  auto line = [](const std::vector<std::string>& cs) {
    std::string s = "|";
    for (const auto& c : cs) s += " " + c + " |";
    return s + "\n";
  };
  std::string out = line(metricsColumns());
  std::vector<std::string> rule(metricsColumns().size(), "---");
  out += line(rule);
  for (const MetricsRow& r : t.rows) out += line(detail::cells(r));
  return out;
}

inline std::string renderCsv(const MetricsTable& t) {
  auto line = [](const std::vector<std::string>& cs) {
    std::string s;
    for (std::size_t k = 0; k < cs.size(); ++k) s += (k ? "," : "") + cs[k];
    return s + "\n";
  };
  std::string out = line(metricsColumns());
  for (const MetricsRow& r : t.rows) out += line(detail::cells(r));
  return out;
}

}  // namespace rsched

#endif  // RSCHED_REPORT_METRICS_HPP
