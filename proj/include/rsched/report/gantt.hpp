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

#ifndef RSCHED_REPORT_GANTT_HPP
#define RSCHED_REPORT_GANTT_HPP

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rsched/model.hpp"
#include "rsched/report/validate.hpp"

namespace rsched {

/// CSS class and fill of each block kind.
struct GanttStyle {
  static constexpr const char* kTrip = "trip";
  static constexpr const char* kMaintenance = "maintenance";
  static constexpr const char* kEmpty = "empty";
  static constexpr const char* kIdle = "idle";
  static constexpr const char* kConflict = "conflict";
  static const char* fill(const std::string& cls) {
    if (cls == kTrip) return "black";
    if (cls == kMaintenance) return "blue";
    if (cls == kEmpty) return "green";
    if (cls == kIdle) return "yellow";
    return "red";
  }
};

struct GanttBlock {
  TrainId train = 0;
  Minutes start = 0;
  Minutes end = 0;
  std::string cls;
  std::string label;
};

/// Blocks per lane, clipped to the horizon. Time not covered by any activity
/// is an idle block.
inline std::vector<GanttBlock> ganttBlocks(const Instance& inst, const Schedule& sched, const ValidationReport& rep) {
  std::vector<GanttBlock> out;
  const Minutes e = inst.horizonEnd;
  for (std::size_t i = 0; i < inst.trains.size(); ++i) {
    std::vector<GanttBlock> busy;
    if (i < sched.perTrain.size() && i < rep.trains.size()) {
      const auto& acts = sched.perTrain[i];
      const auto& timing = rep.trains[i].timing;
      for (std::size_t a = 0; a < acts.size(); ++a) {
        GanttBlock b;
        b.train = static_cast<TrainId>(i);
        b.start = std::clamp<Minutes>(timing[a].start, 0, e);
        b.end = std::clamp<Minutes>(timing[a].end, 0, e);
        if (const auto* rt = std::get_if<RegularTrip>(&acts[a])) {
          b.cls = timing[a].flagged ? GanttStyle::kConflict : GanttStyle::kTrip;
          b.label = "trip " + std::to_string(rt->trip);
        } else if (const auto* mt = std::get_if<MaintenanceTask>(&acts[a])) {
          b.cls = GanttStyle::kMaintenance;
          b.label = "maintenance " + std::to_string(mt->type) + " at " + inst.network.stations[static_cast<std::size_t>(mt->station)];
        } else {
          const auto& r = std::get<EmptyRide>(acts[a]);
          b.cls = GanttStyle::kEmpty;
          b.label = "empty " + std::to_string(r.km) + " km";
        }
        if (b.end > b.start) busy.push_back(std::move(b));
      }
    }
    std::vector<std::pair<Minutes, Minutes>> spans;
    for (const auto& b : busy) spans.emplace_back(b.start, b.end);
    std::sort(spans.begin(), spans.end());
    Minutes cursor = 0;
    for (const auto& [s, t] : spans) {
      if (s > cursor) out.push_back({static_cast<TrainId>(i), cursor, s, GanttStyle::kIdle, "unavailable"});
      cursor = std::max(cursor, t);
    }
    if (cursor < e) out.push_back({static_cast<TrainId>(i), cursor, e, GanttStyle::kIdle, "unavailable"});
    // Idle blocks first so activities are painted over them.
    for (auto& b : busy) out.push_back(std::move(b));
  }
  return out;
}

/// Standalone SVG, one lane per train across the horizon.
inline std::string renderGantt(const Instance& inst, const Schedule& sched, const ValidationReport& rep, const std::string& title = "") {
  constexpr int laneHeight = 16;
  constexpr int laneGap = 4;
  constexpr int left = 60;
  constexpr int top = 24;
  constexpr int width = 1440;
  const double scale = inst.horizonEnd > 0 ? static_cast<double>(width) / static_cast<double>(inst.horizonEnd) : 1.0;
  const int height = top + inst.trainCount() * (laneHeight + laneGap) + 8;
  char buf[256];
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '&') o += "&amp;";
      else if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else o += c;
    }
    return o;
  };

  std::string svg;
  std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", left + width + 10,
                height, left + width + 10, height);
  svg += buf;
  svg += "<style>\n";
  for (const char* cls : {GanttStyle::kTrip, GanttStyle::kMaintenance, GanttStyle::kEmpty, GanttStyle::kIdle, GanttStyle::kConflict})
    svg += std::string("  .") + cls + " { fill: " + GanttStyle::fill(cls) + "; }\n";
  svg += "  text { font-family: sans-serif; font-size: 11px; }\n</style>\n";
  if (!title.empty()) svg += "<text x=\"" + std::to_string(left) + "\" y=\"14\">" + escape(title) + "</text>\n";
  for (int i = 0; i < inst.trainCount(); ++i) {
    std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%d\">train %d</text>\n", top + i * (laneHeight + laneGap) + laneHeight - 4, i);
    svg += buf;
  }
  for (const GanttBlock& b : ganttBlocks(inst, sched, rep)) {
    const int y = top + b.train * (laneHeight + laneGap);
    std::snprintf(buf, sizeof buf, "<rect class=\"%s\" fill=\"%s\" x=\"%.2f\" y=\"%d\" width=\"%.2f\" height=\"%d\"><title>", b.cls.c_str(),
                  GanttStyle::fill(b.cls), left + b.start * scale, y, (b.end - b.start) * scale, laneHeight);
    svg += buf;
    svg += escape(b.label) + " [" + std::to_string(b.start) + ", " + std::to_string(b.end) + ")</title></rect>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace rsched

#endif  // RSCHED_REPORT_GANTT_HPP
