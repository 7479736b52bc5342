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

#ifndef RSCHED_CLI_HPP
#define RSCHED_CLI_HPP

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsched/cp/search.hpp"
#include "rsched/instance_io.hpp"
#include "rsched/qubo/decode.hpp"
#include "rsched/qubo/model.hpp"
#include "rsched/qubo/solve.hpp"
#include "rsched/report/gantt.hpp"
#include "rsched/report/metrics.hpp"
#include "rsched/report/solution_io.hpp"
#include "rsched/report/validate.hpp"

namespace rsched::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kUsage = 2;

/// A problem with the command line that parsing alone cannot catch.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver ran but produced nothing usable.
class SolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeFile(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
}

inline double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// "reward=100,penalty=1000,km=1,maintenance=40"; missing keys keep defaults.
inline qubo::Weights parseWeights(const std::string& text) {
  qubo::Weights w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--weights: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const auto value = Coeff::parse(item.substr(eq + 1));
    if (!value) throw UsageError("--weights: bad number in '" + item + "'");
    if (key == "reward") w.reward = *value;
    else if (key == "penalty") w.penalty = *value;
    else if (key == "km") w.km = *value;
    else if (key == "maintenance") w.maintenance = *value;
    else throw UsageError("--weights: unknown key '" + key + "'");
  }
  return w;
}

inline std::string improvementsJson(const cp::SearchResult& r) {
  using Json = nlohmann::ordered_json;
  Json doc = Json::object();
  Json log = Json::array();
  for (const auto& im : r.log) log.push_back({{"seconds", im.seconds}, {"trips", im.trips}, {"emptyKm", im.emptyKm}, {"objective", im.objective}});
  doc["improvements"] = std::move(log);
  doc["stats"] = {{"nodes", r.stats.nodes},       {"fails", r.stats.fails},           {"prunes", r.stats.prunes},
                  {"solutions", r.stats.solutions}, {"timeToFirst", r.stats.timeToFirst}, {"timeToBest", r.stats.timeToBest},
                  {"elapsed", r.stats.elapsed},   {"slots", r.stats.slots},           {"exhausted", r.stats.exhausted}};
  return doc.dump(2) + "\n";
}

inline std::string summaryLine(const ValidationReport& rep) {
  return "trips " + tripsCell(rep.rawAllocatedTrips, rep.correctedAllocatedTrips) + ", empty km " + std::to_string(rep.emptyKm) + ", used trains " +
         std::to_string(rep.usedTrains) + ", violations " + std::to_string(rep.violations.size());
}

struct QuboRun {
  Schedule schedule;
  ValidationReport report;
  qubo::SolveResult result;
  double buildSeconds = 0;
  int variables = 0;
  std::size_t nonZeros = 0;
};

inline QuboRun runQubo(const Instance& inst, const qubo::BuildOptions& opt, const qubo::SolverParams& params) {
  QuboRun run;
  const auto t0 = std::chrono::steady_clock::now();
  const qubo::QuboModel md = qubo::assembleQubo(inst, opt);
  run.buildSeconds = since(t0);
  run.variables = md.variableCount();
  run.nonZeros = md.matrix.entries.size();
  run.result = qubo::solve(md.matrix, params);
  run.schedule = qubo::decodeSolution(md, run.result.bits);
  run.report = validateSchedule(inst, run.schedule);
  return run;
}

}  // namespace detail

/// Parses args (without the program name), runs one subcommand and returns
/// its exit status: 0 success, 1 failed solve or invalid result, 2 usage.
inline int runPipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rolling-stock scheduling with maintenance: CP search and QUBO solvers", "rsched"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Random five-city timetable");
  qubo::BuildOptions buildOpt;
  GeneratorConfig gcfg;
  std::string outPath;
  gen->add_option("--trips", gcfg.tripCount, "Number of trips")->capture_default_str();
  gen->add_option("--trains", gcfg.trainCount, "Number of trains")->capture_default_str();
  gen->add_option("--seed", gcfg.seed, "Random seed")->capture_default_str();
  gen->add_option("--horizon", gcfg.horizonEnd, "Horizon end in minutes")->capture_default_str();
  gen->add_option("--post-proc", gcfg.postProc, "Post-processing minutes per trip")->capture_default_str();
  gen->add_option("--earliest", gcfg.earliestTime, "Earliest time of every train")->capture_default_str();
  gen->add_option("--out", outPath, "Instance file to write")->required();

  // subset
  auto* sub = app.add_subcommand("subset", "Random subset of trips and trains");
  double fraction = 1.0;
  std::uint64_t seed = 1;
  std::string inPath;
  sub->add_option("--fraction", fraction, "Share of trips and trains to keep, in (0,1]")->required();
  sub->add_option("--seed", seed, "Random seed")->capture_default_str();
  sub->add_option("--in", inPath, "Instance file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", outPath, "Instance file to write")->required();

  // solve-cp
  auto* scp = app.add_subcommand("solve-cp", "Branch and bound over the propagation engine");
  std::optional<double> timeLimit;
  std::optional<std::int64_t> nodeLimit;
  std::optional<int> slots;
  std::string logPath;
  cp::SearchConfig scfg;
  scp->add_option("--in", inPath, "Instance file")->required()->check(CLI::ExistingFile);
  scp->add_option("--time-limit", timeLimit, "Wall-clock budget in seconds");
  scp->add_option("--node-limit", nodeLimit, "Node budget");
  scp->add_option("--q", slots, "Slots per train (default: computed from trip durations)");
  scp->add_option("--big-m", scfg.bigM, "Weight of one trip against one empty km")->capture_default_str();
  scp->add_flag("--stronger-maint-rule", scfg.strongerMaintRule, "Prune maintenance values with the stronger reachability rule");
  scp->add_option("--out", outPath, "Solution file to write");
  scp->add_option("--log", logPath, "Improvement log to write");

  // build-qubo
  auto* bq = app.add_subcommand("build-qubo", "Assemble the QUBO matrix");
  std::string weightSpec;
  std::optional<std::size_t> maxNnz;
  bool noKm = false;
  bq->add_option("--in", inPath, "Instance file")->required()->check(CLI::ExistingFile);
  bq->add_option("--q", buildOpt.slots, "Slots per train")->capture_default_str();
  bq->add_option("--weights", weightSpec, "reward=100,penalty=1000,km=1,maintenance=40");
  bq->add_flag("--no-km", noKm, "Set the empty-km weight to 0");
  bq->add_option("--max-nnz", maxNnz, "Fail when the matrix has more non-zeros");
  bq->add_option("--out", outPath, "Coordinate-list file to write")->required();

  // solve-qubo
  auto* sq = app.add_subcommand("solve-qubo", "Minimise a QUBO file, or build, solve and decode an instance");
  std::string variantName = "tabu";
  std::string instancePath;
  std::string bitsPath;
  qubo::SolverParams sp;
  sq->add_option("--in", inPath, "Coordinate-list file")->check(CLI::ExistingFile);
  sq->add_option("--instance", instancePath, "Instance file: build, solve and decode in one step")->check(CLI::ExistingFile);
  sq->add_option("--variant", variantName, "tabu, sa or exhaustive")->capture_default_str();
  sq->add_option("--time-limit", timeLimit, "Wall-clock budget in seconds");
  sq->add_option("--iterations", sp.iterations, "Moves per restart (tabu) or sweeps (sa); 0 = automatic")->capture_default_str();
  sq->add_option("--tenure", sp.tenure, "Tabu tenure; 0 = 10 + ceil(sqrt(variables))")->capture_default_str();
  sq->add_option("--restarts", sp.restarts, "Restarts per worker")->capture_default_str();
  sq->add_option("--t-initial", sp.initialTemperature, "Annealing start temperature; 0 = automatic");
  sq->add_option("--t-final", sp.finalTemperature, "Annealing end temperature; 0 = automatic");
  sq->add_option("--seed", sp.seed, "Random seed")->capture_default_str();
  sq->add_option("--workers", sp.workers, "Parallel multi-start workers")->capture_default_str();
  sq->add_option("--q", buildOpt.slots, "Slots per train (with --instance)")->capture_default_str();
  sq->add_option("--weights", weightSpec, "Weights (with --instance)");
  sq->add_flag("--no-km", noKm, "Set the empty-km weight to 0 (with --instance)");
  sq->add_option("--max-nnz", maxNnz, "Non-zero cap (with --instance)");
  sq->add_option("--bits", bitsPath, "Bit vector file to write (with --instance)");
  sq->add_option("--out", outPath, "Bit vector file, or solution file with --instance")->required();

  // validate
  auto* val = app.add_subcommand("validate", "Check a solution against an instance");
  std::string solutionPath;
  val->add_option("--in", inPath, "Instance file")->required()->check(CLI::ExistingFile);
  val->add_option("--solution", solutionPath, "Solution file")->required()->check(CLI::ExistingFile);
  val->add_option("--out", outPath, "Annotated solution file to write");

  // report
  auto* rep = app.add_subcommand("report", "Solve with several methods and write the results table and Gantt charts");
  std::string methodSpec = "cp,tabu";
  std::string outDir = "report";
  std::string dataset;
  double quboFraction = 1.0;
  std::optional<double> quboTimeLimit;
  rep->add_option("--in", inPath, "Instance file")->required()->check(CLI::ExistingFile);
  rep->add_option("--methods", methodSpec, "Comma-separated subset of cp,tabu,sa,exhaustive")->capture_default_str();
  rep->add_option("--time-limit", timeLimit, "Budget per method in seconds (default 60)");
  rep->add_option("--qubo-time-limit", quboTimeLimit, "Budget for QUBO methods (default: --time-limit)");
  rep->add_option("--qubo-fraction", quboFraction, "Run QUBO methods on a subset of this size")->capture_default_str();
  rep->add_option("--seed", sp.seed, "Seed for subsetting and QUBO solvers")->capture_default_str();
  rep->add_option("--workers", sp.workers, "QUBO multi-start workers")->capture_default_str();
  rep->add_option("--q", buildOpt.slots, "QUBO slots per train")->capture_default_str();
  rep->add_option("--weights", weightSpec, "QUBO weights");
  rep->add_flag("--no-km", noKm, "Set the empty-km weight to 0");
  rep->add_option("--max-nnz", maxNnz, "QUBO non-zero cap");
  rep->add_option("--dataset", dataset, "Dataset label (default: instance file name)");
  rep->add_option("--out-dir", outDir, "Artifact directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* s : app.get_subcommands()) failing = s;
    err << failing->help();
    return kUsage;
  }

  auto quboOptions = [&] {
    if (!weightSpec.empty()) buildOpt.weights = detail::parseWeights(weightSpec);
    if (noKm) buildOpt.weights.km = 0;
    buildOpt.maxNonZeros = maxNnz;
    if (buildOpt.slots < 1) throw UsageError("--q must be at least 1");
  };
  auto variant = [&] {
    auto v = qubo::parseVariant(variantName);
    if (!v) throw UsageError("--variant: expected tabu, sa or exhaustive");
    return *v;
  };

  try {
    if (gen->parsed()) {
      const Instance inst = generateArtificial(gcfg);
      detail::writeFile(outPath, writeInstance(inst));
      out << "wrote " << outPath << ": " << inst.tripCount() << " trips, " << inst.trainCount() << " trains\n";
      return kOk;
    }
    if (sub->parsed()) {
      const Instance inst = subsetInstance(parseInstance(detail::readFile(inPath)), fraction, seed);
      detail::writeFile(outPath, writeInstance(inst));
      out << "wrote " << outPath << ": " << inst.tripCount() << " trips, " << inst.trainCount() << " trains\n";
      return kOk;
    }
    if (scp->parsed()) {
      const Instance inst = parseInstance(detail::readFile(inPath));
      scfg.timeLimitSeconds = timeLimit;
      scfg.nodeLimit = nodeLimit;
      scfg.slots = slots;
      const auto res = cp::branchAndBound(inst, scfg);
      if (!logPath.empty()) detail::writeFile(logPath, detail::improvementsJson(res));
      if (!res.best) throw SolveFailure("CP search found no schedule");
      const auto report = validateSchedule(inst, *res.best);
      if (!outPath.empty()) detail::writeFile(outPath, writeSchedule(inst, *res.best, &report));
      out << "cp: " << detail::summaryLine(report) << ", nodes " << res.stats.nodes << (res.stats.exhausted ? ", optimal" : ", stopped") << "\n";
      return report.clean() ? kOk : kFailed;
    }
    if (bq->parsed()) {
      quboOptions();
      const Instance inst = parseInstance(detail::readFile(inPath));
      const auto md = qubo::assembleQubo(inst, buildOpt);
      detail::writeFile(outPath, qubo::exportQubo(md.matrix));
      out << "wrote " << outPath << ": " << md.variableCount() << " variables, " << md.matrix.entries.size() << " non-zeros\n";
      return kOk;
    }
    if (sq->parsed()) {
      sp.variant = variant();
      sp.timeLimitSeconds = timeLimit;
      if (inPath.empty() == instancePath.empty()) throw UsageError("solve-qubo: give exactly one of --in and --instance");
      if (!inPath.empty()) {
        const auto matrix = qubo::parseQubo(detail::readFile(inPath));
        const auto res = qubo::solve(matrix, sp);
        detail::writeFile(outPath, writeBits(res.bits));
        out << "energy " << res.energy.toString() << (res.budgetExhausted ? " (budget exhausted)" : "") << "\n";
        return kOk;
      }
      quboOptions();
      const Instance inst = parseInstance(detail::readFile(instancePath));
      const auto run = detail::runQubo(inst, buildOpt, sp);
      if (!bitsPath.empty()) detail::writeFile(bitsPath, writeBits(run.result.bits));
      detail::writeFile(outPath, writeSchedule(inst, run.schedule, &run.report));
      out << qubo::toString(sp.variant) << ": energy " << run.result.energy.toString() << ", " << detail::summaryLine(run.report) << "\n";
      return kOk;
    }
    if (val->parsed()) {
      const Instance inst = parseInstance(detail::readFile(inPath));
      const Schedule sched = parseSchedule(inst, detail::readFile(solutionPath));
      const auto report = validateSchedule(inst, sched);
      if (!outPath.empty()) detail::writeFile(outPath, writeSchedule(inst, sched, &report));
      out << detail::summaryLine(report) << "\n";
      for (const auto& v : report.violations)
        out << "  train " << v.train << " activity " << v.activity << ": " << toString(v.kind) << ": " << v.detail << "\n";
      return report.clean() ? kOk : kFailed;
    }
    if (rep->parsed()) {
      quboOptions();
      const Instance inst = parseInstance(detail::readFile(inPath));
      if (dataset.empty()) dataset = std::filesystem::path(inPath).stem().string();
      const double budget = timeLimit.value_or(60.0);
      std::vector<std::string> methods;
      {
        std::stringstream ss(methodSpec);
        std::string m;
        while (std::getline(ss, m, ','))
          if (!m.empty()) methods.push_back(m);
      }
      if (methods.empty()) throw UsageError("--methods: nothing to run");
      for (const auto& m : methods)
        if (m != "cp" && !qubo::parseVariant(m)) throw UsageError("--methods: unknown method '" + m + "'");
      if (!(quboFraction > 0.0 && quboFraction <= 1.0)) throw UsageError("--qubo-fraction must lie in (0, 1]");

      const std::filesystem::path dir(outDir);
      std::filesystem::create_directories(dir);
      MetricsTable table;
      bool failed = false;
      auto emit = [&](const Instance& in, const std::string& label, const std::string& tag, const Schedule& s, const ValidationReport& r,
                      double solveSeconds, std::optional<double> buildSeconds, const std::string& dataLabel) {
        const auto t = computeMetrics(in, dataLabel, {{label, r, solveSeconds, buildSeconds}});
        table.rows.insert(table.rows.end(), t.rows.begin(), t.rows.end());
        detail::writeFile(dir / ("gantt_" + tag + ".svg"), renderGantt(in, s, r, dataLabel + " / " + label));
        detail::writeFile(dir / ("solution_" + tag + ".json"), writeSchedule(in, s, &r));
        out << label << ": " << detail::summaryLine(r) << "\n";
      };

      Instance quboInst = inst;
      std::string quboLabel = dataset;
      if (quboFraction < 1.0) {
        quboInst = subsetInstance(inst, quboFraction, sp.seed);
        quboLabel = dataset + "-" + std::to_string(static_cast<int>(std::lround(quboFraction * 100))) + "%";
        detail::writeFile(dir / "qubo_instance.json", writeInstance(quboInst));
      }
      for (const auto& m : methods) {
        if (m == "cp") {
          cp::SearchConfig c;
          c.timeLimitSeconds = budget;
          const auto res = cp::branchAndBound(inst, c);
          detail::writeFile(dir / "cp_improvements.json", detail::improvementsJson(res));
          if (!res.best) {
            err << "cp: no schedule found\n";
            failed = true;
            continue;
          }
          const auto firstRep = validateSchedule(inst, *res.first);
          emit(inst, "CP first", "cp_first", *res.first, firstRep, res.stats.timeToFirst, std::nullopt, dataset);
          const auto bestRep = validateSchedule(inst, *res.best);
          emit(inst, "CP improved", "cp_improved", *res.best, bestRep, res.stats.timeToBest, std::nullopt, dataset);
          failed = failed || !firstRep.clean() || !bestRep.clean();
          continue;
        }
        qubo::SolverParams p = sp;
        p.variant = *qubo::parseVariant(m);
        p.timeLimitSeconds = quboTimeLimit.value_or(budget);
        try {
          const auto run = detail::runQubo(quboInst, buildOpt, p);
          err << m << ": " << run.variables << " variables, " << run.nonZeros << " non-zeros, build " << run.buildSeconds << " s\n";
          emit(quboInst, qubo::toString(p.variant), m, run.schedule, run.report, run.result.seconds, run.buildSeconds, quboLabel);
        } catch (const qubo::QuboSizeError& e) {
          err << m << ": " << e.what() << "\n";
          failed = true;
        } catch (const std::invalid_argument& e) {
          err << m << ": " << e.what() << "\n";
          failed = true;
        }
      }
      detail::writeFile(dir / "metrics.md", renderTable(table));
      detail::writeFile(dir / "metrics.csv", renderCsv(table));
      out << renderTable(table);
      return failed ? kFailed : kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}

}  // namespace rsched::cli

#endif  // RSCHED_CLI_HPP
