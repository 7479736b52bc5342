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

#ifndef RSCHED_QUBO_SOLVE_HPP
#define RSCHED_QUBO_SOLVE_HPP

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rsched/fixed.hpp"
#include "rsched/qubo/model.hpp"

namespace rsched::qubo {

/// Symmetric neighbour lists of an upper-triangular matrix.
class Adjacency {
 public:
  explicit Adjacency(const QuboMatrix& m) : diag_(static_cast<std::size_t>(m.variables)), start_(static_cast<std::size_t>(m.variables) + 1, 0) {
    for (const QuboEntry& e : m.entries) {
      if (e.i == e.j) {
        diag_[static_cast<std::size_t>(e.i)] += e.value;
      } else {
        ++start_[static_cast<std::size_t>(e.i) + 1];
        ++start_[static_cast<std::size_t>(e.j) + 1];
      }
    }
    for (std::size_t k = 1; k < start_.size(); ++k) start_[k] += start_[k - 1];
    other_.resize(start_.back());
    value_.resize(start_.back());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (const QuboEntry& e : m.entries) {
      if (e.i == e.j) continue;
      auto put = [&](int from, int to) {
        const std::size_t at = fill[static_cast<std::size_t>(from)]++;
        other_[at] = to;
        value_[at] = e.value;
      };
      put(e.i, e.j);
      put(e.j, e.i);
    }
  }

  int size() const { return static_cast<int>(diag_.size()); }
  Coeff diagonal(int k) const { return diag_[static_cast<std::size_t>(k)]; }
  template <class F>
  void forEachNeighbour(int k, F&& f) const {
    for (std::size_t p = start_[static_cast<std::size_t>(k)]; p < start_[static_cast<std::size_t>(k) + 1]; ++p) f(other_[p], value_[p]);
  }

 private:
  std::vector<Coeff> diag_;
  std::vector<std::size_t> start_;
  std::vector<int> other_;
  std::vector<Coeff> value_;
};

/// Bit vector with its exact energy and local fields
/// h_k = Q_kk + sum_{j != k} Q_kj x_j, so flipping k changes the energy by
/// (1 - 2 x_k) h_k.
class IncrementalEnergy {
 public:
  IncrementalEnergy(const Adjacency& adj, Energy offset)
      : adj_(&adj), x_(static_cast<std::size_t>(adj.size()), 0), h_(static_cast<std::size_t>(adj.size())), energy_(offset) {
    for (int k = 0; k < adj.size(); ++k) h_[static_cast<std::size_t>(k)] = toEnergy(adj.diagonal(k));
  }

  const Bits& bits() const { return x_; }
  Energy energy() const { return energy_; }
  Energy delta(int k) const { return x_[static_cast<std::size_t>(k)] ? -h_[static_cast<std::size_t>(k)] : h_[static_cast<std::size_t>(k)]; }

  void flip(int k) {
    const bool on = !x_[static_cast<std::size_t>(k)];
    energy_ += delta(k);
    x_[static_cast<std::size_t>(k)] = on ? 1 : 0;
    adj_->forEachNeighbour(k, [&](int j, Coeff c) {
      if (on) h_[static_cast<std::size_t>(j)] += toEnergy(c);
      else h_[static_cast<std::size_t>(j)] -= toEnergy(c);
    });
  }

  void assign(const Bits& target) {
    for (int k = 0; k < adj_->size(); ++k)
      if (x_[static_cast<std::size_t>(k)] != target[static_cast<std::size_t>(k)]) flip(k);
  }

 private:
  const Adjacency* adj_;
  Bits x_;
  std::vector<Energy> h_;
  Energy energy_;
};

enum class Variant { Tabu, Annealing, Exhaustive };

inline const char* toString(Variant v) {
  switch (v) {
    case Variant::Tabu: return "tabu";
    case Variant::Annealing: return "sa";
    case Variant::Exhaustive: return "exhaustive";
  }
  return "?";
}

inline std::optional<Variant> parseVariant(const std::string& s) {
  if (s == "tabu") return Variant::Tabu;
  if (s == "sa" || s == "annealing") return Variant::Annealing;
  if (s == "exhaustive") return Variant::Exhaustive;
  return std::nullopt;
}

/// Defaults are not taken from any published configuration.
struct SolverParams {
  Variant variant = Variant::Tabu;
  std::optional<double> timeLimitSeconds;
  /// Tabu: moves per restart; annealing: sweeps over all variables.
  std::int64_t iterations = 0;  // 0 = automatic
  /// Tabu: restart after this many moves without improving the restart's best.
  std::int64_t stallLimit = 0;  // 0 = automatic
  int tenure = 0;               // 0 = 10 + ceil(sqrt(variables))
  int restarts = 10;
  double initialTemperature = 0;  // 0 = automatic
  double finalTemperature = 0;    // 0 = automatic
  std::uint64_t seed = 1;
  int workers = 1;
  /// Best-energy trace granularity, in moves or sweeps.
  std::int64_t traceEvery = 1000;
};

struct TracePoint {
  std::int64_t step = 0;
  Energy best;
};

struct SolveResult {
  Bits bits;
  Energy energy;
  std::vector<TracePoint> trace;
  bool budgetExhausted = false;
  std::int64_t moves = 0;
  int worker = 0;
  double seconds = 0;
};

namespace detail {

class Budget {
 public:
  explicit Budget(std::optional<double> limit) : limit_(limit), start_(std::chrono::steady_clock::now()) {}
  bool over() {
    if (!limit_) return false;
    if ((++calls_ & 63) != 0) return hit_;
    hit_ = hit_ || elapsed() >= *limit_;
    return hit_;
  }
  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  bool hit() const { return hit_; }

 private:
  std::optional<double> limit_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t calls_ = 0;
  bool hit_ = false;
};

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double maxAbsCoefficient(const QuboMatrix& m) {
  double best = 0;
  for (const QuboEntry& e : m.entries) best = std::max(best, std::abs(e.value.toDouble()));
  return best;
}

}  // namespace detail

/// Single-flip tabu search with aspiration and random restarts.
inline SolveResult tabuSearch(const QuboMatrix& m, const SolverParams& params) {
  const int n = m.variables;
  SolveResult res;
  res.bits.assign(static_cast<std::size_t>(n), 0);
  res.energy = m.offset;
  if (n == 0) return res;
  const Adjacency adj(m);
  detail::Budget budget(params.timeLimitSeconds);
  std::mt19937_64 rng(params.seed);
  const int tenure = params.tenure > 0 ? params.tenure : 10 + static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::int64_t iterations = params.iterations > 0 ? params.iterations : std::max<std::int64_t>(2000, 20LL * n);
  const std::int64_t stall = params.stallLimit > 0 ? params.stallLimit : std::max<std::int64_t>(500, 2LL * n);

  IncrementalEnergy state(adj, m.offset);
  res.bits = state.bits();
  res.energy = state.energy();
  std::vector<std::int64_t> tabuUntil(static_cast<std::size_t>(n), 0);
  std::int64_t step = 0;
  const int restarts = std::max(1, params.restarts);
  for (int r = 0; r < restarts && !budget.hit(); ++r) {
    if (r > 0) {
      Bits start(static_cast<std::size_t>(n));
      for (auto& b : start) b = static_cast<std::uint8_t>(rng() & 1U);
      state.assign(start);
    }
    std::fill(tabuUntil.begin(), tabuUntil.end(), 0);
    Energy restartBest = state.energy();
    std::int64_t sinceImprove = 0;
    for (std::int64_t it = 0; it < iterations && sinceImprove < stall; ++it) {
      if (budget.over()) break;
      ++step;
      int pick = -1;
      Energy pickDelta;
      int ties = 0;
      for (int k = 0; k < n; ++k) {
        const Energy d = state.delta(k);
        const bool aspirate = state.energy() + d < res.energy;
        if (tabuUntil[static_cast<std::size_t>(k)] > step && !aspirate) continue;
        if (pick < 0 || d < pickDelta) {
          pick = k;
          pickDelta = d;
          ties = 1;
        } else if (d == pickDelta && std::uniform_int_distribution<int>(0, ties++)(rng) == 0) {
          pick = k;
        }
      }
      if (pick < 0) break;
      state.flip(pick);
      tabuUntil[static_cast<std::size_t>(pick)] = step + tenure;
      if (state.energy() < restartBest) {
        restartBest = state.energy();
        sinceImprove = 0;
      } else {
        ++sinceImprove;
      }
      if (state.energy() < res.energy) {
        res.energy = state.energy();
        res.bits = state.bits();
      }
      if (params.traceEvery > 0 && step % params.traceEvery == 0) res.trace.push_back({step, res.energy});
    }
  }
  res.moves = step;
  res.budgetExhausted = budget.hit();
  res.trace.push_back({step, res.energy});
  res.seconds = budget.elapsed();
  return res;
}

/// Metropolis single-flip annealing with geometric cooling; keeps the best
/// state seen.
inline SolveResult simulatedAnnealing(const QuboMatrix& m, const SolverParams& params) {
  const int n = m.variables;
  SolveResult res;
  res.bits.assign(static_cast<std::size_t>(n), 0);
  res.energy = m.offset;
  if (n == 0) return res;
  const Adjacency adj(m);
  detail::Budget budget(params.timeLimitSeconds);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> var(0, n - 1);
  const double scale = std::max(1.0, detail::maxAbsCoefficient(m));
  const double t0 = params.initialTemperature > 0 ? params.initialTemperature : scale;
  const double t1 = params.finalTemperature > 0 ? params.finalTemperature : (params.initialTemperature < 0 ? 0.0 : scale * 1e-4);
  const std::int64_t sweeps = params.iterations > 0 ? params.iterations : 1000;
  const int restarts = std::max(1, params.restarts);

  IncrementalEnergy state(adj, m.offset);
  std::int64_t step = 0;
  for (int r = 0; r < restarts && !budget.hit(); ++r) {
    if (r > 0) {
      Bits start(static_cast<std::size_t>(n));
      for (auto& b : start) b = static_cast<std::uint8_t>(rng() & 1U);
      state.assign(start);
    }
    for (std::int64_t s = 0; s < sweeps && !budget.hit(); ++s) {
      const double frac = sweeps > 1 ? static_cast<double>(s) / static_cast<double>(sweeps - 1) : 1.0;
      const double temp = t1 > 0 ? t0 * std::pow(t1 / t0, frac) : (s + 1 == sweeps ? 0.0 : t0 * std::pow(1e-4, frac));
      for (int k = 0; k < n; ++k) {
        if (budget.over()) break;
        ++step;
        const int v = var(rng);
        const Energy d = state.delta(v);
        bool accept = d < Energy{};
        if (!accept && temp > 0) accept = unit(rng) < std::exp(-d.toDouble() / temp);
        if (accept) state.flip(v);
        if (state.energy() < res.energy) {
          res.energy = state.energy();
          res.bits = state.bits();
        }
      }
      if (params.traceEvery > 0 && (s + 1) % params.traceEvery == 0) res.trace.push_back({s + 1, res.energy});
    }
    // Finish with a greedy descent so the result is a local minimum.
    bool improved = true;
    while (improved && !budget.hit()) {
      improved = false;
      for (int k = 0; k < n; ++k)
        if (state.delta(k) < Energy{}) {
          state.flip(k);
          improved = true;
        }
      if (state.energy() < res.energy) {
        res.energy = state.energy();
        res.bits = state.bits();
      }
    }
  }
  res.moves = step;
  res.budgetExhausted = budget.hit();
  res.trace.push_back({sweeps * restarts, res.energy});
  res.seconds = budget.elapsed();
  return res;
}

inline constexpr int kExhaustiveCap = 24;

/// Exact minimum by Gray-code enumeration. Among equal energies the vector
/// with the smallest value sum_k x_k 2^k wins, so [1,0] beats [0,1].
inline SolveResult exhaustiveSolve(const QuboMatrix& m) {
  const int n = m.variables;
  if (n > kExhaustiveCap) throw std::invalid_argument("exhaustiveSolve: " + std::to_string(n) + " variables exceed the cap of " + std::to_string(kExhaustiveCap));
  const Adjacency adj(m);
  IncrementalEnergy state(adj, m.offset);
  SolveResult res;
  res.bits = state.bits();
  res.energy = state.energy();
  std::uint32_t code = 0;
  std::uint32_t bestCode = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const int k = std::countr_zero(g);
    state.flip(k);
    code ^= 1U << k;
    if (state.energy() < res.energy || (state.energy() == res.energy && code < bestCode)) {
      res.energy = state.energy();
      bestCode = code;
    }
  }
  for (int k = 0; k < n; ++k) res.bits[static_cast<std::size_t>(k)] = (bestCode >> k) & 1U;
  res.moves = static_cast<std::int64_t>(total);
  res.trace.push_back({res.moves, res.energy});
  return res;
}

/// Runs params.workers independent searches with derived seeds and keeps the
/// lowest energy (ties: lowest worker index).
inline SolveResult solve(const QuboMatrix& m, const SolverParams& params) {
  if (params.variant == Variant::Exhaustive) return exhaustiveSolve(m);
  const int workers = std::max(1, params.workers);
  auto run = [&](int w) {
    SolverParams p = params;
    p.seed = workers == 1 ? params.seed : detail::splitmix(params.seed + static_cast<std::uint64_t>(w));
    SolveResult r = params.variant == Variant::Tabu ? tabuSearch(m, p) : simulatedAnnealing(m, p);
    r.worker = w;
    return r;
  };
  if (workers == 1) return run(0);
  std::vector<SolveResult> results(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back([&, w] { results[static_cast<std::size_t>(w)] = run(w); });
  for (auto& t : threads) t.join();
  std::size_t best = 0;
  for (std::size_t w = 1; w < results.size(); ++w)
    if (results[w].energy < results[best].energy) best = w;
  return results[best];
}

}  // namespace rsched::qubo

#endif  // RSCHED_QUBO_SOLVE_HPP
