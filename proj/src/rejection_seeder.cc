// Copyright 2026 The fastkmpp Authors.
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

#include "fastkmpp/rejection_seeder.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "fastkmpp/baselines.h"
#include "fastkmpp/geometry.h"

namespace fastkmpp {

namespace {

LshConfig WithC(LshConfig config, double c) {
  config.c = c;
  return config;
}

std::int64_t DefaultBudget(double c, Index d, Index k) {
  const double budget = 1e6 * c * c * static_cast<double>(d) *
                        static_cast<double>(d) * static_cast<double>(k);
  return budget >= 9e18 ? std::numeric_limits<std::int64_t>::max()
                        : static_cast<std::int64_t>(budget);
}

}  // namespace

std::string StatsToJson(const RejectionRunStats& stats, int indent) {
  nlohmann::json j;
  j["proposals"] = stats.proposals;
  j["accepted"] = stats.accepted;
  j["per_round"] = stats.per_round;
  j["wall_seconds"] = stats.wall_seconds;
  j["clamp_activations"] = stats.clamp_activations;
  j["lsh_misses"] = stats.lsh_misses;
  j["max_ratio"] = stats.max_ratio;
  j["restarts"] = stats.restarts;
  return j.dump(indent);
}

RejectionSampler::RejectionSampler(const Dataset& ds, RejectionOptions options,
                                   std::uint64_t seed)
    : ds_(&ds),
      options_(options),
      mt_(MultiTree::Init(ds, DeriveSeed(seed, 1), options.multitree)),
      state_(mt_),
      index_(ds, WithC(options.lsh, options.c), DeriveSeed(seed, 3)),
      rng_(MakeRng(DeriveSeed(seed, 2))),
      budget_(options.max_proposals > 0 ? options.max_proposals : 0) {
  if (!(options.c >= 1.0)) throw InvalidArgument("c must be at least 1");
  if (options_.debug_checks) {
    last_answer_.assign(static_cast<size_t>(ds.size()),
                        std::numeric_limits<double>::infinity());
  }
}

void RejectionSampler::Open(Index x) {
  if (state_.is_open(x)) return;
  state_.Open(x);
  index_.Insert(x);
}

double RejectionSampler::NearDistance(Index x) {
  const std::optional<Neighbor> hit = index_.Query(x);
  if (hit) {
    if (options_.debug_checks && index_.mode() != LshMode::kExactOracle) {
      if (hit->dist > last_answer_[x]) {
        throw Error("index answer increased for point " + std::to_string(x));
      }
      last_answer_[x] = hit->dist;
    }
    return hit->dist;
  }
  ++stats_.lsh_misses;
  const std::span<const Index> open = state_.opened();
  double best = std::numeric_limits<double>::infinity();
  for (Index s : open) best = std::min(best, SquaredDist(ds_->point(x), ds_->point(s)));
  return std::sqrt(best);
}

Index RejectionSampler::DrawNext() {
  const Index n = ds_->size();
  if (static_cast<Index>(state_.opened().size()) >= n) {
    throw Error("all points are already open");
  }
  const std::int64_t budget =
      budget_ > 0 ? budget_ : DefaultBudget(options_.c, ds_->dim(), n);
  const double c2 = options_.c * options_.c;
  std::int64_t round = 0;
  while (true) {
    if (state_.opened().empty() || !(state_.total_weight() > 0.0)) {
      // First center, or every remaining point sits on an open one.
      ++round;
      ++stats_.proposals;
      const Index x = DrawNextCenter(state_, rng_);
      stats_.per_round.push_back(round);
      ++stats_.accepted;
      return x;
    }
    if (stats_.proposals >= budget) {
      throw ProposalBudgetExceeded(
          "proposal budget of " + std::to_string(budget) + " exhausted", stats_);
    }
    ++round;
    ++stats_.proposals;
    const Index x = state_.Sample(rng_);
    if (state_.is_open(x)) {
      throw Error("internal error: proposal " + std::to_string(x) +
                  " is already open");
    }
    const double near = NearDistance(x);
    const double ratio = near * near / (c2 * state_.weight(x));
    stats_.max_ratio = std::max(stats_.max_ratio, ratio);
    if (ratio > 1.0) {
      if (options_.debug_checks && index_.mode() == LshMode::kExactOracle &&
          ratio > 1.0 + 1e-9) {
        throw Error("acceptance ratio above 1 with the exact oracle");
      }
      ++stats_.clamp_activations;
    }
    if (UniformUnit(rng_) < std::min(1.0, ratio)) {
      stats_.per_round.push_back(round);
      ++stats_.accepted;
      return x;
    }
  }
}

Index RejectionSampler::Step() {
  const Index x = DrawNext();
  Open(x);
  return x;
}

RejectionResult RejectionSampling(const Dataset& ds, Index k,
                                  std::uint64_t seed,
                                  RejectionOptions options) {
  if (k < 1 || k > ds.size()) {
    throw InvalidArgument("k must lie in [1, n], got " + std::to_string(k));
  }
  if (!(options.c >= 1.0)) throw InvalidArgument("c must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  if (options.max_proposals <= 0) {
    options.max_proposals = DefaultBudget(options.c, ds.dim(), k);
  }
  RejectionSampler sampler(ds, options, seed);
  for (Index i = 0; i < k; ++i) sampler.Step();
  RejectionResult result;
  result.centers.assign(sampler.opened().begin(), sampler.opened().end());
  result.stats = sampler.stats();
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

int ParanoidRestarts(const Dataset& ds) {
  const double n = static_cast<double>(ds.size());
  if (n < 2) return 1;
  const double aspect = ds.aspect_ratio();
  const double r = std::log(4.0 * n * aspect * aspect) / std::log(n);
  return std::max(1, static_cast<int>(std::ceil(r)));
}

RejectionResult RejectionSamplingBestOf(const Dataset& ds, Index k,
                                        std::uint64_t seed, int restarts,
                                        RejectionOptions options) {
  if (restarts < 1) throw InvalidArgument("restarts must be positive");
  RejectionResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    RejectionResult run = RejectionSampling(
        ds, k, r == 0 ? seed : DeriveSeed(seed, 1000 + r), options);
    const double cost = ClusteringCost(ds, run.centers);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(run);
    }
  }
  best.stats.restarts = restarts;
  return best;
}

BiasReport SamplingBiasReport(const Dataset& ds, std::span<const Index> centers,
                              RejectionOptions options, Index trials,
                              std::uint64_t seed) {
  if (centers.empty()) throw InvalidArgument("the center set must be nonempty");
  if (trials < 1000) throw InvalidArgument("at least 1000 trials are required");
  const Index n = ds.size();
  std::vector<Index> counts(static_cast<size_t>(n), 0);
  for (Index t = 0; t < trials; ++t) {
    RejectionSampler sampler(ds, options, DeriveSeed(seed, t));
    for (Index s : centers) sampler.Open(s);
    ++counts[sampler.DrawNext()];
  }
  const std::vector<double> exact = D2Probabilities(ds, centers);
  BiasReport report;
  report.c = options.c;
  report.trials = trials;
  const double c2 = options.c * options.c;
  for (Index x = 0; x < n; ++x) {
    BiasRow row;
    row.id = x;
    row.exact = exact[x];
    row.empirical = static_cast<double>(counts[x]) / static_cast<double>(trials);
    const double q = std::min(0.5, c2 * row.exact);
    const double t = static_cast<double>(trials);
    const double eps = 4.0 * std::sqrt(q * (1.0 - q) / t) + 4.0 / t;
    row.lower = row.exact / c2 - eps;
    row.upper = c2 * row.exact + eps;
    row.within = row.empirical >= row.lower && row.empirical <= row.upper;
    report.all_within = report.all_within && row.within;
    report.tv_distance += 0.5 * std::abs(row.empirical - row.exact);
    report.rows.push_back(row);
  }
  return report;
}

void WriteBiasCsv(const std::filesystem::path& path, const BiasReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.precision(10);
  out << "id,exact,empirical,lower,upper,within\n";
  for (const BiasRow& row : report.rows) {
    out << row.id << ',' << row.exact << ',' << row.empirical << ','
        << row.lower << ',' << row.upper << ',' << (row.within ? 1 : 0) << '\n';
  }
  if (!out) throw Error("write to " + path.string() + " failed");
}

}  // namespace fastkmpp
