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

#ifndef FASTKMPP_REJECTION_SEEDER_H_
#define FASTKMPP_REJECTION_SEEDER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"
#include "fastkmpp/fast_seeder.h"
#include "fastkmpp/lsh.h"
#include "fastkmpp/multitree.h"

namespace fastkmpp {

struct RejectionOptions {
  /// Approximation factor of the nearest-neighbor index; also written into
  /// `lsh.c`.
  double c = 2.0;
  LshConfig lsh;
  MultiTreeOptions multitree;
  /// Total proposal budget. 0 selects 1e6 * c^2 * d^2 * k.
  std::int64_t max_proposals = 0;
  /// Verifies per-proposal contracts (acceptance ratio <= 1 for the exact
  /// oracle, non-increasing index answers) and throws on violation.
  bool debug_checks = false;
};

struct RejectionRunStats {
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  /// Proposals spent on each accepted center, in order.
  std::vector<std::int64_t> per_round;
  double wall_seconds = 0.0;
  /// Proposals whose raw acceptance ratio exceeded 1 and was clamped.
  std::int64_t clamp_activations = 0;
  /// Proposals for which the index returned nothing and the exact distance
  /// to the open set was used instead.
  std::int64_t lsh_misses = 0;
  /// Largest raw acceptance ratio seen (before clamping).
  double max_ratio = 0.0;
  /// Number of full runs performed (greater than 1 only for best-of runs).
  int restarts = 1;
};

std::string StatsToJson(const RejectionRunStats& stats, int indent = 2);

/// Raised when the proposal budget runs out; carries the partial stats.
class ProposalBudgetExceeded : public Error {
 public:
  ProposalBudgetExceeded(const std::string& what, RejectionRunStats stats)
      : Error(what), stats_(std::move(stats)) {}
  const RejectionRunStats& stats() const { return stats_; }

 private:
  RejectionRunStats stats_;
};

/// Incremental form of the rejection seeder. Proposals come from the
/// multi-tree D^2 distribution and are accepted with probability
/// min{1, Dist(x, Query(x))^2 / (c^2 MultiTreeDist(x, S)^2)}; the first
/// proposal is always accepted.
///
/// Centers can also be opened directly, which lets callers fix a prefix and
/// study the distribution of the next draw.
class RejectionSampler {
 public:
  RejectionSampler(const Dataset& ds, RejectionOptions options,
                   std::uint64_t seed);

  RejectionSampler(const RejectionSampler&) = delete;
  RejectionSampler& operator=(const RejectionSampler&) = delete;

  /// Adds x to S: opens it in the multi-tree and inserts it into the index.
  void Open(Index x);
  /// Runs the proposal loop until a point is accepted and returns it without
  /// opening it.
  Index DrawNext();
  /// DrawNext() followed by Open().
  Index Step();

  std::span<const Index> opened() const { return state_.opened(); }
  const RejectionRunStats& stats() const { return stats_; }
  const SeederState& state() const { return state_; }
  const LshIndex& index() const { return index_; }

 private:
  double NearDistance(Index x);

  const Dataset* ds_;
  RejectionOptions options_;
  MultiTree mt_;
  SeederState state_;
  LshIndex index_;
  Rng rng_;
  std::int64_t budget_;
  RejectionRunStats stats_;
  std::vector<double> last_answer_;  // debug: last index answer per point
};

struct RejectionResult {
  std::vector<Index> centers;
  RejectionRunStats stats;
};

/// k centers by rejection sampling, in acceptance order.
RejectionResult RejectionSampling(const Dataset& ds, Index k,
                                  std::uint64_t seed,
                                  RejectionOptions options = {});

/// Number of restarts ceil(log_n(4 n Delta^2)) used by best-of runs.
int ParanoidRestarts(const Dataset& ds);

/// Runs RejectionSampling `restarts` times with derived seeds and keeps the
/// run of lowest clustering cost. The returned stats are those of the kept
/// run, with `restarts` set.
RejectionResult RejectionSamplingBestOf(const Dataset& ds, Index k,
                                        std::uint64_t seed, int restarts,
                                        RejectionOptions options = {});

struct BiasRow {
  Index id = 0;
  double exact = 0.0;      // q_x, the exact D^2 probability
  double empirical = 0.0;  // f_x
  double lower = 0.0;      // q_x / c^2 - eps_x
  double upper = 0.0;      // c^2 q_x + eps_x
  bool within = true;
};

struct BiasReport {
  double c = 1.0;
  Index trials = 0;
  double tv_distance = 0.0;
  bool all_within = true;
  std::vector<BiasRow> rows;
};

/// Draws the next center after `centers` `trials` times, each time from a
/// freshly built sampler, and compares the empirical frequencies with the
/// exact D^2 probabilities. The margin for point x is
/// eps_x = 4 sqrt(q'(1 - q') / trials) + 4 / trials with
/// q' = min(1/2, c^2 q_x); the second term covers points whose expected
/// count is well below one, where the normal approximation fails.
/// Requires a nonempty center set and at least 1000 trials.
BiasReport SamplingBiasReport(const Dataset& ds, std::span<const Index> centers,
                              RejectionOptions options, Index trials,
                              std::uint64_t seed);

void WriteBiasCsv(const std::filesystem::path& path, const BiasReport& report);

}  // namespace fastkmpp

#endif  // FASTKMPP_REJECTION_SEEDER_H_
