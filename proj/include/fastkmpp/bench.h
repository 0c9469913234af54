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

#ifndef FASTKMPP_BENCH_H_
#define FASTKMPP_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"
#include "fastkmpp/lsh.h"
#include "fastkmpp/multitree.h"
#include "fastkmpp/rejection_seeder.h"

namespace fastkmpp {

/// Seeding algorithms known to the harness.
inline constexpr const char* kAlgorithmNames[] = {"fast", "rejection",
                                                  "kmeanspp", "uniform"};

bool IsKnownAlgorithm(const std::string& name);

struct SeedingParams {
  /// Tree options shared by the fast and rejection seeders.
  MultiTreeOptions multitree;
  double c = 2.0;
  LshConfig lsh;
  bool paranoid = false;
};

/// Runs one seeder by name. `stats` receives the proposal statistics of the
/// rejection seeder and is left untouched otherwise.
std::vector<Index> RunSeeder(const std::string& algorithm, const Dataset& ds,
                             Index k, std::uint64_t seed,
                             const SeedingParams& params,
                             RejectionRunStats* stats = nullptr);

struct BenchConfig {
  std::filesystem::path data;
  CsvOptions csv;
  bool quantize = false;
  std::vector<std::string> algorithms;
  std::vector<Index> ks;
  /// Seed values; one cell per (algorithm, k, seed).
  std::vector<std::uint64_t> seeds;
  std::uint64_t global_seed = 0;
  SeedingParams seeding;
  std::filesystem::path out;
  int jobs = 1;
  bool warmup = true;
  /// Externally produced center files, one CSV of center coordinates each.
  std::vector<std::pair<std::string, std::filesystem::path>> external;
};

/// Throws InvalidArgument on empty algorithm or k lists, unknown algorithms,
/// nonpositive k, or repeated seeds.
void ValidateConfig(const BenchConfig& config);

struct CellResult {
  std::string algorithm;
  Index k = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double cost = 0.0;
  /// Seeding wall time, NaN for external rows.
  double seconds = 0.0;
  std::optional<RejectionRunStats> stats;
};

struct BenchResult {
  std::string dataset;
  Index n = 0;
  Index d = 0;
  std::optional<PreprocessReport> preprocess;
  std::vector<std::string> algorithms;  // row order of the tables
  std::vector<Index> ks;                // column order of the tables
  std::vector<CellResult> cells;

  bool all_ok() const;
};

/// Stream seed of one cell, a hash of the global seed, the algorithm name,
/// k and the seed value. Cells never share a stream.
std::uint64_t CellSeed(std::uint64_t global_seed, const std::string& algorithm,
                       Index k, std::uint64_t seed);

/// Runs every cell on an already loaded dataset. Failed cells are recorded
/// and the run goes on. Results are in (algorithm, k, seed) order whatever
/// the number of jobs.
BenchResult RunBench(const BenchConfig& config, const Dataset& ds);
/// Loads (and optionally quantizes) `config.data`, then runs the cells.
BenchResult RunBench(const BenchConfig& config);

/// A table with one row per algorithm and one column per k. Missing entries
/// hold NaN.
struct Table {
  std::string name;
  std::vector<std::string> rows;
  std::vector<Index> columns;
  std::vector<std::vector<double>> values;
};

/// Mean cost over successful seeds.
Table CostTable(const BenchResult& result);
/// Mean seeding time divided by the mean time of `fast` at the same k (or of
/// the first timed algorithm when `fast` was not run).
Table RelativeTimeTable(const BenchResult& result);
/// Unbiased sample variance of the cost over successful seeds.
Table VarianceTable(const BenchResult& result);

std::string FormatCsv(const Table& table);
std::string FormatMarkdown(const Table& table);
/// Reads back a table written by FormatCsv or FormatMarkdown.
Table ParseTable(const std::string& text);

enum class TableFormat { kCsv, kMarkdown };

/// Writes costs, reltime and variance tables in `format` (with extension
/// .csv or .md) and stats.json into `dir`, creating it if needed.
void EmitTables(const BenchResult& result, const std::filesystem::path& dir,
                TableFormat format);

std::string ResultToJson(const BenchResult& result);

}  // namespace fastkmpp

#endif  // FASTKMPP_BENCH_H_
