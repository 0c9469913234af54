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

#include "fastkmpp/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fastkmpp/baselines.h"
#include "fastkmpp/fast_seeder.h"

namespace fastkmpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> SplitTrimmed(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

template <typename F>
Table BuildTable(const BenchResult& result, std::string name, F&& summarize) {
  Table table;
  table.name = std::move(name);
  table.rows = result.algorithms;
  table.columns = result.ks;
  for (const std::string& algo : result.algorithms) {
    std::vector<double> row;
    for (Index k : result.ks) {
      std::vector<const CellResult*> cells;
      for (const CellResult& cell : result.cells) {
        if (cell.ok && cell.algorithm == algo && cell.k == k) cells.push_back(&cell);
      }
      row.push_back(cells.empty() ? kNaN : summarize(cells));
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

double MeanOf(const std::vector<const CellResult*>& cells, double CellResult::*f) {
  double sum = 0.0;
  for (const CellResult* c : cells) sum += c->*f;
  return sum / static_cast<double>(cells.size());
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

}  // namespace

bool IsKnownAlgorithm(const std::string& name) {
  return std::find(std::begin(kAlgorithmNames), std::end(kAlgorithmNames),
                   name) != std::end(kAlgorithmNames);
}

std::vector<Index> RunSeeder(const std::string& algorithm, const Dataset& ds,
                             Index k, std::uint64_t seed,
                             const SeedingParams& params,
                             RejectionRunStats* stats) {
  if (algorithm == "fast") {
    return FastKMeansPP(ds, k, seed, FastSeedingOptions{params.multitree});
  }
  if (algorithm == "kmeanspp") return KMeansPPExact(ds, k, seed);
  if (algorithm == "uniform") return UniformSampling(ds, k, seed);
  if (algorithm == "rejection") {
    RejectionOptions options;
    options.c = params.c;
    options.lsh = params.lsh;
    options.multitree = params.multitree;
    RejectionResult run =
        params.paranoid
            ? RejectionSamplingBestOf(ds, k, seed, ParanoidRestarts(ds), options)
            : RejectionSampling(ds, k, seed, options);
    if (stats != nullptr) *stats = run.stats;
    return std::move(run.centers);
  }
  throw InvalidArgument("unknown algorithm '" + algorithm + "'");
}

void ValidateConfig(const BenchConfig& config) {
  if (config.algorithms.empty() && config.external.empty()) {
    throw InvalidArgument("no algorithms selected");
  }
  if (config.ks.empty()) throw InvalidArgument("no k values given");
  if (config.seeds.empty()) throw InvalidArgument("no seeds given");
  for (const std::string& algo : config.algorithms) {
    if (!IsKnownAlgorithm(algo)) {
      throw InvalidArgument("unknown algorithm '" + algo + "'");
    }
  }
  for (Index k : config.ks) {
    if (k < 1) throw InvalidArgument("k values must be positive");
  }
  std::set<std::uint64_t> distinct(config.seeds.begin(), config.seeds.end());
  if (distinct.size() != config.seeds.size()) {
    throw InvalidArgument("seeds must be distinct");
  }
  if (config.jobs < 1) throw InvalidArgument("jobs must be positive");
}

bool BenchResult::all_ok() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const CellResult& c) { return c.ok; });
}

std::uint64_t CellSeed(std::uint64_t global_seed, const std::string& algorithm,
                       Index k, std::uint64_t seed) {
  std::uint64_t s = DeriveSeed(global_seed, HashString(algorithm));
  s = DeriveSeed(s, static_cast<std::uint64_t>(k));
  return DeriveSeed(s, seed);
}

BenchResult RunBench(const BenchConfig& config, const Dataset& ds) {
  ValidateConfig(config);
  BenchResult result;
  result.dataset = config.data.string();
  result.n = ds.size();
  result.d = ds.dim();
  result.algorithms = config.algorithms;
  result.ks = config.ks;

  for (const std::string& algo : config.algorithms) {
    for (Index k : config.ks) {
      for (std::uint64_t seed : config.seeds) {
        CellResult cell;
        cell.algorithm = algo;
        cell.k = k;
        cell.seed = seed;
        result.cells.push_back(std::move(cell));
      }
    }
  }

  auto run_cell = [&](CellResult& cell) {
    try {
      RejectionRunStats stats;
      const auto start = std::chrono::steady_clock::now();
      const std::vector<Index> centers =
          RunSeeder(cell.algorithm, ds, cell.k,
                    CellSeed(config.global_seed, cell.algorithm, cell.k, cell.seed),
                    config.seeding, &stats);
      cell.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      cell.cost = ClusteringCost(ds, centers);
      if (cell.algorithm == "rejection") cell.stats = stats;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  if (config.warmup && !result.cells.empty()) {
    CellResult warm = result.cells.front();
    run_cell(warm);
  }

  const int jobs = std::min<int>(config.jobs, static_cast<int>(result.cells.size()));
  if (jobs <= 1) {
    for (CellResult& cell : result.cells) run_cell(cell);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (int j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (size_t i = next++; i < result.cells.size(); i = next++) {
          run_cell(result.cells[i]);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  for (const auto& [name, path] : config.external) {
    CellResult cell;
    cell.algorithm = name;
    cell.seconds = kNaN;
    try {
      const Dataset centers = LoadCsv(path, CsvOptions{config.csv.delimiter, false});
      if (centers.dim() != ds.dim()) {
        throw InvalidArgument("center dimension does not match the dataset");
      }
      cell.k = centers.size();
      cell.cost = ClusteringCost(ds, centers.points());
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    if (std::find(result.algorithms.begin(), result.algorithms.end(), name) ==
        result.algorithms.end()) {
      result.algorithms.push_back(name);
    }
    if (cell.ok && std::find(result.ks.begin(), result.ks.end(), cell.k) ==
                       result.ks.end()) {
      result.ks.push_back(cell.k);
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

BenchResult RunBench(const BenchConfig& config) {
  ValidateConfig(config);
  Dataset ds = LoadCsv(config.data, config.csv);
  std::optional<PreprocessReport> report;
  if (config.quantize) {
    auto [quantized, rep] =
        Quantize(ds, QuantizeOptions{.seed = DeriveSeed(config.global_seed, 7)});
    ds = std::move(quantized);
    report = rep;
  }
  BenchResult result = RunBench(config, ds);
  result.preprocess = report;
  return result;
}

Table CostTable(const BenchResult& result) {
  return BuildTable(result, "costs", [](const auto& cells) {
    return MeanOf(cells, &CellResult::cost);
  });
}

Table VarianceTable(const BenchResult& result) {
  return BuildTable(result, "variance", [](const auto& cells) {
    if (cells.size() < 2) return 0.0;
    const double mean = MeanOf(cells, &CellResult::cost);
    double ss = 0.0;
    for (const CellResult* c : cells) ss += (c->cost - mean) * (c->cost - mean);
    return ss / static_cast<double>(cells.size() - 1);
  });
}

Table RelativeTimeTable(const BenchResult& result) {
  Table times = BuildTable(result, "reltime", [](const auto& cells) {
    return MeanOf(cells, &CellResult::seconds);
  });
  size_t ref = 0;
  const auto fast =
      std::find(times.rows.begin(), times.rows.end(), std::string("fast"));
  if (fast != times.rows.end()) ref = fast - times.rows.begin();
  const std::vector<double> base = times.values.empty()
                                       ? std::vector<double>{}
                                       : times.values[ref];
  for (auto& row : times.values) {
    for (size_t j = 0; j < row.size(); ++j) {
      row[j] = base[j] > 0.0 ? row[j] / base[j] : kNaN;
    }
  }
  return times;
}

std::string FormatCsv(const Table& table) {
  std::string out = "algorithm";
  for (Index k : table.columns) out += "," + std::to_string(k);
  out += "\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    out += table.rows[i];
    for (double v : table.values[i]) out += "," + FormatNumber(v);
    out += "\n";
  }
  return out;
}

std::string FormatMarkdown(const Table& table) {
  std::string out = "| algorithm |";
  std::string rule = "|---|";
  for (Index k : table.columns) {
    out += " " + std::to_string(k) + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    out += "| " + table.rows[i] + " |";
    for (double v : table.values[i]) out += " " + FormatNumber(v) + " |";
    out += "\n";
  }
  return out;
}

Table ParseTable(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    if (line.front() == '|') {
      if (line.find("---") != std::string::npos) continue;
      fields = SplitTrimmed(line.substr(1, line.rfind('|') - 1), '|');
    } else {
      fields = SplitTrimmed(line, ',');
    }
    if (fields.empty()) continue;
    if (header) {
      for (size_t j = 1; j < fields.size(); ++j) {
        table.columns.push_back(std::stoll(fields[j]));
      }
      header = false;
      continue;
    }
    if (fields.size() != table.columns.size() + 1) {
      throw InvalidArgument("table row has the wrong number of fields");
    }
    table.rows.push_back(fields[0]);
    std::vector<double> row;
    for (size_t j = 1; j < fields.size(); ++j) row.push_back(std::stod(fields[j]));
    table.values.push_back(std::move(row));
  }
  return table;
}

std::string ResultToJson(const BenchResult& result) {
  nlohmann::json j;
  j["dataset"] = result.dataset;
  j["n"] = result.n;
  j["d"] = result.d;
  if (result.preprocess) {
    j["preprocess"] = {
        {"scaling_factor", result.preprocess->scaling_factor},
        {"estimated_opt", result.preprocess->estimated_opt},
        {"clamped_duplicates", result.preprocess->clamped_duplicates},
        {"degenerate", result.preprocess->degenerate}};
  }
  j["all_ok"] = result.all_ok();
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult& cell : result.cells) {
    nlohmann::json c = {{"algorithm", cell.algorithm},
                        {"k", cell.k},
                        {"seed", cell.seed},
                        {"ok", cell.ok}};
    if (cell.ok) {
      c["cost"] = cell.cost;
      if (!std::isnan(cell.seconds)) c["seconds"] = cell.seconds;
    } else {
      c["error"] = cell.error;
    }
    if (cell.stats) c["rejection"] = nlohmann::json::parse(StatsToJson(*cell.stats));
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

void EmitTables(const BenchResult& result, const std::filesystem::path& dir,
                TableFormat format) {
  if (result.cells.empty()) throw InvalidArgument("no results to emit");
  std::filesystem::create_directories(dir);
  const bool md = format == TableFormat::kMarkdown;
  const std::string ext = md ? ".md" : ".csv";
  for (const Table& table :
       {CostTable(result), RelativeTimeTable(result), VarianceTable(result)}) {
    WriteFile(dir / (table.name + ext), md ? FormatMarkdown(table) : FormatCsv(table));
  }
  WriteFile(dir / "stats.json", ResultToJson(result) + "\n");
}

}  // namespace fastkmpp
