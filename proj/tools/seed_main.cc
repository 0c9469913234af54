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

// Command-line front end: `seed run` benchmarks seeders on a CSV dataset and
// `seed bias` measures the sampling bias of the rejection seeder.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastkmpp/bench.h"
#include "fastkmpp/rejection_seeder.h"

namespace {

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fastkmpp;
  CLI::App app{"k-means++ seeding benchmarks"};
  app.require_subcommand(1);

  BenchConfig config;
  std::string data;
  std::string algos = "fast,rejection,kmeanspp,uniform";
  std::string ks = "100,500,1000";
  int num_seeds = 5;
  std::string lsh_mode = "practical";
  std::string out_dir = "bench_out";
  std::string format = "csv";
  std::string delimiter = ",";
  std::vector<std::string> external;

  CLI::App* run = app.add_subcommand("run", "run every (algorithm, k, seed) cell");
  run->add_option("--data", data, "input CSV, one point per row")->required();
  run->add_option("--algo", algos, "comma-separated subset of fast,rejection,kmeanspp,uniform");
  run->add_option("--k", ks, "comma-separated k values");
  run->add_option("--seeds", num_seeds, "number of seeds per cell")->check(CLI::PositiveNumber);
  run->add_option("--c", config.seeding.c, "approximation factor of the NN index")->check(CLI::Range(1.0, 1e9));
  run->add_option("--lsh", lsh_mode, "exact-oracle, theoretical or practical");
  run->add_option("--lsh-m", config.seeding.lsh.m_override, "hashes per table");
  run->add_option("--lsh-tables", config.seeding.lsh.ell_override, "number of tables");
  run->add_option("--lsh-width", config.seeding.lsh.practical_bucket_width, "bucket width r of the practical profile");
  run->add_option("--lsh-radius", config.seeding.lsh.practical_radius, "radius R of the practical profile");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--quantize", config.quantize, "round coordinates to the data-dependent grid first");
  run->add_flag("--header", config.csv.skip_header, "skip the first CSV line");
  run->add_option("--delimiter", delimiter, "CSV field separator");
  run->add_option("--jobs", config.jobs, "cells run in parallel")->check(CLI::PositiveNumber);
  run->add_flag("--independent-shifts", config.seeding.multitree.tree.independent_shifts,
                "shift each coordinate independently in the tree embeddings");
  run->add_flag("--paranoid", config.seeding.paranoid, "best-of restarts for the rejection seeder");
  run->add_option("--seed", config.global_seed, "global seed");
  run->add_option("--format", format, "table format: csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  run->add_option("--external", external, "NAME=PATH of externally produced centers");

  std::string centers_text;
  double bias_c = 2.0;
  Index trials = 100000;
  std::string bias_out = "bias.csv";
  std::string bias_lsh = "practical";
  std::uint64_t bias_seed = 0;
  CLI::App* bias = app.add_subcommand("bias", "compare next-center frequencies with exact D^2");
  bias->add_option("--data", data, "input CSV")->required();
  bias->add_option("--centers", centers_text, "comma-separated indices of the fixed centers")->required();
  bias->add_option("--c", bias_c, "approximation factor");
  bias->add_option("--lsh", bias_lsh, "exact-oracle, theoretical or practical");
  bias->add_option("--trials", trials, "number of draws (>= 1000)");
  bias->add_option("--out", bias_out, "output CSV");
  bias->add_flag("--header", config.csv.skip_header, "skip the first CSV line");
  bias->add_option("--seed", bias_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (delimiter.size() != 1) throw InvalidArgument("delimiter must be one character");
    config.csv.delimiter = delimiter[0];
    if (run->parsed()) {
      config.data = data;
      config.algorithms = SplitList(algos);
      for (const std::string& k : SplitList(ks)) config.ks.push_back(std::stoll(k));
      for (int s = 0; s < num_seeds; ++s) config.seeds.push_back(s);
      config.seeding.lsh.mode = ParseLshMode(lsh_mode);
      config.out = out_dir;
      for (const std::string& item : external) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw InvalidArgument("--external expects NAME=PATH, got '" + item + "'");
        }
        config.external.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      }
      const BenchResult result = RunBench(config);
      EmitTables(result, config.out, TableFormat::kCsv);
      if (format == "markdown") EmitTables(result, config.out, TableFormat::kMarkdown);
      std::cout << FormatMarkdown(CostTable(result)) << "\n"
                << FormatMarkdown(RelativeTimeTable(result));
      for (const CellResult& cell : result.cells) {
        if (!cell.ok) {
          std::cerr << "cell " << cell.algorithm << " k=" << cell.k
                    << " seed=" << cell.seed << " failed: " << cell.error << "\n";
        }
      }
      return result.all_ok() ? 0 : 1;
    }
    const Dataset ds = LoadCsv(data, config.csv);
    std::vector<Index> centers;
    for (const std::string& s : SplitList(centers_text)) centers.push_back(std::stoll(s));
    RejectionOptions options;
    options.c = bias_c;
    options.lsh.mode = ParseLshMode(bias_lsh);
    const BiasReport report = SamplingBiasReport(ds, centers, options, trials, bias_seed);
    WriteBiasCsv(bias_out, report);
    std::cout << "tv_distance " << report.tv_distance << "\nall_within "
              << (report.all_within ? "yes" : "no") << "\n";
    return report.all_within ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
