// Copyright 2026 The qlrkit Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlr/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qlr::harness {

namespace {

struct RunOptions {
  std::string config_path;
  std::string data;
  std::string output;
  std::string threads;
  int workers = 0;
  int max_epochs = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> models;
  bool dry_run = false;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--data", opts.data, "Dataset CSV (overrides config and env)");
  cmd->add_option("-o,--out", opts.output, "Output directory");
  cmd->add_option("--threads", opts.threads, "single or parallel")
      ->check(CLI::IsMember({"single", "parallel"}));
  cmd->add_option("--workers", opts.workers, "Concurrent cells in parallel mode")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-epochs", opts.max_epochs, "QLR epoch cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seeds", opts.seeds, "Seed list")->delimiter(',');
  cmd->add_option("--models", opts.models, "Model list")->delimiter(',');
  cmd->add_flag("--dry-run", opts.dry_run, "Print the planned cells and exit");
}

ExperimentConfig resolve(const RunOptions& opts) {
  auto cfg = ExperimentConfig::load(opts.config_path);
  if (const char* env = std::getenv(kDataEnv); env && *env) cfg.data_path = env;
  if (!opts.data.empty()) cfg.data_path = opts.data;
  if (!opts.output.empty()) cfg.output_dir = opts.output;
  if (!opts.threads.empty()) {
    cfg.thread_mode =
        opts.threads == "parallel" ? ThreadMode::Parallel : ThreadMode::Single;
  }
  if (opts.workers > 0) cfg.workers = opts.workers;
  if (opts.max_epochs > 0) cfg.train.max_epochs = opts.max_epochs;
  if (!opts.seeds.empty()) cfg.seeds = opts.seeds;
  if (!opts.models.empty()) cfg.models = opts.models;
  return cfg;
}

int execute(const ExperimentConfig& cfg, bool dry_run) {
  cfg.validate();
  const auto cells = plan_cells(cfg);
  if (dry_run) {
    std::cout << "cells scheduled: " << cells.size() << "\n";
    for (const auto& c : cells) std::cout << c.key() << "\n";
    return 0;
  }
  std::size_t finished = 0;
  int failures = 0;
  const auto records = run_config(cfg, [&](const MetricRecord& r) {
    ++finished;
    char line[256];
    if (r.ok()) {
      std::snprintf(line, sizeof line,
                    "[%zu/%zu] seed=%llu model=%s N=%ld L=%d pr_auc=%.4f "
                    "roc_auc=%.4f train=%.2fs predict=%.2fs",
                    finished, cells.size(),
                    static_cast<unsigned long long>(r.cell.seed),
                    r.cell.model.c_str(), r.cell.n, r.cell.depth, r.get("pr_auc"),
                    r.get("roc_auc"), r.get("train_seconds"),
                    r.get("predict_seconds"));
      std::cout << line << std::endl;
    } else {
      ++failures;
      std::cerr << "[" << finished << "/" << cells.size() << "] " << r.cell.key()
                << " failed: " << r.notes << std::endl;
    }
  });
  std::cout << "wrote " << records.size() << " records to " << cfg.output_dir
            << "\n";
  return failures > 0 ? 1 : 0;
}

ExperimentConfig config_from_meta(const std::filesystem::path& dir) {
  const auto path = dir / "run_meta.json";
  if (!std::filesystem::exists(path)) return ExperimentConfig{};
  std::ifstream in(path);
  const auto meta = nlohmann::json::parse(in, nullptr, false);
  if (meta.is_discarded() || !meta.contains("config_text")) {
    throw FormatError("run_meta.json has no config echo");
  }
  return ExperimentConfig::parse(meta["config_text"].get<std::string>());
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Quantum logistic regression experiments", "qlrkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Execute one config file");
  add_run_options(run, run_opts);

  RunOptions depth_opts;
  std::vector<int> depths{1, 2, 3, 5, 10};
  long depth_n = 0;
  auto* sweep_depth = app.add_subcommand("sweep-depth", "Sweep depth at fixed N");
  add_run_options(sweep_depth, depth_opts);
  sweep_depth->add_option("--depths", depths, "Depth list")->delimiter(',');
  sweep_depth->add_option("--n", depth_n, "Training size")->check(CLI::PositiveNumber);

  RunOptions size_opts;
  std::vector<long> sizes{200, 500, 1000};
  int size_depth = 3;
  auto* sweep_size = app.add_subcommand("sweep-size", "Sweep N at fixed depth");
  add_run_options(sweep_size, size_opts);
  sweep_size->add_option("--n", sizes, "Training sizes")->delimiter(',');
  sweep_size->add_option("--depth", size_depth, "Circuit depth")
      ->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Re-aggregate an output directory");
  report->add_option("-d,--dir", report_dir, "Output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  std::string fixture_out;
  long fixture_rows = 200;
  std::uint64_t fixture_seed = 0;
  auto* fixture = app.add_subcommand("fixture", "Write the synthetic dataset");
  fixture->add_option("-o,--out", fixture_out, "Output CSV")->required();
  fixture->add_option("--rows", fixture_rows, "Row count")->check(CLI::PositiveNumber);
  fixture->add_option("--seed", fixture_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return execute(resolve(run_opts), run_opts.dry_run);
    if (*sweep_depth) {
      auto cfg = resolve(depth_opts);
      cfg.depths = depths;
      if (depth_n > 0) cfg.train_sizes = {depth_n};
      return execute(cfg, depth_opts.dry_run);
    }
    if (*sweep_size) {
      auto cfg = resolve(size_opts);
      cfg.train_sizes = sizes;
      cfg.depths = {size_depth};
      return execute(cfg, size_opts.dry_run);
    }
    if (*report) {
      const std::filesystem::path dir(report_dir);
      auto cfg = config_from_meta(dir);
      cfg.output_dir = report_dir;
      const auto records = load_records((dir / "records.csv").string());
      emit_reports(records, report_dir, cfg);
      std::cout << "re-aggregated " << records.size() << " records\n";
      return 0;
    }
    if (*fixture) {
      const auto ds = data::make_fixture(fixture_rows, fixture_seed);
      std::ofstream out(fixture_out, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + fixture_out);
      out << data::to_csv(ds);
      if (!out) throw IoError("write failed for " + fixture_out);
      std::cout << "wrote " << ds.size() << " rows (" << ds.positives()
                << " positive) to " << fixture_out << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "qlrkit: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qlrkit: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace qlr::harness
