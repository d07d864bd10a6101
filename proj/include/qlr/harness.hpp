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

/**
 * @file harness.hpp
 * Paired-seed experiment driver.
 *
 * Every seed fixes one stratified 80/20 split of the dataset. Each cell
 * (seed, model, N, L) draws a stratified N-row subsample of that seed's
 * training split, fits a standardizer on it, trains, and is evaluated on the
 * seed's full test split. Records are appended to records.csv as cells
 * finish, so a rerun over the same output directory skips completed cells.
 */
#pragma once

#include "qlr/common.hpp"
#include "qlr/data.hpp"
#include "qlr/hybrid.hpp"
#include "qlr/metrics.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qlr::harness {

inline constexpr const char* kVersion = "0.1.0";
/// Environment variable that overrides the configured data path.
inline constexpr const char* kDataEnv = "HTRU2_PATH";

inline constexpr std::array<const char*, 5> kKnownModels{
    "qlr-angle", "qlr-amplitude", "qlr-dr", "logreg", "qsvm"};
/// Classical models forming the delta baseline set.
inline constexpr std::array<const char*, 1> kBaselineModels{"logreg"};

bool is_qlr_model(const std::string& model);

enum class ThreadMode { Single, Parallel };

struct ExperimentConfig {
  std::vector<std::string> models{"qlr-angle", "logreg"};
  std::vector<long> train_sizes{1000};
  std::vector<int> depths{3};
  double alpha = 1.0;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string data_path;
  std::string output_dir = "results";
  ThreadMode thread_mode = ThreadMode::Single;
  /// Concurrent cells in parallel mode.
  int workers = 1;
  int iqp_repetitions = 2;
  double test_fraction = 0.2;
  bool save_models = true;
  hybrid::TrainConfig train;

  void validate() const;
  /// Flat key = value text, list values comma separated, '#' comments.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_text() const;
};

struct Cell {
  std::uint64_t seed = 0;
  std::string model;
  long n = 0;
  int depth = 0;  ///< 0 for models without a circuit depth

  std::string key() const;
  bool operator==(const Cell&) const = default;
};

/// Cells for a config: QLR models expand over depths, the others do not.
std::vector<Cell> plan_cells(const ExperimentConfig& cfg);

/// Metric columns of records.csv, in order.
inline constexpr std::array<const char*, 21> kMetricColumns{
    "pr_auc",      "roc_auc",        "recall_fpr1", "precision_fpr1",
    "fnr_fpr1",    "threshold_fpr1", "recall_fpr5", "precision",
    "recall",      "f1",             "fnr",         "fpr",
    "brier",       "ece",            "reliability", "resolution",
    "uncertainty", "binned_brier",   "brier_residual",
    "train_seconds", "predict_seconds"};

/// Metrics where a smaller value is better for delta orientation.
bool lower_is_better(const std::string& metric);

int metric_index(const std::string& metric);

struct MetricRecord {
  Cell cell;
  std::uint64_t split_checksum = 0;
  std::string status = "ok";
  std::array<double, kMetricColumns.size()> values{};
  std::vector<std::string> flags;
  std::string notes;
  /// Not serialized to records.csv; written to reliability/*.csv.
  std::vector<metrics::ReliabilityBin> reliability_bins;

  double get(const std::string& metric) const;
  void set(const std::string& metric, double value);
  bool ok() const { return status == "ok"; }
};

/// Fills every non-runtime metric from test probabilities.
MetricRecord evaluate_predictions(const Cell& cell, const VectorRef& probs,
                                  const LabelsRef& labels);

struct SplitContext {
  data::Dataset train;
  data::Dataset test;
  std::uint64_t checksum = 0;
};

SplitContext make_split(const data::Dataset& ds, std::uint64_t seed,
                        double test_fraction);

/// Trains and evaluates one cell. Errors become a record with a failed
/// status rather than propagating.
MetricRecord run_cell(const Cell& cell, const SplitContext& split,
                      const ExperimentConfig& cfg);

using ProgressFn = std::function<void(const MetricRecord&)>;

/// Runs every pending cell, appending to <output>/records.csv, then emits
/// the aggregated reports. Returns all records (previous and new).
std::vector<MetricRecord> run_config(const ExperimentConfig& cfg,
                                     const ProgressFn& progress = {});

struct MeanSe {
  double mean = 0.0;
  std::optional<double> stddev;  ///< n - 1 denominator
  std::optional<double> se;
};

MeanSe aggregate_mean_se(const std::vector<double>& values);

struct DeltaSummary {
  std::string model;
  long n = 0;
  int depth = 0;
  std::string metric;
  std::string baseline_set;
  std::vector<std::uint64_t> seeds;
  std::vector<double> deltas;
  double mean = 0.0;
  std::optional<double> stddev;
  std::optional<double> se;
};

/// Delta_s = M_model,s - best baseline M_s for every seed of `model_records`
/// (one model/N/L group). Baselines are matched on seed and N.
DeltaSummary delta_vs_best_baseline(const std::vector<MetricRecord>& model_records,
                                    const std::vector<MetricRecord>& baseline_records,
                                    const std::string& metric);

std::string records_csv(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> parse_records_csv(const std::string& text);
std::vector<MetricRecord> load_records(const std::string& path);

/// records.csv, summary.csv, delta.csv, reliability/*.csv and run_meta.json.
void emit_reports(const std::vector<MetricRecord>& records,
                  const std::string& out_dir, const ExperimentConfig& cfg);

/// Command-line entry point. Returns 0 on success, 1 on runtime failure,
/// 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace qlr::harness
