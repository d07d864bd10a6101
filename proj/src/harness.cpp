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

#include "qlr/baselines.hpp"
#include "qlr/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

namespace qlr::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos
                                              ? std::string_view::npos
                                              : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + what);
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, const std::string& what) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_number<T>(item, what));
  }
  return out;
}

bool parse_bool(std::string_view text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + what);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = ",") {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << sep;
    out << values[i];
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string());
  }
}

auto cell_order(const Cell& c) { return std::tie(c.seed, c.n, c.model, c.depth); }

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

circuits::Encoding encoding_of(const std::string& model) {
  if (model == "qlr-angle") return circuits::Encoding::Angle;
  if (model == "qlr-amplitude") return circuits::Encoding::Amplitude;
  if (model == "qlr-dr") return circuits::Encoding::Reupload;
  throw ConfigError("not a QLR model: " + model);
}

std::string file_stem(const Cell& c) {
  return c.model + "_N" + std::to_string(c.n) + "_L" + std::to_string(c.depth) +
         "_seed" + std::to_string(c.seed);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h{"seed", "model", "n", "depth", "split_checksum",
                               "status"};
    for (const char* m : kMetricColumns) h.emplace_back(m);
    h.emplace_back("flags");
    h.emplace_back("notes");
    return h;
  }();
  return header;
}

std::string record_row(const MetricRecord& r) {
  std::ostringstream out;
  out << r.cell.seed << ',' << r.cell.model << ',' << r.cell.n << ','
      << r.cell.depth << ',' << hex64(r.split_checksum) << ','
      << sanitize(r.status);
  for (double v : r.values) out << ',' << fmt(v);
  out << ',' << sanitize(join(r.flags, "|")) << ',' << sanitize(r.notes) << '\n';
  return out.str();
}

/// Metrics reported in delta.csv.
const std::vector<std::string>& delta_metrics() {
  static const std::vector<std::string> names{
      "pr_auc",    "roc_auc", "recall_fpr1", "precision_fpr1", "fnr_fpr1",
      "recall_fpr5", "precision", "recall",  "f1",             "fnr",
      "fpr",       "brier",   "ece",         "reliability",    "resolution",
      "train_seconds", "predict_seconds"};
  return names;
}

bool is_baseline(const std::string& model) {
  return std::find(kBaselineModels.begin(), kBaselineModels.end(), model) !=
         kBaselineModels.end();
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

bool is_qlr_model(const std::string& model) {
  return model == "qlr-angle" || model == "qlr-amplitude" || model == "qlr-dr";
}

// -- Config -------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (models.empty()) throw ConfigError("models must not be empty");
  std::set<std::string> seen;
  for (const auto& m : models) {
    if (std::find(kKnownModels.begin(), kKnownModels.end(), m) ==
        kKnownModels.end()) {
      throw ConfigError("unknown model '" + m + "'");
    }
    if (!seen.insert(m).second) throw ConfigError("duplicate model '" + m + "'");
  }
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (train_sizes.empty()) throw ConfigError("n must not be empty");
  for (long n : train_sizes) {
    if (n <= 0) throw ConfigError("n values must be positive");
  }
  if (depths.empty()) throw ConfigError("depth must not be empty");
  for (int l : depths) {
    if (l <= 0) throw ConfigError("depth values must be positive");
  }
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (iqp_repetitions < 1) throw ConfigError("iqp_reps must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  train.validate();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "models") {
      cfg.models.clear();
      for (auto& m : split(value, ',')) {
        if (!m.empty()) cfg.models.push_back(m);
      }
    } else if (key == "n") {
      cfg.train_sizes = parse_list<long>(value, key);
    } else if (key == "depth") {
      cfg.depths = parse_list<int>(value, key);
    } else if (key == "alpha") {
      cfg.alpha = parse_number<double>(value, key);
    } else if (key == "seeds") {
      cfg.seeds = parse_list<std::uint64_t>(value, key);
    } else if (key == "data") {
      cfg.data_path = std::string(value);
    } else if (key == "output") {
      cfg.output_dir = std::string(value);
    } else if (key == "threads") {
      if (value == "single") {
        cfg.thread_mode = ThreadMode::Single;
      } else if (value == "parallel") {
        cfg.thread_mode = ThreadMode::Parallel;
      } else {
        throw ConfigError("threads must be 'single' or 'parallel'");
      }
    } else if (key == "workers") {
      cfg.workers = parse_number<int>(value, key);
    } else if (key == "iqp_reps") {
      cfg.iqp_repetitions = parse_number<int>(value, key);
    } else if (key == "test_fraction") {
      cfg.test_fraction = parse_number<double>(value, key);
    } else if (key == "save_models") {
      cfg.save_models = parse_bool(value, key);
    } else if (key == "learning_rate") {
      cfg.train.learning_rate = parse_number<double>(value, key);
    } else if (key == "batch_size") {
      cfg.train.batch_size = parse_number<int>(value, key);
    } else if (key == "patience") {
      cfg.train.patience = parse_number<int>(value, key);
    } else if (key == "max_epochs") {
      cfg.train.max_epochs = parse_number<int>(value, key);
    } else if (key == "validation_fraction") {
      cfg.train.validation_fraction = parse_number<double>(value, key);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return parse(read_file(path));
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "models = " << join(models) << '\n'
      << "n = " << join(train_sizes) << '\n'
      << "depth = " << join(depths) << '\n'
      << "alpha = " << fmt(alpha) << '\n'
      << "seeds = " << join(seeds) << '\n';
  if (!data_path.empty()) out << "data = " << data_path << '\n';
  out << "output = " << output_dir << '\n'
      << "threads = " << (thread_mode == ThreadMode::Single ? "single" : "parallel")
      << '\n'
      << "workers = " << workers << '\n'
      << "iqp_reps = " << iqp_repetitions << '\n'
      << "test_fraction = " << fmt(test_fraction) << '\n'
      << "save_models = " << (save_models ? "true" : "false") << '\n'
      << "learning_rate = " << fmt(train.learning_rate) << '\n'
      << "batch_size = " << train.batch_size << '\n'
      << "patience = " << train.patience << '\n'
      << "max_epochs = " << train.max_epochs << '\n'
      << "validation_fraction = " << fmt(train.validation_fraction) << '\n';
  return out.str();
}

// -- Cells and records ---------------------------------------------------------

std::string Cell::key() const {
  return std::to_string(seed) + "|" + model + "|" + std::to_string(n) + "|" +
         std::to_string(depth);
}

std::vector<Cell> plan_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (auto seed : cfg.seeds) {
    for (long n : cfg.train_sizes) {
      for (const auto& model : cfg.models) {
        if (is_qlr_model(model)) {
          for (int depth : cfg.depths) cells.push_back({seed, model, n, depth});
        } else {
          cells.push_back({seed, model, n, 0});
        }
      }
    }
  }
  return cells;
}

bool lower_is_better(const std::string& metric) {
  static const std::set<std::string> lower{
      "brier", "ece", "fnr", "fpr", "fnr_fpr1", "reliability",
      "binned_brier", "train_seconds", "predict_seconds"};
  return lower.count(metric) > 0;
}

int metric_index(const std::string& metric) {
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i) {
    if (metric == kMetricColumns[i]) return static_cast<int>(i);
  }
  throw ConfigError("unknown metric '" + metric + "'");
}

double MetricRecord::get(const std::string& metric) const {
  return values[metric_index(metric)];
}

void MetricRecord::set(const std::string& metric, double value) {
  values[metric_index(metric)] = value;
}

MetricRecord evaluate_predictions(const Cell& cell, const VectorRef& probs,
                                  const LabelsRef& labels) {
  MetricRecord r;
  r.cell = cell;
  r.values.fill(kNaN);

  const auto counts = metrics::confusion_counts(probs, labels, 0.5);
  const auto tm = metrics::threshold_metrics(counts);
  r.set("precision", tm.precision);
  r.set("recall", tm.recall);
  r.set("f1", tm.f1);
  r.set("fnr", tm.fnr);
  r.set("fpr", tm.fpr);
  if (tm.no_predicted_positives) r.flags.emplace_back("no_predicted_positives");
  if (tm.no_actual_positives) r.flags.emplace_back("no_actual_positives");
  if (tm.no_actual_negatives) r.flags.emplace_back("no_actual_negatives");

  const bool both_classes = !tm.no_actual_positives && !tm.no_actual_negatives;
  if (both_classes) {
    r.set("pr_auc", metrics::average_precision(probs, labels));
    r.set("roc_auc", metrics::roc_auc(probs, labels));
    const auto op1 = metrics::recall_at_fpr(probs, labels, 0.01);
    r.set("recall_fpr1", op1.recall);
    r.set("precision_fpr1", op1.precision);
    r.set("fnr_fpr1", op1.fnr);
    r.set("threshold_fpr1", op1.threshold);
    if (op1.sentinel) r.flags.emplace_back("fpr1_sentinel");
    const auto op5 = metrics::recall_at_fpr(probs, labels, 0.05);
    r.set("recall_fpr5", op5.recall);
    if (op5.sentinel) r.flags.emplace_back("fpr5_sentinel");
  }

  r.set("brier", metrics::brier(probs, labels));
  r.set("ece", metrics::ece(probs, labels));
  const auto murphy = metrics::murphy_decomposition(probs, labels);
  r.set("reliability", murphy.reliability);
  r.set("resolution", murphy.resolution);
  r.set("uncertainty", murphy.uncertainty);
  r.set("binned_brier", murphy.binned_brier);
  r.set("brier_residual", murphy.residual);
  r.reliability_bins = metrics::reliability_curve(probs, labels);
  return r;
}

SplitContext make_split(const data::Dataset& ds, std::uint64_t seed,
                        double test_fraction) {
  auto [train, test] = data::stratified_split(ds, test_fraction, seed);
  SplitContext ctx{std::move(train), std::move(test), 0};
  ctx.checksum = data::membership_checksum(ctx.train.ids);
  return ctx;
}

MetricRecord run_cell(const Cell& cell, const SplitContext& split,
                      const ExperimentConfig& cfg) {
  try {
    const auto sub = data::stratified_subsample(split.train, cell.n, cell.seed);
    const auto scaler = data::fit_standardizer(sub.features);
    const Matrix train_x = scaler.apply(sub.features);
    const Matrix test_x = scaler.apply(split.test.features);

    Vector probs;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    std::string notes;

    if (is_qlr_model(cell.model)) {
      auto tc = cfg.train;
      tc.seed = cell.seed;
      tc.threads = 1;
      const auto variant =
          circuits::EncodingVariant::make(encoding_of(cell.model), cfg.alpha);
      const auto start = Clock::now();
      auto result = hybrid::fit(train_x, sub.labels, tc, variant, cell.depth);
      train_seconds = seconds_since(start);
      const auto pstart = Clock::now();
      probs = hybrid::predict_proba(result.model, test_x, 1);
      predict_seconds = seconds_since(pstart);
      notes = "epochs=" + std::to_string(result.history.epochs()) +
              ";best_epoch=" + std::to_string(result.history.best_epoch);
      if (cfg.save_models) {
        const fs::path dir = fs::path(cfg.output_dir) / "models";
        ensure_dir(dir);
        hybrid::save_model(result.model, (dir / (file_stem(cell) + ".json")).string());
      }
    } else if (cell.model == "logreg") {
      const auto start = Clock::now();
      const auto cv = baselines::cv_select_C(train_x, sub.labels, cell.seed);
      train_seconds = seconds_since(start);
      const auto pstart = Clock::now();
      probs = cv.model.predict_proba(test_x);
      predict_seconds = seconds_since(pstart);
      notes = "C=" + fmt(cv.best_C) + ";iterations=" +
              std::to_string(cv.model.iterations);
    } else if (cell.model == "qsvm") {
      const auto res = baselines::qsvm_fit_predict(
          train_x, sub.labels, test_x, cfg.iqp_repetitions, cell.seed, 1);
      probs = res.test_probabilities;
      train_seconds = res.train_seconds;
      predict_seconds = res.predict_seconds;
      notes = "min_eigenvalue=" + fmt(res.min_eigenvalue_before) +
              ";projected=" + (res.projected ? "1" : "0") +
              ";platt_A=" + fmt(res.platt.A) + ";platt_B=" + fmt(res.platt.B);
    } else {
      throw ConfigError("unknown model '" + cell.model + "'");
    }

    if (!probs.allFinite()) throw NumericError("non-finite test probabilities");
    auto record = evaluate_predictions(cell, probs, split.test.labels);
    record.split_checksum = split.checksum;
    record.set("train_seconds", train_seconds);
    record.set("predict_seconds", predict_seconds);
    record.notes = notes;
    return record;
  } catch (const Error& e) {
    MetricRecord failed;
    failed.cell = cell;
    failed.split_checksum = split.checksum;
    failed.values.fill(kNaN);
    failed.status = "failed";
    failed.notes = e.what();
    return failed;
  }
}

std::vector<MetricRecord> run_config(const ExperimentConfig& cfg,
                                     const ProgressFn& progress) {
  cfg.validate();
  if (cfg.data_path.empty()) throw ConfigError("no data path configured");
  const auto dataset = data::load_htru2(cfg.data_path);

  const fs::path out_dir(cfg.output_dir);
  ensure_dir(out_dir);
  const fs::path records_path = out_dir / "records.csv";

  // Successful records from an earlier run are kept; failed ones are retried.
  std::vector<MetricRecord> records;
  std::set<std::string> done;
  if (fs::exists(records_path)) {
    for (auto& r : load_records(records_path.string())) {
      if (!r.ok()) continue;
      done.insert(r.cell.key());
      records.push_back(std::move(r));
    }
  }
  {
    std::string text = records_csv(records);
    write_file(records_path, text);
  }

  std::vector<Cell> pending;
  for (auto& cell : plan_cells(cfg)) {
    if (!done.count(cell.key())) pending.push_back(std::move(cell));
  }

  std::map<std::uint64_t, SplitContext> splits;
  for (const auto& cell : pending) {
    if (!splits.count(cell.seed)) {
      splits.emplace(cell.seed, make_split(dataset, cell.seed, cfg.test_fraction));
    }
  }

  std::mutex write_mutex;
  std::ofstream append(records_path, std::ios::binary | std::ios::app);
  if (!append) throw IoError("cannot append to " + records_path.string());
  const int workers = cfg.thread_mode == ThreadMode::Parallel ? cfg.workers : 1;

  std::vector<MetricRecord> fresh(pending.size());
  parallel_for(pending.size(), workers, [&](std::size_t i) {
    auto record = run_cell(pending[i], splits.at(pending[i].seed), cfg);
    std::lock_guard<std::mutex> lock(write_mutex);
    append << record_row(record);
    append.flush();
    if (progress) progress(record);
    fresh[i] = std::move(record);
  });
  append.close();

  for (auto& r : fresh) records.push_back(std::move(r));
  emit_reports(records, cfg.output_dir, cfg);
  return records;
}

// -- Aggregation ---------------------------------------------------------------

MeanSe aggregate_mean_se(const std::vector<double>& values) {
  if (values.empty()) throw DataError("cannot aggregate an empty sample");
  MeanSe out;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
    out.se = *out.stddev / std::sqrt(n);
  }
  return out;
}

DeltaSummary delta_vs_best_baseline(const std::vector<MetricRecord>& model_records,
                                    const std::vector<MetricRecord>& baseline_records,
                                    const std::string& metric) {
  if (model_records.empty()) throw DataError("no model records for delta");
  const int idx = metric_index(metric);
  const bool lower = lower_is_better(metric);

  DeltaSummary out;
  out.model = model_records.front().cell.model;
  out.n = model_records.front().cell.n;
  out.depth = model_records.front().cell.depth;
  out.metric = metric;

  std::set<std::string> baseline_names;
  for (const auto& r : baseline_records) baseline_names.insert(r.cell.model);
  out.baseline_set = join(std::vector<std::string>(baseline_names.begin(),
                                                   baseline_names.end()),
                          "+");

  std::vector<const MetricRecord*> sorted;
  for (const auto& r : model_records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->cell.seed < b->cell.seed;
  });

  for (const auto* r : sorted) {
    std::optional<double> best;
    for (const auto& b : baseline_records) {
      if (b.cell.seed != r->cell.seed || b.cell.n != r->cell.n) continue;
      const double v = b.values[idx];
      if (!best || (lower ? v < *best : v > *best)) best = v;
    }
    if (!best) {
      throw PairingError("no baseline record for seed " +
                         std::to_string(r->cell.seed) + " (model " +
                         r->cell.model + ", N=" + std::to_string(r->cell.n) + ")");
    }
    out.seeds.push_back(r->cell.seed);
    out.deltas.push_back(r->values[idx] - *best);
  }

  const auto agg = aggregate_mean_se(out.deltas);
  out.mean = agg.mean;
  out.stddev = agg.stddev;
  out.se = agg.se;
  return out;
}

// -- Serialization -------------------------------------------------------------

std::string records_csv(const std::vector<MetricRecord>& records) {
  std::string out = join(csv_header()) + "\n";
  for (const auto& r : records) out += record_row(r);
  return out;
}

std::vector<MetricRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line, ',') != csv_header()) {
    throw FormatError("records.csv header does not match the expected columns");
  }
  const std::size_t width = csv_header().size();
  std::vector<MetricRecord> out;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != width) {
      throw FormatError("records.csv row " + std::to_string(row) + ": expected " +
                        std::to_string(width) + " columns");
    }
    try {
      MetricRecord r;
      r.cell.seed = parse_number<std::uint64_t>(cols[0], "seed");
      r.cell.model = cols[1];
      r.cell.n = parse_number<long>(cols[2], "n");
      r.cell.depth = parse_number<int>(cols[3], "depth");
      {
        std::uint64_t v = 0;
        const auto& s = cols[4];
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
          throw ConfigError("invalid split_checksum");
        }
        r.split_checksum = v;
      }
      r.status = cols[5];
      for (std::size_t m = 0; m < kMetricColumns.size(); ++m) {
        r.values[m] = parse_number<double>(cols[6 + m], kMetricColumns[m]);
      }
      const auto& flag_text = cols[6 + kMetricColumns.size()];
      if (!flag_text.empty()) r.flags = split(flag_text, '|');
      r.notes = cols[7 + kMetricColumns.size()];
      out.push_back(std::move(r));
    } catch (const ConfigError& e) {
      throw ParseError("records.csv row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricRecord> load_records(const std::string& path) {
  return parse_records_csv(read_file(path));
}

void emit_reports(const std::vector<MetricRecord>& records,
                  const std::string& out_dir, const ExperimentConfig& cfg) {
  if (records.empty()) throw DataError("no records to report");
  const fs::path dir(out_dir);
  ensure_dir(dir);

  std::vector<const MetricRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return cell_order(a->cell) < cell_order(b->cell);
  });

  {
    std::string text = join(csv_header()) + "\n";
    for (const auto* r : sorted) text += record_row(*r);
    write_file(dir / "records.csv", text);
  }

  // Groups of successful records per (model, N, L), in seed order.
  std::map<std::tuple<std::string, long, int>, std::vector<MetricRecord>> groups;
  for (const auto* r : sorted) {
    if (r->ok()) groups[{r->cell.model, r->cell.n, r->cell.depth}].push_back(*r);
  }

  {
    std::string text = "model,n,depth,metric,mean,se,stddev,n_seeds\n";
    for (const auto& [key, group] : groups) {
      const auto& [model, n, depth] = key;
      for (std::size_t m = 0; m < kMetricColumns.size(); ++m) {
        std::vector<double> values;
        for (const auto& r : group) {
          if (!std::isnan(r.values[m])) values.push_back(r.values[m]);
        }
        if (values.empty()) continue;
        const auto agg = aggregate_mean_se(values);
        text += model + "," + std::to_string(n) + "," + std::to_string(depth) +
                "," + kMetricColumns[m] + "," + fmt(agg.mean) + "," + opt(agg.se) +
                "," + opt(agg.stddev) + "," + std::to_string(values.size()) + "\n";
      }
    }
    write_file(dir / "summary.csv", text);
  }

  {
    std::vector<MetricRecord> baseline_pool;
    for (const auto& [key, group] : groups) {
      if (is_baseline(std::get<0>(key))) {
        baseline_pool.insert(baseline_pool.end(), group.begin(), group.end());
      }
    }
    std::string text =
        "model,n,depth,metric,baseline_set,mean,stddev,se,n_seeds,deltas\n";
    for (const auto& [key, group] : groups) {
      if (!is_qlr_model(std::get<0>(key))) continue;
      for (const auto& metric : delta_metrics()) {
        DeltaSummary d;
        try {
          d = delta_vs_best_baseline(group, baseline_pool, metric);
        } catch (const PairingError&) {
          break;
        }
        std::vector<std::string> per_seed;
        for (std::size_t i = 0; i < d.deltas.size(); ++i) {
          per_seed.push_back(std::to_string(d.seeds[i]) + ":" + fmt(d.deltas[i]));
        }
        text += d.model + "," + std::to_string(d.n) + "," +
                std::to_string(d.depth) + "," + d.metric + "," + d.baseline_set +
                "," + fmt(d.mean) + "," + opt(d.stddev) + "," + opt(d.se) + "," +
                std::to_string(d.deltas.size()) + "," + join(per_seed, ";") + "\n";
      }
    }
    write_file(dir / "delta.csv", text);
  }

  {
    bool any = false;
    for (const auto* r : sorted) any = any || !r->reliability_bins.empty();
    if (any) {
      const fs::path rel = dir / "reliability";
      ensure_dir(rel);
      for (const auto* r : sorted) {
        if (r->reliability_bins.empty()) continue;
        write_file(rel / (file_stem(r->cell) + ".csv"),
                   metrics::reliability_csv(r->reliability_bins));
      }
    }
  }

  {
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["software"] = "qlrkit";
    meta["version"] = kVersion;
    meta["thread_mode"] = cfg.thread_mode == ThreadMode::Single ? "single" : "parallel";
    meta["seeds"] = cfg.seeds;
    meta["alpha"] = cfg.alpha;
    meta["iqp_repetitions"] = cfg.iqp_repetitions;
    ordered_json config;
    config["models"] = cfg.models;
    config["n"] = cfg.train_sizes;
    config["depth"] = cfg.depths;
    config["alpha"] = cfg.alpha;
    config["seeds"] = cfg.seeds;
    config["data"] = cfg.data_path;
    config["output"] = cfg.output_dir;
    config["workers"] = cfg.workers;
    config["iqp_reps"] = cfg.iqp_repetitions;
    config["test_fraction"] = cfg.test_fraction;
    config["save_models"] = cfg.save_models;
    config["learning_rate"] = cfg.train.learning_rate;
    config["batch_size"] = cfg.train.batch_size;
    config["patience"] = cfg.train.patience;
    config["max_epochs"] = cfg.train.max_epochs;
    config["validation_fraction"] = cfg.train.validation_fraction;
    meta["config"] = config;
    meta["config_text"] = cfg.to_text();
    meta["design"] = {
        {"basis_order", "qubit 0 is the most significant bit"},
        {"layer_rotation_order", "RY then RZ on each qubit"},
        {"angle_entangler", "CZ ring"},
        {"amplitude_entangler", "CZ ring on 3 qubits"},
        {"reupload_entangler",
         "odd layers (0,1)(2,3)(4,5)(6,7); even layers (1,2)(3,4)(5,6)(7,0); none "
         "after the final layer"},
        {"amplitude_zero_norm", "uniform state below norm 1e-9"},
        {"theta_init", "uniform [-pi, pi]"},
        {"head_init", "w = 0, b = 0"},
        {"loss", "mean binary cross-entropy, clip 1e-12"},
        {"early_stopping", "stratified validation split inside the subsample; best "
                           "epoch restored"},
        {"standardizer", "population sd, fit on the training subsample"},
        {"split", "canonical row sort then seeded per-class shuffle"},
        {"threshold_rule", "p >= 0.5 is positive"},
        {"average_precision", "non-interpolated, tied scores grouped"},
        {"reliability_bins", "15 equal-width, last bin closed, empty bins omitted"},
        {"logreg_solver", "Newton with backtracking, class-balanced weights"},
        {"logreg_c_grid", "0.1,1,10 by 3-fold stratified CV on average precision"},
        {"qsvm_probabilities", "Platt scaling fit on a stratified 80/20 holdout"},
        {"delta_baselines", "logreg"},
        {"delta_lower_is_better",
         "brier,ece,fnr,fpr,fnr_fpr1,reliability,binned_brier,train_seconds,"
         "predict_seconds"}};
    write_file(dir / "run_meta.json", meta.dump(2) + "\n");
  }
}

}  // namespace qlr::harness
