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

#include "qlr/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

namespace qlr::data {

namespace {

using Row = std::array<double, kNumFeatures + 1>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

Row parse_row(std::string_view line, long row_number) {
  Row row{};
  std::size_t column = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        trim(line.substr(start, comma == std::string_view::npos
                                    ? std::string_view::npos
                                    : comma - start));
    if (column >= row.size()) {
      throw FormatError("row " + std::to_string(row_number) +
                        ": more than 9 columns");
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
      throw ParseError("row " + std::to_string(row_number) + ", column " +
                       std::to_string(column + 1) + ": cannot parse '" +
                       std::string(cell) + "'");
    }
    row[column++] = value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (column != row.size()) {
    throw FormatError("row " + std::to_string(row_number) + ": expected 9 columns, got " +
                      std::to_string(column));
  }
  if (row.back() != 0.0 && row.back() != 1.0) {
    throw ParseError("row " + std::to_string(row_number) + ": label is not 0/1");
  }
  return row;
}

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  out.ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    out.labels[static_cast<Eigen::Index>(i)] = labels[r];
    out.ids.push_back(ids.empty() ? static_cast<long>(r) : ids[r]);
  }
  return out;
}

Dataset parse_htru2(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  long row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    rows.push_back(parse_row(line, row_number));
  }
  if (rows.empty()) throw FormatError("no data rows");
  std::stable_sort(rows.begin(), rows.end());

  Dataset ds;
  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(n, kNumFeatures);
  ds.labels.resize(n);
  ds.ids.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < kNumFeatures; ++c) ds.features(i, c) = rows[i][c];
    ds.labels[i] = static_cast<int>(rows[i][kNumFeatures]);
    ds.ids[i] = static_cast<long>(i);
  }
  return ds;
}

Dataset load_htru2(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_htru2(buffer.str());
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_indices(const LabelsRef& labels, double test_fraction,
                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  auto engine = make_engine(seed);
  std::vector<Eigen::Index> first, second;
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    const auto take =
        static_cast<std::size_t>(std::llround(test_fraction * double(members.size())));
    if (take == 0 || take >= members.size()) {
      throw DataError("class " + std::to_string(cls) + " has " +
                      std::to_string(members.size()) +
                      " rows, too few for a stratified split");
    }
    std::shuffle(members.begin(), members.end(), engine);
    second.insert(second.end(), members.begin(), members.begin() + take);
    first.insert(first.end(), members.begin() + take, members.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {std::move(first), std::move(second)};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  auto [train_rows, test_rows] = stratified_indices(ds.labels, test_fraction, seed);
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

Dataset stratified_subsample(const Dataset& train, long n, std::uint64_t seed) {
  const long total = static_cast<long>(train.size());
  if (n < 1 || n > total) {
    throw DataError("cannot draw " + std::to_string(n) + " rows from " +
                    std::to_string(total));
  }
  const long pos_total = train.positives();
  const long neg_total = total - pos_total;
  long pos = std::lround(double(n) * double(pos_total) / double(total));
  long neg = std::lround(double(n) * double(neg_total) / double(total));
  // The majority class absorbs the rounding remainder.
  (neg_total >= pos_total ? neg : pos) += n - pos - neg;
  if (pos > pos_total || neg > neg_total || pos < 0 || neg < 0) {
    throw DataError("stratified subsample exceeds a class size");
  }

  auto engine = make_engine(seed);
  std::vector<Eigen::Index> rows;
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < train.labels.size(); ++i) {
      if (train.labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), engine);
    const long take = cls == 1 ? pos : neg;
    rows.insert(rows.end(), members.begin(), members.begin() + take);
  }
  std::sort(rows.begin(), rows.end());
  return train.subset(rows);
}

Matrix Standardizer::apply(const MatrixRef& x) const {
  if (x.cols() != mean.size()) throw ShapeError("standardizer column mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() /
         stddev.transpose().array();
}

Standardizer fit_standardizer(const MatrixRef& train) {
  if (train.rows() == 0) throw DataError("cannot standardize an empty sample");
  Standardizer s;
  s.mean = train.colwise().mean().transpose();
  const Matrix centered = train.rowwise() - s.mean.transpose();
  s.stddev = (centered.colwise().squaredNorm() / double(train.rows()))
                 .cwiseSqrt()
                 .transpose();
  for (Eigen::Index c = 0; c < s.stddev.size(); ++c) {
    if (!(s.stddev[c] > 0.0)) {
      throw DataError("feature column " + std::to_string(c) + " has zero variance");
    }
  }
  return s;
}

std::uint64_t membership_checksum(const std::vector<long>& ids) {
  std::vector<long> sorted(ids);
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = 14695981039346656037ULL;
  for (long id : sorted) {
    auto v = static_cast<std::uint64_t>(id);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

Dataset make_fixture(long rows, std::uint64_t seed) {
  if (rows < 20) throw ConfigError("fixture needs at least 20 rows");
  // Class-conditional (mean, sd) per feature, negatives then positives.
  static constexpr std::array<std::array<double, 2>, kNumFeatures> kNeg{{
      {116.6, 17.5}, {47.3, 6.2}, {0.21, 0.33}, {0.38, 1.03},
      {8.9, 24.4}, {23.3, 16.7}, {8.9, 4.2}, {113.7, 106.7}}};
  static constexpr std::array<std::array<double, 2>, kNumFeatures> kPos{{
      {56.7, 30.0}, {38.7, 8.0}, {3.13, 1.87}, {15.6, 14.0},
      {49.8, 45.3}, {56.5, 19.7}, {2.76, 3.1}, {17.9, 27.7}}};

  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long positives = std::lround(0.09 * double(rows));

  Dataset ds;
  ds.features.resize(rows, kNumFeatures);
  ds.labels.resize(rows);
  for (long i = 0; i < rows; ++i) {
    const bool pos = i < positives;
    // A share of pulsars look like noise, as in the real survey data.
    const bool hidden = pos && unit(engine) < 0.15;
    const auto& spec = pos && !hidden ? kPos : kNeg;
    for (int c = 0; c < kNumFeatures; ++c) {
      ds.features(i, c) = spec[c][0] + spec[c][1] * normal(engine);
    }
    ds.labels[i] = pos ? 1 : 0;
  }
  ds.ids.resize(rows);
  std::iota(ds.ids.begin(), ds.ids.end(), 0L);
  // Round-trip through the CSV form so the rows get the canonical order.
  return parse_htru2(to_csv(ds));
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  char cell[40];
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (int c = 0; c < kNumFeatures; ++c) {
      std::snprintf(cell, sizeof cell, "%.17g,", ds.features(i, c));
      out += cell;
    }
    out += ds.labels[i] == 1 ? "1\n" : "0\n";
  }
  return out;
}

}  // namespace qlr::data
