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
 * @file data.hpp
 * HTRU-2 ingestion, stratified splitting/subsampling and standardization.
 *
 * Rows are put into a canonical order (lexicographic on all nine columns)
 * when loaded, so every seeded split depends only on the file's content and
 * not on its row order.
 */
#pragma once

#include "qlr/common.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qlr::data {

/// Row counts of the canonical HTRU-2 file.
inline constexpr long kHtru2Rows = 17898;
inline constexpr long kHtru2Positives = 1639;
inline constexpr long kHtru2Negatives = 16259;

struct Dataset {
  Matrix features;  ///< N x 8
  Labels labels;    ///< 1 = pulsar
  /// Row ids in the canonically sorted source file.
  std::vector<long> ids;

  Eigen::Index size() const { return features.rows(); }
  long positives() const { return labels.sum(); }
  long negatives() const { return static_cast<long>(size()) - positives(); }

  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

/// Parses comma-separated text with 8 feature columns and a 0/1 label.
Dataset parse_htru2(const std::string& text);

Dataset load_htru2(const std::string& path);

/// Per-class seeded shuffle; each class contributes round(fraction * size)
/// rows to the second index list. Returns (train_rows, test_rows), each in
/// ascending order.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_indices(const LabelsRef& labels, double test_fraction,
                   std::uint64_t seed);

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

/// Stratified draw of exactly `n` rows without replacement.
Dataset stratified_subsample(const Dataset& train, long n, std::uint64_t seed);

struct Standardizer {
  Vector mean;
  Vector stddev;  ///< population standard deviation

  Matrix apply(const MatrixRef& x) const;
};

Standardizer fit_standardizer(const MatrixRef& train);

/// FNV-1a over the sorted row ids; identifies split membership.
std::uint64_t membership_checksum(const std::vector<long>& ids);

/// Synthetic HTRU-2-shaped data: 8 features, about 9% positives, drawn from
/// class-conditional Gaussians loosely modeled on the real feature scales.
Dataset make_fixture(long rows, std::uint64_t seed);

/// The nine-column CSV form read by load_htru2.
std::string to_csv(const Dataset& ds);

}  // namespace qlr::data
