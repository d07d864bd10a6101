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
 * @file metrics.hpp
 * Discrimination, operating-point and calibration metrics for binary
 * classifiers. Labels are 0/1; a sample is predicted positive iff its
 * probability is >= the threshold.
 */
#pragma once

#include "qlr/common.hpp"

#include <string>
#include <vector>

namespace qlr::metrics {

/// Default number of equal-width probability bins.
inline constexpr int kDefaultBins = 15;

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion_counts(const VectorRef& probs, const LabelsRef& labels,
                                 double threshold);

struct ThresholdMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fnr = 0.0;
  double fpr = 0.0;
  /// tp + fp == 0: precision reported as 0.
  bool no_predicted_positives = false;
  /// tp + fn == 0: recall reported as 0 and fnr as 1.
  bool no_actual_positives = false;
  /// fp + tn == 0: fpr reported as 0.
  bool no_actual_negatives = false;
};

ThresholdMetrics threshold_metrics(const ConfusionCounts& c);

/// Mann-Whitney estimate; ties count one half.
double roc_auc(const VectorRef& scores, const LabelsRef& labels);

/// Non-interpolated step sum of precision over recall increments, with equal
/// scores grouped into one threshold.
double average_precision(const VectorRef& scores, const LabelsRef& labels);

struct OperatingPoint {
  double recall = 0.0;
  double threshold = 0.0;
  double precision = 0.0;
  double fnr = 1.0;
  double fpr = 0.0;
  /// Only the sentinel threshold above every score satisfied the budget.
  bool sentinel = false;
};

/// Maximal recall subject to FPR <= alpha.
OperatingPoint recall_at_fpr(const VectorRef& scores, const LabelsRef& labels,
                             double alpha);

double brier(const VectorRef& probs, const LabelsRef& labels);

struct ReliabilityBin {
  int index = 0;  ///< 1-based bin number
  long count = 0;
  double confidence = 0.0;  ///< mean predicted probability
  double frequency = 0.0;   ///< empirical positive fraction
};

/// Bin m (1-based) covers [(m-1)/M, m/M); the last bin is closed. Empty bins
/// are omitted.
std::vector<ReliabilityBin> reliability_curve(const VectorRef& probs,
                                              const LabelsRef& labels,
                                              int bins = kDefaultBins);

double ece(const VectorRef& probs, const LabelsRef& labels,
           int bins = kDefaultBins);

struct MurphyTerms {
  double reliability = 0.0;
  double resolution = 0.0;
  double uncertainty = 0.0;
  /// Brier score of the bin-averaged forecast.
  double binned_brier = 0.0;
  /// Raw Brier minus binned Brier; equals within_variance minus twice
  /// within_covariance, so it can be negative.
  double residual = 0.0;
  /// Mean squared deviation of each forecast from its bin mean (>= 0).
  double within_variance = 0.0;
  /// Mean of (p - bin mean) * y.
  double within_covariance = 0.0;
};

MurphyTerms murphy_decomposition(const VectorRef& probs, const LabelsRef& labels,
                                 int bins = kDefaultBins);

/// Writes a reliability curve as CSV with columns bin,count,conf,freq.
std::string reliability_csv(const std::vector<ReliabilityBin>& curve);

}  // namespace qlr::metrics
