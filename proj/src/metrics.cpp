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

#include "qlr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace qlr::metrics {

namespace {

void check_lengths(const VectorRef& values, const LabelsRef& labels) {
  if (values.size() != labels.size()) {
    throw ShapeError("got " + std::to_string(values.size()) + " scores for " +
                     std::to_string(labels.size()) + " labels");
  }
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw DataError("label at row " + std::to_string(i) + " is not 0/1");
    }
  }
}

void check_probabilities(const VectorRef& probs) {
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      throw DataError("probability at row " + std::to_string(i) +
                      " outside [0, 1]");
    }
  }
}

struct ClassCounts {
  long positives = 0;
  long negatives = 0;
};

ClassCounts count_classes(const LabelsRef& labels) {
  ClassCounts c;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? c.positives : c.negatives) += 1;
  }
  return c;
}

/// Indices sorted by descending score.
std::vector<Eigen::Index> descending_order(const VectorRef& scores) {
  std::vector<Eigen::Index> order(scores.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

int bin_of(double p, int bins) {
  return std::min(static_cast<int>(std::floor(p * bins)), bins - 1);
}

struct BinAccumulator {
  long count = 0;
  double anchor = 0.0;
  double offset_sum = 0.0;
  long positives = 0;
};

std::vector<BinAccumulator> accumulate_bins(const VectorRef& probs,
                                            const LabelsRef& labels,
                                            int bins) {
  if (bins < 1) throw ConfigError("bin count must be positive");
  check_lengths(probs, labels);
  check_probabilities(probs);
  std::vector<BinAccumulator> acc(bins);
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    auto& b = acc[bin_of(probs[i], bins)];
    if (b.count == 0) b.anchor = probs[i];
    b.count += 1;
    b.offset_sum += probs[i] - b.anchor;
    b.positives += labels[i];
  }
  return acc;
}

}  // namespace

ConfusionCounts confusion_counts(const VectorRef& probs, const LabelsRef& labels,
                                 double threshold) {
  check_lengths(probs, labels);
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

ThresholdMetrics threshold_metrics(const ConfusionCounts& c) {
  ThresholdMetrics m;
  const long predicted = c.tp + c.fp;
  const long actual = c.tp + c.fn;
  const long negatives = c.fp + c.tn;
  m.no_predicted_positives = predicted == 0;
  m.no_actual_positives = actual == 0;
  m.no_actual_negatives = negatives == 0;
  m.precision = predicted ? double(c.tp) / double(predicted) : 0.0;
  m.recall = actual ? double(c.tp) / double(actual) : 0.0;
  m.fnr = actual ? double(c.fn) / double(actual) : 1.0;
  m.fpr = negatives ? double(c.fp) / double(negatives) : 0.0;
  const double denom = m.precision + m.recall;
  m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  return m;
}

double roc_auc(const VectorRef& scores, const LabelsRef& labels) {
  check_lengths(scores, labels);
  const auto classes = count_classes(labels);
  if (classes.positives == 0 || classes.negatives == 0) {
    throw DataError("ROC-AUC needs both classes");
  }
  // Rank-sum form of the Mann-Whitney statistic with midranks for ties.
  std::vector<Eigen::Index> order(scores.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] < scores[b];
  });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = double(classes.positives);
  const double nn = double(classes.negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double average_precision(const VectorRef& scores, const LabelsRef& labels) {
  check_lengths(scores, labels);
  const auto classes = count_classes(labels);
  if (classes.positives == 0) {
    throw DataError("average precision needs at least one positive");
  }
  const auto order = descending_order(scores);
  double ap = 0.0;
  double previous_recall = 0.0;
  long tp = 0;
  long fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    const double recall = double(tp) / double(classes.positives);
    const double precision = double(tp) / double(tp + fp);
    ap += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return ap;
}

OperatingPoint recall_at_fpr(const VectorRef& scores, const LabelsRef& labels,
                             double alpha) {
  check_lengths(scores, labels);
  const auto classes = count_classes(labels);
  if (classes.positives == 0 || classes.negatives == 0) {
    throw DataError("recall at FPR needs both classes");
  }
  const auto order = descending_order(scores);
  const double np = double(classes.positives);
  const double nn = double(classes.negatives);

  OperatingPoint best;
  best.sentinel = true;
  best.threshold = order.empty()
                       ? 0.0
                       : std::nextafter(scores[order.front()],
                                        std::numeric_limits<double>::infinity());
  best.recall = 0.0;
  best.fpr = 0.0;
  best.fnr = 1.0;
  best.precision = 0.0;

  long tp = 0;
  long fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double tau = scores[order[i]];
    while (i < order.size() && scores[order[i]] == tau) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    const double fpr = double(fp) / nn;
    if (fpr > alpha) break;  // fpr only grows as the threshold decreases
    const double recall = double(tp) / np;
    const bool better =
        recall > best.recall || (recall == best.recall && fpr < best.fpr);
    if (better) {
      best.sentinel = false;
      best.threshold = tau;
      best.recall = recall;
      best.fpr = fpr;
      best.fnr = double(classes.positives - tp) / np;
      best.precision = double(tp) / double(tp + fp);
    }
  }
  return best;
}

double brier(const VectorRef& probs, const LabelsRef& labels) {
  check_lengths(probs, labels);
  check_probabilities(probs);
  if (probs.size() == 0) throw DataError("Brier score of an empty sample");
  return (probs - labels.cast<double>()).squaredNorm() / double(probs.size());
}

std::vector<ReliabilityBin> reliability_curve(const VectorRef& probs,
                                              const LabelsRef& labels,
                                              int bins) {
  const auto acc = accumulate_bins(probs, labels, bins);
  std::vector<ReliabilityBin> curve;
  for (int m = 0; m < bins; ++m) {
    if (acc[m].count == 0) continue;
    const double n = double(acc[m].count);
    curve.push_back({m + 1, acc[m].count, acc[m].anchor + acc[m].offset_sum / n,
                     double(acc[m].positives) / n});
  }
  return curve;
}

double ece(const VectorRef& probs, const LabelsRef& labels, int bins) {
  const auto curve = reliability_curve(probs, labels, bins);
  const double n = double(probs.size());
  double total = 0.0;
  for (const auto& b : curve) {
    total += double(b.count) / n * std::abs(b.frequency - b.confidence);
  }
  return total;
}

MurphyTerms murphy_decomposition(const VectorRef& probs, const LabelsRef& labels,
                                 int bins) {
  if (probs.size() == 0) throw DataError("Murphy decomposition of no samples");
  const auto curve = reliability_curve(probs, labels, bins);
  const double n = double(probs.size());
  const double base_rate = labels.cast<double>().sum() / n;

  MurphyTerms t;
  std::vector<double> bin_forecast(bins, 0.0);
  for (const auto& b : curve) {
    const double w = double(b.count) / n;
    t.reliability += w * (b.confidence - b.frequency) * (b.confidence - b.frequency);
    t.resolution += w * (b.frequency - base_rate) * (b.frequency - base_rate);
    bin_forecast[b.index - 1] = b.confidence;
  }
  t.uncertainty = base_rate * (1.0 - base_rate);

  double binned = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double d = bin_forecast[bin_of(probs[i], bins)] - labels[i];
    binned += d * d;
  }
  t.binned_brier = binned / n;
  t.residual = brier(probs, labels) - t.binned_brier;

  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double d = probs[i] - bin_forecast[bin_of(probs[i], bins)];
    t.within_variance += d * d;
    t.within_covariance += d * labels[i];
  }
  t.within_variance /= n;
  t.within_covariance /= n;
  return t;
}

std::string reliability_csv(const std::vector<ReliabilityBin>& curve) {
  std::ostringstream out;
  out << "bin,count,conf,freq\n";
  char line[128];
  for (const auto& b : curve) {
    std::snprintf(line, sizeof line, "%d,%ld,%.17g,%.17g\n", b.index, b.count,
                  b.confidence, b.frequency);
    out << line;
  }
  return out.str();
}

}  // namespace qlr::metrics
