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
 * @file hybrid.hpp
 * Quantum logistic regression: Pauli-Z features from a variational circuit
 * feeding a logistic head, trained jointly with Adam on mean binary
 * cross-entropy.
 */
#pragma once

#include "qlr/circuits.hpp"
#include "qlr/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qlr::hybrid {

struct QlrModel {
  circuits::EncodingVariant variant;
  circuits::VariationalParams params;
  Vector w;  ///< one weight per measured qubit
  double b = 0.0;
  std::uint64_t seed = 0;

  /// theta ~ U[-pi, pi] from `seed`; w = 0, b = 0.
  static QlrModel initialize(const circuits::EncodingVariant& variant,
                             int depth, std::uint64_t seed);

  /// theta, w, b concatenated.
  Vector flat() const;
  void set_flat(const VectorRef& values);
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 16;
  int patience = 15;
  int max_epochs = 200;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  /// Worker threads for per-sample circuit evaluation; 1 = single-threaded.
  int threads = 1;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;  ///< size-weighted mean of batch losses
  std::vector<double> val_loss;
  int best_epoch = 0;  ///< 1-based
  double train_seconds = 0.0;

  int epochs() const { return static_cast<int>(val_loss.size()); }
};

double decision_score(const VectorRef& z, const VectorRef& w, double b);

double sigmoid(double score);

/// Mean binary cross-entropy with probabilities clipped to [1e-12, 1-1e-12].
double bce_loss(const VectorRef& probs, const LabelsRef& labels);

struct Gradients {
  Vector theta;
  Vector w;
  double b = 0.0;
  double loss = 0.0;

  Vector flat() const;
};

/// Closed-form chain rule through the parameter-shift feature Jacobian.
Gradients loss_gradients(const MatrixRef& batch_x, const LabelsRef& batch_y,
                         const QlrModel& model, int threads = 1);

/// Bias-corrected Adam (beta1 0.9, beta2 0.999, eps 1e-8 by default).
class AdamOptimizer {
 public:
  explicit AdamOptimizer(Eigen::Index size, double learning_rate = 0.01,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);

  /// One update of `params` in place.
  void step(Vector& params, const VectorRef& gradient);

  long steps() const { return steps_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Vector m_, v_;
  long steps_ = 0;
};

struct FitResult {
  QlrModel model;
  TrainHistory history;
};

FitResult fit(const MatrixRef& train_x, const LabelsRef& train_y,
              const TrainConfig& config,
              const circuits::EncodingVariant& variant, int depth);

Vector predict_proba(const QlrModel& model, const MatrixRef& x,
                     int threads = 1);

/// Mean BCE of `model` on (x, y).
double evaluate_loss(const QlrModel& model, const MatrixRef& x,
                     const LabelsRef& y, int threads = 1);

/// JSON document with fields variant, depth, n_qubits, alpha, theta, w, b,
/// seed.
std::string model_to_json(const QlrModel& model);
QlrModel model_from_json(const std::string& text);
void save_model(const QlrModel& model, const std::string& path);
QlrModel load_model(const std::string& path);

}  // namespace qlr::hybrid
