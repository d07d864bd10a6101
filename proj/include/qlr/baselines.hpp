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
 * @file baselines.hpp
 * Class-weighted logistic regression with a C grid chosen by stratified
 * cross-validation on average precision, and the quantum-kernel SVM
 * reference (IQP feature map, fidelity kernel, PSD repair, weighted SMO,
 * Platt scaling).
 */
#pragma once

#include "qlr/common.hpp"
#include "qlr/qsim.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qlr::baselines {

// -- Classical logistic regression -------------------------------------------

inline constexpr std::array<double, 3> kCGrid{0.1, 1.0, 10.0};

struct ClassicalLrModel {
  Vector w;
  double b = 0.0;
  double C = 1.0;
  int iterations = 0;

  Vector decision(const MatrixRef& x) const;
  Vector predict_proba(const MatrixRef& x) const;
};

/// Balanced class weights N / (2 N_c), returned as (negative, positive).
std::array<double, 2> balanced_class_weights(const LabelsRef& y);

/// Gradient of (1/N) sum_i s_i BCE_i + (l2 / 2) ||w||^2 with respect to
/// (w, b), where `sample_weights` are the s_i. Returned as [w; b].
Vector weighted_logistic_gradient(const MatrixRef& x, const LabelsRef& y,
                                  const VectorRef& sample_weights,
                                  const VectorRef& w, double b, double l2);

/// Minimizes balanced-weighted mean BCE + ||w||^2 / (2 C N) with damped
/// Newton steps; at most 2000 iterations, stopping once the gradient
/// infinity norm drops below 1e-6.
ClassicalLrModel fit_classical_lr(const MatrixRef& x, const LabelsRef& y,
                                  double C);

struct CvResult {
  double best_C = 0.1;
  /// Mean held-out average precision per grid entry.
  std::array<double, 3> mean_ap{};
  /// Fold id (0..2) for every row.
  std::vector<int> folds;
  ClassicalLrModel model;
};

/// Seeded stratified fold assignment.
std::vector<int> stratified_folds(const LabelsRef& y, int k, std::uint64_t seed);

/// 3-fold stratified CV over kCGrid; ties go to the smaller C; the winner is
/// refit on all rows.
CvResult cv_select_C(const MatrixRef& x, const LabelsRef& y, std::uint64_t seed);

// -- Quantum kernel SVM ------------------------------------------------------

inline constexpr int kDefaultIqpRepetitions = 2;

/// Repetitions of H on every qubit, RZ(x_i) on qubit i, then ZZ(x_i x_j) on
/// every pair i < j, applied to |0...0>.
qsim::State iqp_state(const VectorRef& x, int repetitions);

double kernel_entry(const VectorRef& x, const VectorRef& x_prime,
                    int repetitions);

/// K(i, j) = |<phi(b_j)|phi(a_i)>|^2. With `symmetrize`, returns (K + K^T)/2
/// (only meaningful when a and b are the same rows).
Matrix gram(const MatrixRef& a, const MatrixRef& b, int repetitions,
            bool symmetrize = false, int threads = 1);

/// Square training Gram: symmetrized.
Matrix gram(const MatrixRef& a, int repetitions, int threads = 1);

/// Eigenvalue clipping onto the PSD cone. Inputs whose smallest eigenvalue
/// is >= -1e-10 are returned unchanged.
Matrix psd_project(const MatrixRef& k);

struct SvmDual {
  Vector alpha;
  double bias = 0.0;
  Vector upper;  ///< per-sample box bound C * kappa_y
  std::vector<Eigen::Index> support;
  Vector signed_labels;  ///< +1 / -1
  long iterations = 0;

  /// f = sum_j alpha_j y_j K(row, j) + bias for each row of `k_rows_by_train`.
  Vector decision(const MatrixRef& k_rows_by_train) const;
  /// sum alpha - 1/2 sum alpha_i alpha_j y_i y_j K_ij.
  double dual_objective(const MatrixRef& k_train) const;
};

/// Soft-margin dual by SMO with maximal-violating-pair selection using
/// second-order gain; KKT tolerance 1e-3.
SvmDual fit_weighted_svm(const MatrixRef& k_train, const LabelsRef& y,
                         double C = 1.0, double tolerance = 1e-3);

struct PlattScaler {
  double A = 1.0;
  double B = 0.0;

  Vector apply(const VectorRef& scores) const;
};

/// Fits sigma(A s + B) to smoothed targets by Newton iteration.
PlattScaler platt_calibrate(const VectorRef& scores, const LabelsRef& y);

struct QsvmResult {
  Vector test_probabilities;
  Vector test_scores;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  double min_eigenvalue_before = 0.0;
  bool projected = false;
  PlattScaler platt;
};

QsvmResult qsvm_fit_predict(const MatrixRef& train_x, const LabelsRef& train_y,
                            const MatrixRef& test_x, int repetitions,
                            std::uint64_t seed, int threads = 1);

/// CSV with one row per kernel row, no header.
std::string kernel_csv(const MatrixRef& k);

}  // namespace qlr::baselines
