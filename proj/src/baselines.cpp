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

#include "qlr/baselines.hpp"

#include "qlr/data.hpp"
#include "qlr/hybrid.hpp"
#include "qlr/metrics.hpp"
#include "qlr/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace qlr::baselines {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_both_classes(const LabelsRef& y, const char* what) {
  long pos = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) throw DataError("labels must be 0/1");
    pos += y[i];
  }
  if (pos == 0 || pos == y.size()) {
    throw DataError(std::string(what) + " needs both classes");
  }
}

Vector sample_weights(const LabelsRef& y) {
  const auto kappa = balanced_class_weights(y);
  Vector s(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) s[i] = kappa[y[i]];
  return s;
}

double weighted_objective(const MatrixRef& x, const LabelsRef& y,
                          const VectorRef& s, const VectorRef& w, double b,
                          double l2) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double g = x.row(i).dot(w) + b;
    // log(1 + exp(-g)) for y = 1, log(1 + exp(g)) for y = 0, computed stably.
    const double m = y[i] == 1 ? -g : g;
    total += s[i] * (m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)));
  }
  return total / double(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

std::vector<Eigen::Index> rows_where(const std::vector<int>& folds, int fold,
                                     bool equal) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if ((folds[i] == fold) == equal) rows.push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

}  // namespace

// -- Classical logistic regression -------------------------------------------

Vector ClassicalLrModel::decision(const MatrixRef& x) const {
  return (x * w).array() + b;
}

Vector ClassicalLrModel::predict_proba(const MatrixRef& x) const {
  return decision(x).unaryExpr([](double s) { return hybrid::sigmoid(s); });
}

std::array<double, 2> balanced_class_weights(const LabelsRef& y) {
  const double n = double(y.size());
  const double pos = double(y.sum());
  const double neg = n - pos;
  if (pos == 0 || neg == 0) throw DataError("balanced weights need both classes");
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

Vector weighted_logistic_gradient(const MatrixRef& x, const LabelsRef& y,
                                  const VectorRef& sample_weights,
                                  const VectorRef& w, double b, double l2) {
  if (x.rows() != y.size() || sample_weights.size() != y.size()) {
    throw ShapeError("gradient inputs disagree in length");
  }
  const double n = double(x.rows());
  Vector r(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    r[i] = sample_weights[i] * (hybrid::sigmoid(x.row(i).dot(w) + b) - y[i]);
  }
  Vector grad(w.size() + 1);
  grad.head(w.size()) = x.transpose() * r / n + l2 * w;
  grad[w.size()] = r.sum() / n;
  return grad;
}

ClassicalLrModel fit_classical_lr(const MatrixRef& x, const LabelsRef& y,
                                  double C) {
  if (!(C > 0.0)) throw ConfigError("C must be positive");
  if (x.rows() != y.size()) throw ShapeError("row/label mismatch");
  require_both_classes(y, "logistic regression");

  constexpr int kMaxIterations = 2000;
  constexpr double kGradientTolerance = 1e-6;
  const auto d = x.cols();
  const double n = double(x.rows());
  const double l2 = 1.0 / (C * n);
  const Vector s = sample_weights(y);

  ClassicalLrModel model;
  model.C = C;
  model.w = Vector::Zero(d);
  model.b = 0.0;

  Matrix hessian(d + 1, d + 1);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vector grad = weighted_logistic_gradient(x, y, s, model.w, model.b, l2);
    model.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() < kGradientTolerance) break;

    hessian.setZero();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double p = hybrid::sigmoid(x.row(i).dot(model.w) + model.b);
      const double h = s[i] * p * (1.0 - p) / n;
      Vector xi(d + 1);
      xi << x.row(i).transpose(), 1.0;
      hessian.selfadjointView<Eigen::Lower>().rankUpdate(xi, h);
    }
    hessian = hessian.selfadjointView<Eigen::Lower>();
    hessian.diagonal().head(d).array() += l2;
    hessian.diagonal().array() += 1e-12;
    const Vector step = hessian.ldlt().solve(-grad);

    // Backtracking on the convex objective.
    const double f0 = weighted_objective(x, y, s, model.w, model.b, l2);
    const double slope = grad.dot(step);
    double t = 1.0;
    while (t > 1e-12) {
      const Vector w_new = model.w + t * step.head(d);
      const double b_new = model.b + t * step[d];
      if (weighted_objective(x, y, s, w_new, b_new, l2) <= f0 + 1e-4 * t * slope) {
        model.w = w_new;
        model.b = b_new;
        break;
      }
      t *= 0.5;
    }
    if (t <= 1e-12) break;
  }
  return model;
}

std::vector<int> stratified_folds(const LabelsRef& y, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least two folds");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 7u};
  std::mt19937_64 engine(seq);
  std::vector<int> folds(static_cast<std::size_t>(y.size()), 0);
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    if (static_cast<int>(members.size()) < k) {
      throw DataError("class " + std::to_string(cls) + " has fewer rows than folds");
    }
    std::shuffle(members.begin(), members.end(), engine);
    for (std::size_t m = 0; m < members.size(); ++m) {
      folds[members[m]] = static_cast<int>(m % k);
    }
  }
  return folds;
}

CvResult cv_select_C(const MatrixRef& x, const LabelsRef& y, std::uint64_t seed) {
  constexpr int kFolds = 3;
  if (x.rows() < 30) throw DataError("cross-validation needs at least 30 rows");
  require_both_classes(y, "cross-validation");

  CvResult result;
  result.folds = stratified_folds(y, kFolds, seed);
  const Matrix xd = x;
  const Labels yd = y;
  for (std::size_t c = 0; c < kCGrid.size(); ++c) {
    double total = 0.0;
    for (int f = 0; f < kFolds; ++f) {
      const auto train_rows = rows_where(result.folds, f, false);
      const auto held_rows = rows_where(result.folds, f, true);
      const Matrix xt = xd(train_rows, Eigen::all);
      const Labels yt = yd(train_rows);
      const Matrix xh = xd(held_rows, Eigen::all);
      const Labels yh = yd(held_rows);
      require_both_classes(yh, "every fold");
      const auto model = fit_classical_lr(xt, yt, kCGrid[c]);
      total += metrics::average_precision(model.decision(xh), yh);
    }
    result.mean_ap[c] = total / kFolds;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kCGrid.size(); ++c) {
    if (result.mean_ap[c] > result.mean_ap[best]) best = c;
  }
  result.best_C = kCGrid[best];
  result.model = fit_classical_lr(x, y, result.best_C);
  return result;
}

// -- Quantum kernel SVM ------------------------------------------------------

qsim::State iqp_state(const VectorRef& x, int repetitions) {
  if (repetitions < 1) throw ConfigError("IQP repetitions must be >= 1");
  if (!x.allFinite()) throw DataError("non-finite feature value");
  const auto n = static_cast<int>(x.size());
  qsim::State state(n);
  for (int r = 0; r < repetitions; ++r) {
    for (int q = 0; q < n; ++q) qsim::apply_hadamard(state, q);
    for (int q = 0; q < n; ++q) qsim::apply_rotation(state, q, 'Z', x[q]);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        qsim::apply_zz_rotation(state, i, j, x[i] * x[j]);
      }
    }
  }
  return state;
}

double kernel_entry(const VectorRef& x, const VectorRef& x_prime,
                    int repetitions) {
  return qsim::overlap_sq(iqp_state(x, repetitions),
                          iqp_state(x_prime, repetitions));
}

namespace {

std::vector<qsim::State> iqp_states(const MatrixRef& x, int repetitions,
                                    int threads) {
  std::vector<qsim::State> states(static_cast<std::size_t>(x.rows()),
                                  qsim::State(static_cast<int>(x.cols())));
  parallel_for(states.size(), threads, [&](std::size_t i) {
    states[i] = iqp_state(x.row(static_cast<Eigen::Index>(i)).transpose(),
                          repetitions);
  });
  return states;
}

}  // namespace

Matrix gram(const MatrixRef& a, const MatrixRef& b, int repetitions,
            bool symmetrize, int threads) {
  if (a.cols() != b.cols()) throw ShapeError("kernel inputs differ in width");
  const auto sa = iqp_states(a, repetitions, threads);
  const auto sb = iqp_states(b, repetitions, threads);
  Matrix k(a.rows(), b.rows());
  parallel_for(sa.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < sb.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          qsim::overlap_sq(sa[i], sb[j]);
    }
  });
  if (symmetrize) {
    if (k.rows() != k.cols()) throw ShapeError("cannot symmetrize a rectangular kernel");
    k = (0.5 * (k + k.transpose())).eval();
  }
  return k;
}

Matrix gram(const MatrixRef& a, int repetitions, int threads) {
  return gram(a, a, repetitions, true, threads);
}

Matrix psd_project(const MatrixRef& k) {
  if (k.rows() != k.cols()) throw ShapeError("PSD projection of a non-square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(k);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed during PSD projection");
  }
  if (solver.eigenvalues().minCoeff() >= -1e-10) return k;
  const Vector clipped = solver.eigenvalues().cwiseMax(0.0);
  const Matrix& v = solver.eigenvectors();
  Matrix out = v * clipped.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Vector SvmDual::decision(const MatrixRef& k_rows_by_train) const {
  if (k_rows_by_train.cols() != alpha.size()) {
    throw ShapeError("kernel columns must match the training set");
  }
  const Vector coef = alpha.cwiseProduct(signed_labels);
  return (k_rows_by_train * coef).array() + bias;
}

double SvmDual::dual_objective(const MatrixRef& k_train) const {
  const Vector coef = alpha.cwiseProduct(signed_labels);
  return alpha.sum() - 0.5 * coef.dot(k_train * coef);
}

SvmDual fit_weighted_svm(const MatrixRef& k_train, const LabelsRef& y, double C,
                         double tolerance) {
  constexpr double kTau = 1e-12;
  const auto n = k_train.rows();
  if (k_train.cols() != n || y.size() != n) {
    throw ShapeError("SVM kernel must be square and match the labels");
  }
  if (!(C > 0.0)) throw ConfigError("C must be positive");
  require_both_classes(y, "SVM training");

  const auto kappa = balanced_class_weights(y);
  SvmDual dual;
  dual.alpha = Vector::Zero(n);
  dual.upper.resize(n);
  dual.signed_labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dual.signed_labels[i] = y[i] == 1 ? 1.0 : -1.0;
    dual.upper[i] = C * kappa[y[i]];
  }
  const Vector& s = dual.signed_labels;
  Vector& a = dual.alpha;
  const Vector& ub = dual.upper;
  auto at_upper = [&](Eigen::Index t) { return a[t] >= ub[t]; };
  auto at_lower = [&](Eigen::Index t) { return a[t] <= 0.0; };
  auto q = [&](Eigen::Index i, Eigen::Index j) { return s[i] * s[j] * k_train(i, j); };

  // Gradient of 1/2 a'Qa - e'a.
  Vector grad = Vector::Constant(n, -1.0);
  const long max_iterations = std::max<long>(10000000L, 100L * n);
  long it = 0;
  for (; it < max_iterations; ++it) {
    // Working set: i maximizes -y G over I_up, j gives the best second-order
    // decrease over I_low.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (s[t] > 0 ? !at_upper(t) : !at_lower(t)) {
        const double v = -s[t] * grad[t];
        if (v >= gmax) {
          gmax = v;
          i = t;
        }
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (s[t] > 0 ? !at_lower(t) : !at_upper(t)) {
        const double v = s[t] * grad[t];
        gmax2 = std::max(gmax2, v);
        const double diff = gmax + v;
        if (i >= 0 && diff > 0.0) {
          double quad = k_train(i, i) + k_train(t, t) - 2.0 * k_train(i, t);
          if (quad <= 0.0) quad = kTau;
          const double gain = -(diff * diff) / quad;
          if (gain <= best_gain) {
            best_gain = gain;
            j = t;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) break;

    const double old_i = a[i];
    const double old_j = a[j];
    const double ci = ub[i];
    const double cj = ub[j];
    if (s[i] != s[j]) {
      double quad = k_train(i, i) + k_train(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) { a[j] = 0; a[i] = diff; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
      }
      if (diff > ci - cj) {
        if (a[i] > ci) { a[i] = ci; a[j] = ci - diff; }
      } else {
        if (a[j] > cj) { a[j] = cj; a[i] = cj + diff; }
      }
    } else {
      double quad = k_train(i, i) + k_train(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > ci) {
        if (a[i] > ci) { a[i] = ci; a[j] = sum - ci; }
      } else {
        if (a[j] < 0) { a[j] = 0; a[i] = sum; }
      }
      if (sum > cj) {
        if (a[j] > cj) { a[j] = cj; a[i] = sum - cj; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = sum; }
      }
    }
    const double di = a[i] - old_i;
    const double dj = a[j] - old_j;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += q(t, i) * di + q(t, j) * dj;
    }
  }
  dual.iterations = it;

  // Bias: mean over free vectors, else midpoint of the feasible interval.
  double upper_bound = std::numeric_limits<double>::infinity();
  double lower_bound = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = s[t] * grad[t];
    if (at_upper(t)) {
      if (s[t] < 0) upper_bound = std::min(upper_bound, yg);
      else lower_bound = std::max(lower_bound, yg);
    } else if (at_lower(t)) {
      if (s[t] > 0) upper_bound = std::min(upper_bound, yg);
      else lower_bound = std::max(lower_bound, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho =
      free_count > 0 ? free_sum / double(free_count) : 0.5 * (upper_bound + lower_bound);
  dual.bias = -rho;

  for (Eigen::Index t = 0; t < n; ++t) {
    if (a[t] > 0.0) dual.support.push_back(t);
  }
  if (dual.support.empty()) throw NumericError("SVM solution has no support vectors");
  return dual;
}

Vector PlattScaler::apply(const VectorRef& scores) const {
  return scores.unaryExpr([&](double v) { return hybrid::sigmoid(A * v + B); });
}

PlattScaler platt_calibrate(const VectorRef& scores, const LabelsRef& y) {
  if (scores.size() != y.size()) throw ShapeError("score/label length mismatch");
  if (!scores.allFinite()) throw DataError("non-finite decision score");
  require_both_classes(y, "Platt scaling");

  const double n = double(y.size());
  const double pos = double(y.sum());
  const double neg = n - pos;
  const double t_pos = (pos + 1.0) / (pos + 2.0);
  const double t_neg = 1.0 / (neg + 2.0);
  Vector target(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) target[i] = y[i] == 1 ? t_pos : t_neg;

  auto objective = [&](double A, double B) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      const double f = A * scores[i] + B;
      // -(t log p + (1 - t) log(1 - p)) with p = sigma(f).
      const double log1pexp = f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
      total += log1pexp - target[i] * f;
    }
    return total / n;
  };

  PlattScaler out;
  out.A = 0.0;
  out.B = std::log((pos + 1.0) / (neg + 1.0));
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      const double p = hybrid::sigmoid(out.A * scores[i] + out.B);
      const Eigen::Vector2d u(scores[i], 1.0);
      g += (p - target[i]) * u;
      h += p * (1.0 - p) * u * u.transpose();
    }
    g /= n;
    h /= n;
    if (g.norm() < 1e-8) break;
    h.diagonal().array() += 1e-12;
    const Eigen::Vector2d step = h.ldlt().solve(-g);
    const double f0 = objective(out.A, out.B);
    double t = 1.0;
    while (t > 1e-10 &&
           objective(out.A + t * step[0], out.B + t * step[1]) > f0 + 1e-4 * t * g.dot(step)) {
      t *= 0.5;
    }
    if (t <= 1e-10) break;
    out.A += t * step[0];
    out.B += t * step[1];
  }
  return out;
}

QsvmResult qsvm_fit_predict(const MatrixRef& train_x, const LabelsRef& train_y,
                            const MatrixRef& test_x, int repetitions,
                            std::uint64_t seed, int threads) {
  QsvmResult result;
  const auto start = Clock::now();

  Matrix k = gram(train_x, repetitions, threads);
  {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(k, Eigen::EigenvaluesOnly);
    result.min_eigenvalue_before = solver.eigenvalues().minCoeff();
  }
  const Matrix projected = psd_project(k);
  result.projected = result.min_eigenvalue_before < -1e-10;
  k = projected;

  // Platt parameters come from a stratified 80/20 holdout inside the
  // training subset; the final SVM is refit on every training row.
  const auto [fit_rows, hold_rows] = data::stratified_indices(train_y, 0.2, seed);
  const Labels y_all = train_y;
  const Matrix k_fit = k(fit_rows, fit_rows);
  const auto inner = fit_weighted_svm(k_fit, y_all(fit_rows));
  const Vector hold_scores = inner.decision(k(hold_rows, fit_rows));
  result.platt = platt_calibrate(hold_scores, y_all(hold_rows));
  const auto svm = fit_weighted_svm(k, train_y);
  result.train_seconds = seconds_since(start);

  const auto predict_start = Clock::now();
  const Matrix k_test = gram(test_x, train_x, repetitions, false, threads);
  result.test_scores = svm.decision(k_test);
  result.test_probabilities = result.platt.apply(result.test_scores);
  result.predict_seconds = seconds_since(predict_start);
  return result;
}

std::string kernel_csv(const MatrixRef& k) {
  std::string out;
  char cell[32];
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      std::snprintf(cell, sizeof cell, j + 1 < k.cols() ? "%.17g," : "%.17g\n",
                    k(i, j));
      out += cell;
    }
  }
  return out;
}

}  // namespace qlr::baselines
