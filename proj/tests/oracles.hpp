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

// Slow, direct reference implementations used only by the tests.

#pragma once

#include "qlr/common.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using qlr::Labels;
using qlr::Matrix;
using qlr::Vector;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Tensor product of per-qubit 2x2 factors, qubit 0 leftmost.
inline CMatrix tensor(const std::vector<CMatrix>& factors) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

/// `u` on qubit q of an n-qubit register, identity elsewhere.
inline CMatrix embed(int n, int q, const CMatrix& u) {
  std::vector<CMatrix> f(n, CMatrix::Identity(2, 2));
  f[q] = u;
  return tensor(f);
}

inline CMatrix ry_matrix(double t) {
  CMatrix m(2, 2);
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

inline CMatrix rz_matrix(double t) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(Complex(0, -t / 2));
  m(1, 1) = std::exp(Complex(0, t / 2));
  return m;
}

inline CMatrix h_matrix() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline CMatrix z_matrix() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = -1;
  return m;
}

/// |0><0| x I + |1><1| x Z on qubits (a, b).
inline CMatrix cz_matrix(int n, int a, int b) {
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  std::vector<CMatrix> first(n, CMatrix::Identity(2, 2));
  std::vector<CMatrix> second(n, CMatrix::Identity(2, 2));
  first[a] = p0;
  second[a] = p1;
  second[b] = z_matrix();
  return tensor(first) + tensor(second);
}

/// cos(t/2) I - i sin(t/2) Z_a Z_b.
inline CMatrix zz_matrix(int n, int a, int b, double t) {
  std::vector<CMatrix> f(n, CMatrix::Identity(2, 2));
  f[a] = z_matrix();
  f[b] = z_matrix();
  const Eigen::Index d = Eigen::Index{1} << n;
  return std::cos(t / 2) * CMatrix::Identity(d, d) -
         Complex(0, std::sin(t / 2)) * tensor(f);
}

inline CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(g(rng), g(rng));
  return v / v.norm();
}

// -- Metrics -------------------------------------------------------------------

inline double roc_auc_pairs(const Vector& s, const Labels& y) {
  double wins = 0;
  double pairs = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Precision and recall at every distinct threshold, highest first.
inline double average_precision_steps(const Vector& s, const Labels& y) {
  std::set<double, std::greater<>> thresholds(s.data(), s.data() + s.size());
  const double positives = y.sum();
  double prev_recall = 0;
  double ap = 0;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] == 1 ? tp : fp) += 1;
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

struct ThresholdChoice {
  double recall = 0, fpr = 0, precision = 0, threshold = 0;
  bool sentinel = false;
};

/// Tries every unique score and a threshold above all of them.
inline ThresholdChoice best_recall_at_fpr(const Vector& s, const Labels& y,
                                          double alpha) {
  std::vector<double> candidates(s.data(), s.data() + s.size());
  candidates.push_back(std::numeric_limits<double>::infinity());
  const double pos = y.sum();
  const double neg = static_cast<double>(y.size()) - pos;
  ThresholdChoice best;
  bool have = false;
  for (double t : candidates) {
    double tp = 0, fp = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] == 1 ? tp : fp) += 1;
    }
    const double fpr = fp / neg;
    if (fpr > alpha) continue;
    const double recall = tp / pos;
    const bool better = !have || recall > best.recall ||
                        (recall == best.recall && fpr < best.fpr) ||
                        (recall == best.recall && fpr == best.fpr &&
                         t > best.threshold);
    if (better) {
      have = true;
      best = {recall, fpr, tp + fp > 0 ? tp / (tp + fp) : 0.0, t,
              std::isinf(t)};
    }
  }
  return best;
}

/// Brier score of the forecast replaced by its bin mean, 15 equal bins.
inline double binned_forecast_brier(const Vector& p, const Labels& y, int bins = 15) {
  std::vector<double> sum(bins, 0.0);
  std::vector<int> count(bins, 0);
  std::vector<int> bin_of(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    int b = static_cast<int>(std::floor(p[i] * bins));
    b = std::clamp(b, 0, bins - 1);
    bin_of[i] = b;
    sum[b] += p[i];
    count[b] += 1;
  }
  double total = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double f = sum[bin_of[i]] / count[bin_of[i]];
    total += (f - y[i]) * (f - y[i]);
  }
  return total / static_cast<double>(p.size());
}

// -- Optimization ----------------------------------------------------------------

/// Central differences of a scalar function over every coordinate.
inline Vector finite_difference(const std::function<double(const Vector&)>& f,
                                const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

struct QpSolution {
  Vector alpha;
  double objective = -std::numeric_limits<double>::infinity();
};

/// Maximizes sum(a) - a^T Q a / 2 with 0 <= a <= c and y^T a = 0 by
/// enumerating every (lower, upper, free) assignment; N <= 8.
inline QpSolution svm_dual_bruteforce(const Matrix& k, const Vector& ysign,
                                      const Vector& c) {
  const int n = static_cast<int>(k.rows());
  const Matrix q = (ysign * ysign.transpose()).cwiseProduct(k);
  QpSolution best;
  std::vector<int> state(n, 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long rest = code;
    std::vector<int> free_idx;
    Vector a = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 3);
      rest /= 3;
      if (state[i] == 1) a[i] = c[i];
      if (state[i] == 2) free_idx.push_back(i);
    }
    const int f = static_cast<int>(free_idx.size());
    if (f > 0) {
      // Stationarity on the free block plus the equality constraint.
      Matrix sys = Matrix::Zero(f + 1, f + 1);
      Vector rhs(f + 1);
      for (int r = 0; r < f; ++r) {
        const int i = free_idx[r];
        double fixed = 0;
        for (int j = 0; j < n; ++j) {
          if (state[j] != 2) fixed += q(i, j) * a[j];
        }
        for (int s = 0; s < f; ++s) sys(r, s) = q(i, free_idx[s]);
        sys(r, f) = ysign[i];
        rhs[r] = 1.0 - fixed;
        sys(f, r) = ysign[i];
      }
      double fixed_eq = 0;
      for (int j = 0; j < n; ++j) {
        if (state[j] != 2) fixed_eq += ysign[j] * a[j];
      }
      rhs[f] = -fixed_eq;
      const Vector sol = sys.completeOrthogonalDecomposition().solve(rhs);
      if ((sys * sol - rhs).norm() > 1e-8) continue;
      for (int r = 0; r < f; ++r) a[free_idx[r]] = sol[r];
    }
    bool feasible = std::abs(ysign.dot(a)) < 1e-9;
    for (int i = 0; i < n && feasible; ++i) {
      feasible = a[i] >= -1e-9 && a[i] <= c[i] + 1e-9;
    }
    if (!feasible) continue;
    const double obj = a.sum() - 0.5 * a.dot(q * a);
    if (obj > best.objective) best = {a, obj};
  }
  return best;
}

}  // namespace oracle
