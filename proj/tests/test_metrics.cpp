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

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qlr;
using namespace qlr::metrics;

namespace {

struct Instance {
  Vector s;
  Labels y;
};

/// Random scores with coarse rounding so ties occur; both classes present.
Instance random_instance(std::mt19937_64& rng, int n, double pos_rate, int levels) {
  std::uniform_real_distribution<double> u(0, 1);
  Instance out{Vector(n), Labels(n)};
  for (int i = 0; i < n; ++i) {
    out.y[i] = u(rng) < pos_rate;
    const double raw = std::clamp(u(rng) * 0.7 + 0.3 * out.y[i], 0.0, 1.0);
    out.s[i] = levels > 0 ? std::round(raw * levels) / levels : raw;
  }
  out.y[0] = 1;
  out.y[1] = 0;
  return out;
}

}  // namespace

TEST_CASE("confusion_counts") {
  const Labels y{{1, 1, 0, 0}};
  const auto perfect = confusion_counts(Vector{{0.9, 0.8, 0.2, 0.1}}, y, 0.5);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);
  const auto all = confusion_counts(Vector{{0.9, 0.4, 0.6, 0.1}}, y, 0.0);
  CHECK(all.tn == 0);
  CHECK(all.fn == 0);
  const auto c = confusion_counts(Vector{{0.9, 0.4, 0.6, 0.1}}, y, 0.5);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
  CHECK(c.total() == 4);
  // Ties at the threshold go to the positive class.
  CHECK(confusion_counts(Vector{{0.5}}, Labels{{1}}, 0.5).tp == 1);
  CHECK_THROWS_AS(confusion_counts(Vector::Zero(3), y, 0.5), ShapeError);
}

TEST_CASE("threshold_metrics") {
  const auto half = threshold_metrics({1, 1, 1, 1});
  CHECK(half.precision == 0.5);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == 0.5);
  CHECK(half.fnr == 0.5);
  CHECK(half.fpr == 0.5);

  ConfusionCounts perfect;
  perfect.tp = 3;
  perfect.tn = 5;
  const auto p = threshold_metrics(perfect);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);
  CHECK(p.fnr == 0.0);
  CHECK(p.fpr == 0.0);
  CHECK_FALSE(p.no_predicted_positives);

  ConfusionCounts none;
  none.fn = 2;
  none.tn = 4;
  const auto d = threshold_metrics(none);
  CHECK(d.precision == 0.0);
  CHECK(d.no_predicted_positives);

  ConfusionCounts nopos;
  nopos.tn = 3;
  const auto e = threshold_metrics(nopos);
  CHECK(e.recall == 0.0);
  CHECK(e.fnr == 1.0);
  CHECK(e.no_actual_positives);
}

TEST_CASE("roc_auc") {
  const Labels y{{1, 1, 0, 0}};
  CHECK(roc_auc(Vector{{0.9, 0.8, 0.2, 0.1}}, y) == 1.0);
  CHECK(roc_auc(Vector::Constant(4, 0.3), y) == 0.5);
  CHECK(roc_auc(Vector{{0.9, 0.7, 0.8, 0.6}}, y) == 0.75);
  CHECK_THROWS_AS(roc_auc(Vector::Zero(2), Labels::Ones(2)), DataError);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto inst = random_instance(rng, 5 + t * 3, 0.3, t % 2 ? 10 : 0);
    CHECK(std::abs(roc_auc(inst.s, inst.y) - oracle::roc_auc_pairs(inst.s, inst.y)) < 1e-12);
  }
}

TEST_CASE("average_precision") {
  CHECK(average_precision(Vector{{0.9, 0.8, 0.2, 0.1}}, Labels{{1, 1, 0, 0}}) == 1.0);
  CHECK(average_precision(Vector{{0.9, 0.8, 0.7, 0.6}}, Labels{{1, 0, 1, 0}}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(average_precision(Vector::Zero(3), Labels::Zero(3)), DataError);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto inst = random_instance(rng, 5 + t * 3, 0.2, t % 2 ? 8 : 0);
    CHECK(std::abs(average_precision(inst.s, inst.y) -
                   oracle::average_precision_steps(inst.s, inst.y)) < 1e-12);
  }
}

TEST_CASE("rank metrics are invariant under increasing transforms") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng, 60, 0.25, t % 2 ? 12 : 0);
    const Vector lin = 2.0 * inst.s.array() + 1.0;
    const Vector th = inst.s.array().tanh();
    const double auc = roc_auc(inst.s, inst.y);
    const double ap = average_precision(inst.s, inst.y);
    CHECK(std::abs(roc_auc(lin, inst.y) - auc) < 1e-12);
    CHECK(std::abs(roc_auc(th, inst.y) - auc) < 1e-12);
    CHECK(std::abs(average_precision(lin, inst.y) - ap) < 1e-12);
    CHECK(std::abs(average_precision(th, inst.y) - ap) < 1e-12);
  }
}

TEST_CASE("recall_at_fpr examples") {
  const Labels y{{1, 1, 0, 0, 0}};
  const auto sep = recall_at_fpr(Vector{{0.9, 0.8, 0.3, 0.2, 0.1}}, y, 0.01);
  CHECK(sep.recall == 1.0);
  CHECK(sep.fpr == 0.0);
  CHECK(sep.threshold == 0.8);
  CHECK_FALSE(sep.sentinel);

  const auto flat = recall_at_fpr(Vector::Constant(5, 0.4), y, 0.05);
  CHECK(flat.recall == 0.0);
  CHECK(flat.fnr == 1.0);
  CHECK(flat.sentinel);
  CHECK(flat.threshold > 0.4);

  // 10 negatives, alpha = 0.05: no false positive allowed.
  Vector s(14);
  Labels y14 = Labels::Zero(14);
  for (int i = 0; i < 14; ++i) s[i] = 0.05 * i;
  y14[13] = 1;
  y14[11] = 1;
  y14[6] = 1;
  y14[2] = 1;
  const auto op = recall_at_fpr(s, y14, 0.05);
  const auto want = oracle::best_recall_at_fpr(s, y14, 0.05);
  CHECK(op.fpr == 0.0);
  CHECK(op.recall == want.recall);
  CHECK(op.recall == 0.25);
}

TEST_CASE("recall_at_fpr matches exhaustive enumeration") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const int n = 4 + static_cast<int>(rng() % 197);
    const auto inst = random_instance(rng, n, 0.15 + 0.3 * (t % 3), t % 3 ? 20 : 0);
    for (double alpha : {0.01, 0.05, 0.2}) {
      const auto got = recall_at_fpr(inst.s, inst.y, alpha);
      const auto want = oracle::best_recall_at_fpr(inst.s, inst.y, alpha);
      CHECK(got.recall == want.recall);
      CHECK(got.fpr == want.fpr);
      CHECK(got.precision == want.precision);
      CHECK(got.sentinel == want.sentinel);
      CHECK(got.fnr == doctest::Approx(1.0 - want.recall).epsilon(1e-15));
      if (!want.sentinel) CHECK(got.threshold == want.threshold);
    }
  }
}

TEST_CASE("brier") {
  const Labels y{{1, 0}};
  CHECK(brier(Vector{{1.0, 0.0}}, y) == 0.0);
  CHECK(brier(Vector::Constant(2, 0.5), y) == 0.25);
  CHECK(brier(Vector{{0.8, 0.3}}, y) == doctest::Approx(0.065).epsilon(1e-15));
}

TEST_CASE("reliability_curve") {
  const Labels y{{1, 0, 0, 0}};
  const auto one = reliability_curve(Vector::Constant(4, 0.5), y);
  REQUIRE(one.size() == 1);
  CHECK(one[0].confidence == 0.5);
  CHECK(one[0].frequency == 0.25);
  CHECK(one[0].count == 4);

  const auto top = reliability_curve(Vector{{1.0}}, Labels{{1}});
  REQUIRE(top.size() == 1);
  CHECK(top[0].index == 15);

  std::mt19937_64 rng(5);
  const auto inst = random_instance(rng, 300, 0.2, 0);
  long total = 0;
  for (const auto& b : reliability_curve(inst.s, inst.y)) {
    total += b.count;
    CHECK(b.count > 0);
    CHECK(b.confidence >= double(b.index - 1) / 15.0);
    CHECK(b.confidence <= double(b.index) / 15.0);
    CHECK(b.frequency >= 0.0);
    CHECK(b.frequency <= 1.0);
  }
  CHECK(total == 300);

  const auto csv = reliability_csv(one);
  CHECK(csv.rfind("bin,count,conf,freq\n", 0) == 0);
}

TEST_CASE("ece") {
  Labels y = Labels::Zero(10);
  y.head(2).setOnes();
  CHECK(ece(Vector::Constant(10, 0.2), y) == 0.0);
  const Vector anti = 1.0 - y.cast<double>().array();
  CHECK(ece(anti, y) == 1.0);
  CHECK(ece(Vector{{0.8, 0.8, 0.2, 0.2}}, Labels{{1, 0, 0, 0}}) ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("murphy_decomposition examples") {
  Labels y = Labels::Zero(100);
  y.head(9).setOnes();
  const auto perfect = murphy_decomposition(y.cast<double>(), y);
  CHECK(perfect.reliability == 0.0);
  CHECK(perfect.binned_brier == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(perfect.resolution == doctest::Approx(perfect.uncertainty).epsilon(1e-15));
  CHECK(perfect.uncertainty == doctest::Approx(0.0819).epsilon(1e-12));

  const auto clim = murphy_decomposition(Vector::Constant(100, 0.09), y);
  CHECK(clim.reliability < 1e-30);
  CHECK(clim.resolution < 1e-30);
  CHECK(clim.binned_brier == doctest::Approx(0.09 * 0.91).epsilon(1e-12));
}

TEST_CASE("Murphy identity on random forecasts") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const int n = 10 + static_cast<int>(rng() % 300);
    Vector p(n);
    Labels y(n);
    for (int i = 0; i < n; ++i) {
      p[i] = t % 4 == 0 ? std::round(u(rng) * 15) / 15 : u(rng);
      y[i] = u(rng) < p[i];
    }
    const auto m = murphy_decomposition(p, y);
    CHECK(std::abs(m.reliability - m.resolution + m.uncertainty - m.binned_brier) < 1e-12);
    CHECK(std::abs(m.binned_brier - oracle::binned_forecast_brier(p, y)) < 1e-12);
    CHECK(m.reliability >= 0.0);
    CHECK(m.resolution >= 0.0);
    CHECK(m.resolution <= m.uncertainty + 1e-12);
    CHECK(m.within_variance >= 0.0);
    CHECK(std::abs(m.residual - (m.within_variance - 2 * m.within_covariance)) < 1e-12);
    CHECK(std::abs(m.residual - (brier(p, y) - m.binned_brier)) < 1e-12);
  }
}
