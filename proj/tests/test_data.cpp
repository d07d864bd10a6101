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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <string>

using namespace qlr;
using namespace qlr::data;

namespace {

// Label-only dataset with the given class counts, positives first.
Dataset counts_only(long pos, long neg) {
  Dataset ds;
  ds.features = Matrix::Zero(pos + neg, kNumFeatures);
  ds.labels.resize(pos + neg);
  for (long i = 0; i < pos + neg; ++i) ds.labels[i] = i < pos ? 1 : 0;
  ds.ids.resize(pos + neg);
  for (long i = 0; i < pos + neg; ++i) ds.ids[i] = i;
  return ds;
}

std::set<long> id_set(const Dataset& ds) {
  return {ds.ids.begin(), ds.ids.end()};
}

}  // namespace

TEST_CASE("parse three rows") {
  const std::string text =
      "140.5,55.6,-0.23,-0.69,3.19,19.1,7.97,74.2,0\n"
      "102.5,58.8,0.46,-0.51,1.67,14.8,10.5,127.3,0\n"
      "99.3,41.5,1.33,1.80,5.12,25.0,4.20,20.1,1\n";
  const auto ds = parse_htru2(text);
  CHECK(ds.size() == 3);
  CHECK(ds.features.cols() == 8);
  CHECK(ds.positives() == 1);
  // canonical order puts 99.3 first
  CHECK(ds.features(0, 0) == 99.3);
  CHECK(ds.labels[0] == 1);
  CHECK(ds.features(2, 7) == 74.2);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_htru2("1,2,3,4,5,6,7,8\n"), FormatError);
  CHECK_THROWS_AS(parse_htru2("1,2,3,4,5,6,7,8,0,1\n"), FormatError);
  CHECK_THROWS_AS(parse_htru2(""), FormatError);
  try {
    parse_htru2("1,2,3,4,5,6,7,8,0\n1,2,x,4,5,6,7,8,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_htru2("1,2,3,4,5,6,7,8,2\n"), ParseError);
  CHECK_THROWS_AS(load_htru2("/nonexistent/htru.csv"), IoError);
}

TEST_CASE("row order does not change splits") {
  const auto ds = make_fixture(300, 4);
  const std::string csv = to_csv(ds);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < csv.size()) {
    const auto nl = csv.find('\n', start);
    lines.push_back(csv.substr(start, nl - start + 1));
    start = nl + 1;
  }
  std::reverse(lines.begin(), lines.end());
  std::string shuffled;
  for (const auto& l : lines) shuffled += l;
  const auto other = parse_htru2(shuffled);
  CHECK(other.features == ds.features);
  CHECK(other.labels == ds.labels);
  const auto [a_tr, a_te] = stratified_split(ds, 0.2, 9);
  const auto [b_tr, b_te] = stratified_split(other, 0.2, 9);
  CHECK(a_te.ids == b_te.ids);
  CHECK(membership_checksum(a_te.ids) == membership_checksum(b_te.ids));
}

TEST_CASE("stratified split properties") {
  const auto ds = make_fixture(500, 1);
  const auto [tr, te] = stratified_split(ds, 0.2, 0);
  CHECK(tr.size() + te.size() == ds.size());
  const auto a = id_set(tr), b = id_set(te);
  std::vector<long> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(both));
  CHECK(both.empty());
  CHECK(te.positives() == std::lround(0.2 * double(ds.positives())));
  CHECK(te.negatives() == std::lround(0.2 * double(ds.negatives())));

  const auto [tr2, te2] = stratified_split(ds, 0.2, 0);
  CHECK(te2.ids == te.ids);
  const auto [tr3, te3] = stratified_split(ds, 0.2, 1);
  CHECK(te3.ids != te.ids);

  CHECK_THROWS_AS(stratified_split(ds, 0.0, 0), ConfigError);
  CHECK_THROWS_AS(stratified_split(ds, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(stratified_split(counts_only(0, 50), 0.2, 0), DataError);
}

TEST_CASE("full-size split counts") {
  const auto ds = counts_only(kHtru2Positives, kHtru2Negatives);
  const auto [tr, te] = stratified_indices(ds.labels, 0.2, 0);
  // 0.2 * 1639 = 327.8 -> 328, 0.2 * 16259 = 3251.8 -> 3252
  CHECK(te.size() == 328 + 3252);
  CHECK(tr.size() == 1311 + 13007);
}

TEST_CASE("subsample counts") {
  const auto train = counts_only(1311, 13007);
  const auto sub = stratified_subsample(train, 1000, 0);
  // 1000 * 1311 / 14318 = 91.56
  CHECK(sub.positives() == 92);
  CHECK(sub.negatives() == 908);

  for (long n : {20L, 50L, 200L, 500L, 1000L}) {
    const auto s = stratified_subsample(train, n, 3);
    CHECK(s.size() == n);
    const double expected = double(n) * 1311.0 / 14318.0;
    CHECK(std::abs(double(s.positives()) - expected) <= 1.0);
    const auto ids = id_set(s);
    CHECK(ids.size() == static_cast<std::size_t>(n));
  }

  const auto fx = make_fixture(200, 2);
  const auto all = stratified_subsample(fx, 200, 5);
  CHECK(all.ids == fx.ids);
  CHECK(all.features == fx.features);

  CHECK(stratified_subsample(train, 300, 1).ids == stratified_subsample(train, 300, 1).ids);
  CHECK(stratified_subsample(train, 300, 1).ids != stratified_subsample(train, 300, 2).ids);
  CHECK_THROWS_AS(stratified_subsample(train, 0, 0), DataError);
  CHECK_THROWS_AS(stratified_subsample(fx, 201, 0), DataError);
}

TEST_CASE("standardizer") {
  const auto fx = make_fixture(400, 7);
  const auto s = fit_standardizer(fx.features);
  const Matrix z = s.apply(fx.features);
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double mean = z.col(c).mean();
    const double var = (z.col(c).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(var - 1.0) < 1e-12);
  }
  // population sd of (1, 3) is 1
  Matrix two(2, 8);
  two.row(0).setConstant(1.0);
  two.row(1).setConstant(3.0);
  const auto t = fit_standardizer(two);
  CHECK(t.stddev[0] == 1.0);
  CHECK(t.mean[5] == 2.0);

  Matrix flat = fx.features;
  flat.col(3).setConstant(2.5);
  CHECK_THROWS_AS(fit_standardizer(flat), DataError);
  CHECK_THROWS_AS(s.apply(Matrix::Zero(3, 7)), ShapeError);
}

TEST_CASE("membership checksum") {
  // FNV-1a of no bytes is the offset basis
  CHECK(membership_checksum({}) == 14695981039346656037ULL);

  // independent byte-wise FNV-1a over little-endian 64-bit ids
  auto fnv = [](const std::vector<long>& ids) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (long id : ids) {
      unsigned char bytes[8];
      std::memcpy(bytes, &id, 8);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  };
  CHECK(membership_checksum({3, 1, 2}) == fnv({1, 2, 3}));
  CHECK(membership_checksum({3, 1, 2}) == membership_checksum({1, 2, 3}));
  CHECK(membership_checksum({1, 2, 3}) != membership_checksum({1, 2, 4}));
}

TEST_CASE("fixture shape") {
  const auto fx = make_fixture(200, 0);
  CHECK(fx.size() == 200);
  CHECK(fx.positives() == 18);
  CHECK(fx.features.allFinite());
  const auto again = make_fixture(200, 0);
  CHECK(again.features == fx.features);
  CHECK(make_fixture(200, 1).features != fx.features);
  CHECK(parse_htru2(to_csv(fx)).features == fx.features);
  CHECK_THROWS_AS(make_fixture(5, 0), ConfigError);
}
