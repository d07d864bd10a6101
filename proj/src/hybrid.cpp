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

#include "qlr/hybrid.hpp"

#include "qlr/data.hpp"
#include "qlr/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace qlr::hybrid {

namespace {

constexpr double kClip = 1e-12;

enum Stream : std::uint32_t { kInitStream = 1, kShuffleStream = 2 };

std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

double clipped(double p) { return std::clamp(p, kClip, 1.0 - kClip); }

double sample_loss(double p, int y) {
  const double q = clipped(p);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

void check_labels(const LabelsRef& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) throw DataError("labels must be 0/1");
  }
}

}  // namespace

QlrModel QlrModel::initialize(const circuits::EncodingVariant& variant,
                              int depth, std::uint64_t seed) {
  QlrModel model;
  model.variant = variant;
  model.params = circuits::VariationalParams(depth, variant.n_qubits);
  model.w = Vector::Zero(variant.n_qubits);
  model.b = 0.0;
  model.seed = seed;
  auto engine = make_engine(seed, kInitStream);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  for (Eigen::Index j = 0; j < model.params.size(); ++j) {
    model.params.theta[j] = angle(engine);
  }
  return model;
}

Vector QlrModel::flat() const {
  Vector out(params.size() + w.size() + 1);
  out << params.theta, w, b;
  return out;
}

void QlrModel::set_flat(const VectorRef& values) {
  const auto nt = params.size();
  const auto nw = w.size();
  if (values.size() != nt + nw + 1) throw ShapeError("flat parameter size");
  params.theta = values.head(nt);
  w = values.segment(nt, nw);
  b = values[nt + nw];
}

Vector Gradients::flat() const {
  Vector out(theta.size() + w.size() + 1);
  out << theta, w, b;
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (patience < 1) throw ConfigError("patience must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
}

double decision_score(const VectorRef& z, const VectorRef& w, double b) {
  if (z.size() != w.size()) {
    throw ShapeError("feature/weight length mismatch: " +
                     std::to_string(z.size()) + " vs " +
                     std::to_string(w.size()));
  }
  return w.dot(z) + b;
}

double sigmoid(double score) {
  // Kept strictly inside (0, 1) even where the exact value rounds to 0 or 1.
  static const double kTop = std::nextafter(1.0, 0.0);
  static const double kBottom = std::numeric_limits<double>::denorm_min();
  double p;
  if (score >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-score));
  } else {
    const double e = std::exp(score);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kBottom, kTop);
}

double bce_loss(const VectorRef& probs, const LabelsRef& labels) {
  if (probs.size() != labels.size()) {
    throw ShapeError("probability/label length mismatch");
  }
  if (probs.size() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    total += sample_loss(probs[i], labels[i]);
  }
  return total / double(probs.size());
}

Gradients loss_gradients(const MatrixRef& batch_x, const LabelsRef& batch_y,
                         const QlrModel& model, int threads) {
  const auto n = batch_x.rows();
  if (n < 1) throw ShapeError("empty batch");
  if (batch_y.size() != n) throw ShapeError("batch label count mismatch");

  std::vector<Vector> theta_terms(n);
  std::vector<Vector> w_terms(n);
  std::vector<double> residuals(n);
  std::vector<double> losses(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    const Vector x = batch_x.row(i).transpose();
    const auto eval =
        circuits::evaluate_with_jacobian(x, model.params, model.variant);
    const double p = sigmoid(decision_score(eval.z, model.w, model.b));
    const double r = p - batch_y[i];
    residuals[k] = r;
    losses[k] = sample_loss(p, batch_y[i]);
    w_terms[k] = r * eval.z;
    theta_terms[k] = r * (eval.jacobian.transpose() * model.w);
  });

  Gradients g;
  g.theta = Vector::Zero(model.params.size());
  g.w = Vector::Zero(model.w.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    g.theta += theta_terms[i];
    g.w += w_terms[i];
    g.b += residuals[i];
    g.loss += losses[i];
  }
  const double inv = 1.0 / double(n);
  g.theta *= inv;
  g.w *= inv;
  g.b *= inv;
  g.loss *= inv;
  return g;
}

AdamOptimizer::AdamOptimizer(Eigen::Index size, double learning_rate,
                             double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Vector::Zero(size)),
      v_(Vector::Zero(size)) {}

void AdamOptimizer::step(Vector& params, const VectorRef& gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    throw ShapeError("Adam state size mismatch");
  }
  ++steps_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, double(steps_));
  const double c2 = 1.0 - std::pow(beta2_, double(steps_));
  params.array() -=
      lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

Vector predict_proba(const QlrModel& model, const MatrixRef& x, int threads) {
  Vector out(x.rows());
  parallel_for(static_cast<std::size_t>(x.rows()), threads, [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    const Vector z = circuits::quantum_features(x.row(i).transpose(),
                                                model.params, model.variant);
    out[i] = sigmoid(decision_score(z, model.w, model.b));
  });
  return out;
}

double evaluate_loss(const QlrModel& model, const MatrixRef& x,
                     const LabelsRef& y, int threads) {
  return bce_loss(predict_proba(model, x, threads), y);
}

FitResult fit(const MatrixRef& train_x, const LabelsRef& train_y,
              const TrainConfig& config,
              const circuits::EncodingVariant& variant, int depth) {
  config.validate();
  if (train_x.rows() != train_y.size()) throw ShapeError("row/label mismatch");
  check_labels(train_y);
  const long positives = train_y.sum();
  if (positives == 0 || positives == train_y.size()) {
    throw DataError("training subset contains a single class");
  }

  const auto start = std::chrono::steady_clock::now();
  auto [fit_rows, val_rows] = data::stratified_indices(
      train_y, config.validation_fraction, config.seed);

  Matrix val_x(static_cast<Eigen::Index>(val_rows.size()), train_x.cols());
  Labels val_y(static_cast<Eigen::Index>(val_rows.size()));
  for (std::size_t i = 0; i < val_rows.size(); ++i) {
    val_x.row(static_cast<Eigen::Index>(i)) = train_x.row(val_rows[i]);
    val_y[static_cast<Eigen::Index>(i)] = train_y[val_rows[i]];
  }

  FitResult result{QlrModel::initialize(variant, depth, config.seed), {}};
  QlrModel current = result.model;
  Vector flat = current.flat();
  AdamOptimizer adam(flat.size(), config.learning_rate);
  auto shuffle_engine = make_engine(config.seed, kShuffleStream);

  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<Eigen::Index> order(fit_rows);
  Matrix batch_x;
  Labels batch_y;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_engine);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const auto b = static_cast<Eigen::Index>(end - begin);
      batch_x.resize(b, train_x.cols());
      batch_y.resize(b);
      for (Eigen::Index k = 0; k < b; ++k) {
        batch_x.row(k) = train_x.row(order[begin + k]);
        batch_y[k] = train_y[order[begin + k]];
      }
      const Gradients g = loss_gradients(batch_x, batch_y, current, config.threads);
      epoch_loss += g.loss * double(b);
      adam.step(flat, g.flat());
      current.set_flat(flat);
    }
    result.history.train_loss.push_back(epoch_loss / double(order.size()));

    const double val = evaluate_loss(current, val_x, val_y, config.threads);
    result.history.val_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      result.model = current;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.history.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

std::string model_to_json(const QlrModel& model) {
  nlohmann::json doc;
  doc["variant"] = circuits::to_string(model.variant.kind);
  doc["depth"] = model.params.depth;
  doc["n_qubits"] = model.variant.n_qubits;
  doc["alpha"] = model.variant.alpha;
  doc["theta"] = std::vector<double>(model.params.theta.data(),
                                     model.params.theta.data() +
                                         model.params.theta.size());
  doc["w"] = std::vector<double>(model.w.data(), model.w.data() + model.w.size());
  doc["b"] = model.b;
  doc["seed"] = model.seed;
  return doc.dump(2);
}

QlrModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  try {
    const auto kind = circuits::encoding_from_string(doc.at("variant").get<std::string>());
    QlrModel model;
    model.variant = circuits::EncodingVariant::make(kind, doc.at("alpha").get<double>());
    if (doc.at("n_qubits").get<int>() != model.variant.n_qubits) {
      throw FormatError("n_qubits does not match the variant");
    }
    model.params = circuits::VariationalParams(doc.at("depth").get<int>(),
                                               model.variant.n_qubits);
    const auto theta = doc.at("theta").get<std::vector<double>>();
    const auto w = doc.at("w").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(theta.size()) != model.params.size() ||
        static_cast<int>(w.size()) != model.variant.n_qubits) {
      throw FormatError("parameter array lengths do not match depth/variant");
    }
    model.params.theta = Eigen::Map<const Vector>(theta.data(), theta.size());
    model.w = Eigen::Map<const Vector>(w.data(), w.size());
    model.b = doc.at("b").get<double>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model document: ") + e.what());
  }
}

void save_model(const QlrModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << model_to_json(model) << '\n';
}

QlrModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace qlr::hybrid
