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

#include "qlr/circuits.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace qlr::circuits {

namespace {

std::atomic<long> g_degenerate_amplitude{0};

void check_finite(const VectorRef& x) {
  if (!x.allFinite()) throw DataError("non-finite feature value");
}

void check_features(const VectorRef& x) {
  if (x.size() != kNumFeatures) {
    throw ShapeError("expected " + std::to_string(kNumFeatures) +
                     " features, got " + std::to_string(x.size()));
  }
  check_finite(x);
}

}  // namespace

std::string to_string(Encoding kind) {
  switch (kind) {
    case Encoding::Angle:
      return "angle";
    case Encoding::Amplitude:
      return "amplitude";
    case Encoding::Reupload:
      return "reupload";
  }
  return "unknown";
}

Encoding encoding_from_string(std::string_view name) {
  if (name == "angle") return Encoding::Angle;
  if (name == "amplitude") return Encoding::Amplitude;
  if (name == "reupload" || name == "dr") return Encoding::Reupload;
  throw ConfigError("unknown encoding '" + std::string(name) + "'");
}

EncodingVariant EncodingVariant::make(Encoding kind, double alpha) {
  return {kind, kind == Encoding::Amplitude ? 3 : 8, alpha};
}

VariationalParams::VariationalParams(int depth, int n_qubits)
    : depth(depth), n_qubits(n_qubits) {
  if (depth < 1) throw ConfigError("circuit depth must be >= 1");
  if (n_qubits < 1 || n_qubits > qsim::kMaxQubits) {
    throw ConfigError("qubit count outside [1, 8]");
  }
  theta = Vector::Zero(static_cast<Eigen::Index>(depth) * n_qubits * 2);
}

Matrix VariationalParams::layer(int l) const {
  Matrix out(n_qubits, 2);
  for (int q = 0; q < n_qubits; ++q) {
    out(q, 0) = at(l, q, 0);
    out(q, 1) = at(l, q, 1);
  }
  return out;
}

void CircuitSpec::append(const CircuitSpec& other) {
  if (other.n_qubits != n_qubits) {
    throw ShapeError("appending a circuit on a different register size");
  }
  if (other.initial_amplitudes) {
    throw ShapeError("amplitude load must be the first step of a circuit");
  }
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

CircuitSpec encode_angle(const VectorRef& x, double alpha) {
  check_finite(x);
  const auto n = static_cast<int>(x.size());
  if (n < 1 || n > qsim::kMaxQubits) {
    throw ShapeError("angle encoding needs 1..8 features");
  }
  CircuitSpec spec{n, std::nullopt, {}};
  spec.gates.reserve(n);
  for (int q = 0; q < n; ++q) {
    spec.gates.push_back(qsim::Gate::ry(q, alpha * x[q]));
  }
  return spec;
}

Vector encode_amplitude(const VectorRef& x, bool* degenerate) {
  check_finite(x);
  const double norm = x.norm();
  if (degenerate) *degenerate = norm < 1e-9;
  if (norm < 1e-9) {
    g_degenerate_amplitude.fetch_add(1, std::memory_order_relaxed);
    return Vector::Constant(x.size(), 1.0 / std::sqrt(double(x.size())));
  }
  return x / norm;
}

long degenerate_amplitude_inputs() {
  return g_degenerate_amplitude.load(std::memory_order_relaxed);
}

CircuitSpec variational_block(const MatrixRef& theta_l, int layer_index,
                              const EncodingVariant& variant,
                              bool is_final_layer, int param_offset) {
  const int n = variant.n_qubits;
  if (theta_l.rows() != n || theta_l.cols() != 2) {
    throw ShapeError("layer angles must be " + std::to_string(n) + " x 2");
  }
  if (layer_index < 1) throw ConfigError("layer index is 1-based");
  CircuitSpec spec{n, std::nullopt, {}};
  for (int q = 0; q < n; ++q) {
    spec.gates.push_back(qsim::Gate::ry(q, theta_l(q, 0), param_offset + 2 * q));
    spec.gates.push_back(
        qsim::Gate::rz(q, theta_l(q, 1), param_offset + 2 * q + 1));
  }
  if (variant.kind == Encoding::Reupload) {
    if (is_final_layer) return spec;
    // Brick pattern: odd layers pair (0,1)(2,3)..., even layers (1,2)(3,4)...
    const int start = (layer_index % 2 == 1) ? 0 : 1;
    for (int q = start; q + 1 < n + start; q += 2) {
      spec.gates.push_back(qsim::Gate::cz(q % n, (q + 1) % n));
    }
  } else {
    for (int q = 0; q < n; ++q) {
      spec.gates.push_back(qsim::Gate::cz(q, (q + 1) % n));
    }
  }
  return spec;
}

CircuitSpec assemble_circuit(const VectorRef& x,
                             const VariationalParams& params,
                             const EncodingVariant& variant) {
  check_features(x);
  if (params.depth < 1) throw ConfigError("circuit depth must be >= 1");
  if (params.n_qubits != variant.n_qubits) {
    throw ShapeError("parameter register does not match the encoding");
  }
  const int n = variant.n_qubits;
  const int L = params.depth;
  CircuitSpec circuit{n, std::nullopt, {}};
  switch (variant.kind) {
    case Encoding::Angle:
      circuit = encode_angle(x, variant.alpha);
      break;
    case Encoding::Amplitude:
      circuit.initial_amplitudes = encode_amplitude(x);
      break;
    case Encoding::Reupload:
      break;
  }
  for (int l = 0; l < L; ++l) {
    if (variant.kind == Encoding::Reupload) {
      circuit.append(encode_angle(x, variant.alpha));
    }
    circuit.append(variational_block(params.layer(l), l + 1, variant,
                                     l == L - 1, l * n * 2));
  }
  return circuit;
}

qsim::State simulate(const CircuitSpec& circuit) {
  qsim::State state = circuit.initial_amplitudes
                          ? qsim::load_amplitudes(*circuit.initial_amplitudes)
                          : qsim::State(circuit.n_qubits);
  qsim::apply(state, circuit.gates);
  return state;
}

Vector quantum_features(const VectorRef& x, const VariationalParams& params,
                        const EncodingVariant& variant) {
  return qsim::expectation_z_all(simulate(assemble_circuit(x, params, variant)));
}

Matrix feature_jacobian(const VectorRef& x, const VariationalParams& params,
                        const EncodingVariant& variant) {
  return evaluate_with_jacobian(x, params, variant).jacobian;
}

FeatureEvaluation evaluate_with_jacobian(const VectorRef& x,
                                         const VariationalParams& params,
                                         const EncodingVariant& variant) {
  constexpr double kShift = std::numbers::pi / 2;
  const CircuitSpec circuit = assemble_circuit(x, params, variant);
  const auto n_params = params.size();

  std::vector<std::size_t> position(n_params, 0);
  std::vector<qsim::State> before;
  before.reserve(n_params);

  qsim::State state = circuit.initial_amplitudes
                          ? qsim::load_amplitudes(*circuit.initial_amplitudes)
                          : qsim::State(circuit.n_qubits);
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const auto& gate = circuit.gates[g];
    if (gate.param >= 0) {
      // Parameters are emitted in increasing order, one gate each.
      position[gate.param] = g;
      before.push_back(state);
    }
    qsim::apply(state, gate);
  }

  FeatureEvaluation out;
  out.z = qsim::expectation_z_all(state);
  out.jacobian = Matrix::Zero(circuit.n_qubits, n_params);

  qsim::State shifted(circuit.n_qubits);
  for (Eigen::Index j = 0; j < n_params; ++j) {
    const std::size_t g = position[j];
    Vector plus, minus;
    for (const double sign : {+1.0, -1.0}) {
      shifted = before[j];
      qsim::Gate gate = circuit.gates[g];
      gate.angle += sign * kShift;
      qsim::apply(shifted, gate);
      for (std::size_t k = g + 1; k < circuit.gates.size(); ++k) {
        qsim::apply(shifted, circuit.gates[k]);
      }
      (sign > 0 ? plus : minus) = qsim::expectation_z_all(shifted);
    }
    out.jacobian.col(j) = (plus - minus) / 2.0;
  }
  return out;
}

}  // namespace qlr::circuits
