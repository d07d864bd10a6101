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
 * @file circuits.hpp
 * Encoding and variational circuit builders for the three QLR variants, and
 * evaluation of the Pauli-Z feature map with its parameter-shift Jacobian.
 */
#pragma once

#include "qlr/common.hpp"
#include "qlr/qsim.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlr::circuits {

enum class Encoding { Angle, Amplitude, Reupload };

std::string to_string(Encoding kind);
Encoding encoding_from_string(std::string_view name);

struct EncodingVariant {
  Encoding kind = Encoding::Angle;
  int n_qubits = 8;
  /// Radians per standardized feature unit (Angle and Reupload only).
  double alpha = 1.0;

  /// Builds a variant with the register size fixed by `kind`.
  static EncodingVariant make(Encoding kind, double alpha = 1.0);
};

/// Trainable rotation angles, flattened in (layer, qubit, [RY, RZ]) order.
struct VariationalParams {
  int depth = 1;
  int n_qubits = 8;
  Vector theta;

  VariationalParams() = default;
  VariationalParams(int depth, int n_qubits);

  Eigen::Index size() const { return theta.size(); }

  static Eigen::Index index(int n_qubits, int layer, int qubit, int k) {
    return (static_cast<Eigen::Index>(layer) * n_qubits + qubit) * 2 + k;
  }
  double& at(int layer, int qubit, int k) {
    return theta[index(n_qubits, layer, qubit, k)];
  }
  double at(int layer, int qubit, int k) const {
    return theta[index(n_qubits, layer, qubit, k)];
  }
  /// Angles of one layer as an n_qubits x 2 matrix.
  Matrix layer(int l) const;
};

struct CircuitSpec {
  int n_qubits = 0;
  /// Set for amplitude encoding: the state is loaded rather than prepared.
  std::optional<Vector> initial_amplitudes;
  std::vector<qsim::Gate> gates;

  /// Number of gates, counting an amplitude load as one step.
  std::size_t step_count() const {
    return gates.size() + (initial_amplitudes ? 1 : 0);
  }
  void append(const CircuitSpec& other);
};

CircuitSpec encode_angle(const VectorRef& x, double alpha);

/// x / ||x||, or the uniform vector when ||x|| < 1e-9. `degenerate` is set
/// when the fallback was used.
Vector encode_amplitude(const VectorRef& x, bool* degenerate = nullptr);

/// Number of degenerate amplitude inputs seen so far in this process.
long degenerate_amplitude_inputs();

/// One variational layer: RY then RZ on every qubit, followed by the
/// entangler. `layer_index` is 1-based. `param_offset` is the flat index of
/// this layer's first angle, attached to the emitted gates.
CircuitSpec variational_block(const MatrixRef& theta_l, int layer_index,
                              const EncodingVariant& variant,
                              bool is_final_layer, int param_offset = 0);

CircuitSpec assemble_circuit(const VectorRef& x,
                             const VariationalParams& params,
                             const EncodingVariant& variant);

qsim::State simulate(const CircuitSpec& circuit);

Vector quantum_features(const VectorRef& x, const VariationalParams& params,
                        const EncodingVariant& variant);

/// dz_q/dtheta_j by the two-term parameter-shift rule.
Matrix feature_jacobian(const VectorRef& x, const VariationalParams& params,
                        const EncodingVariant& variant);

struct FeatureEvaluation {
  Vector z;
  Matrix jacobian;
};

/// Features and Jacobian from one pass; shifted circuits resume from the
/// cached state just before the shifted gate.
FeatureEvaluation evaluate_with_jacobian(const VectorRef& x,
                                         const VariationalParams& params,
                                         const EncodingVariant& variant);

}  // namespace qlr::circuits
