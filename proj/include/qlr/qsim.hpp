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
 * @file qsim.hpp
 * Dense statevector simulator for up to eight qubits.
 *
 * Basis ordering: qubit 0 is the most significant bit of the basis index, so
 * on three qubits |i> with i = 4 is |100>. Gate conventions:
 *
 *   RY(t)  = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
 *   RZ(t)  = diag(exp(-i t/2), exp(+i t/2))
 *   H      = [[1, 1], [1, -1]] / sqrt(2)
 *   CZ     = diag(1, 1, 1, -1)
 *   ZZ(t)  = exp(-i t/2 Z_a Z_b)
 *
 * Gates are applied in place; callers wanting functional semantics copy the
 * state first (StateVector is a plain value type).
 */
#pragma once

#include "qlr/common.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace qlr::qsim {

inline constexpr int kMaxQubits = 8;

template <typename Scalar = double>
class StateVector {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// |0...0> on `n_qubits` qubits.
  explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
      throw ConfigError("qubit count " + std::to_string(n_qubits) +
                        " outside [1, 8]");
    }
    amplitudes_ = Amplitudes::Zero(Eigen::Index{1} << n_qubits);
    amplitudes_[0] = Complex(1);
  }

  int num_qubits() const { return n_qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Amplitudes& amplitudes() { return amplitudes_; }

  const Complex& operator[](Eigen::Index i) const { return amplitudes_[i]; }
  Complex& operator[](Eigen::Index i) { return amplitudes_[i]; }

  /// Bit mask selecting qubit `q` inside a basis index.
  Eigen::Index mask(int q) const {
    return Eigen::Index{1} << (n_qubits_ - 1 - q);
  }

  Scalar squared_norm() const { return amplitudes_.squaredNorm(); }

 private:
  int n_qubits_;
  Amplitudes amplitudes_;
};

using State = StateVector<double>;

enum class GateKind { RotY, RotZ, Hadamard, CZ, ZZRot };

/// One gate of a circuit. `param` is the index of the trainable angle this
/// gate carries, or -1 for fixed (data or structural) gates.
struct Gate {
  GateKind kind = GateKind::Hadamard;
  std::array<int, 2> targets{-1, -1};
  double angle = 0.0;
  int param = -1;

  static Gate ry(int q, double angle, int param = -1) {
    return {GateKind::RotY, {q, -1}, angle, param};
  }
  static Gate rz(int q, double angle, int param = -1) {
    return {GateKind::RotZ, {q, -1}, angle, param};
  }
  static Gate hadamard(int q) { return {GateKind::Hadamard, {q, -1}, 0.0, -1}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0, -1}; }
  static Gate zz(int a, int b, double angle) {
    return {GateKind::ZZRot, {a, b}, angle, -1};
  }

  bool is_two_qubit() const {
    return kind == GateKind::CZ || kind == GateKind::ZZRot;
  }
};

namespace detail {

inline void check_qubit(int n_qubits, int q) {
  if (q < 0 || q >= n_qubits) {
    throw IndexError("qubit index " + std::to_string(q) + " outside [0, " +
                     std::to_string(n_qubits) + ")");
  }
}

inline void check_pair(int n_qubits, int a, int b) {
  check_qubit(n_qubits, a);
  check_qubit(n_qubits, b);
  if (a == b) {
    throw IndexError("two-qubit gate on identical qubits " + std::to_string(a));
  }
}

}  // namespace detail

/// Single-qubit rotation about Y (`axis` = 'Y') or Z (`axis` = 'Z').
template <typename Scalar>
void apply_rotation(StateVector<Scalar>& state, int qubit, char axis,
                    Scalar angle) {
  detail::check_qubit(state.num_qubits(), qubit);
  using Complex = typename StateVector<Scalar>::Complex;
  const Eigen::Index m = state.mask(qubit);
  const Eigen::Index dim = state.dimension();
  auto& amp = state.amplitudes();
  const Scalar half = angle / Scalar(2);
  if (axis == 'Y' || axis == 'y') {
    const Scalar c = std::cos(half);
    const Scalar s = std::sin(half);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (i & m) continue;
      const Complex a0 = amp[i];
      const Complex a1 = amp[i | m];
      amp[i] = c * a0 - s * a1;
      amp[i | m] = s * a0 + c * a1;
    }
  } else if (axis == 'Z' || axis == 'z') {
    const Complex lo = std::polar(Scalar(1), -half);
    const Complex hi = std::polar(Scalar(1), half);
    for (Eigen::Index i = 0; i < dim; ++i) {
      amp[i] *= (i & m) ? hi : lo;
    }
  } else {
    throw ConfigError(std::string("unsupported rotation axis '") + axis + "'");
  }
}

template <typename Scalar>
void apply_hadamard(StateVector<Scalar>& state, int qubit) {
  detail::check_qubit(state.num_qubits(), qubit);
  using Complex = typename StateVector<Scalar>::Complex;
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  const Eigen::Index m = state.mask(qubit);
  auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    if (i & m) continue;
    const Complex a0 = amp[i];
    const Complex a1 = amp[i | m];
    amp[i] = r * (a0 + a1);
    amp[i | m] = r * (a0 - a1);
  }
}

template <typename Scalar>
void apply_cz(StateVector<Scalar>& state, int a, int b) {
  detail::check_pair(state.num_qubits(), a, b);
  const Eigen::Index both = state.mask(a) | state.mask(b);
  auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    if ((i & both) == both) amp[i] = -amp[i];
  }
}

template <typename Scalar>
void apply_zz_rotation(StateVector<Scalar>& state, int a, int b,
                       Scalar angle) {
  detail::check_pair(state.num_qubits(), a, b);
  using Complex = typename StateVector<Scalar>::Complex;
  const Eigen::Index ma = state.mask(a);
  const Eigen::Index mb = state.mask(b);
  const Complex equal = std::polar(Scalar(1), -angle / Scalar(2));
  const Complex differ = std::polar(Scalar(1), angle / Scalar(2));
  auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    const bool bit_a = (i & ma) != 0;
    const bool bit_b = (i & mb) != 0;
    amp[i] *= (bit_a == bit_b) ? equal : differ;
  }
}

template <typename Scalar>
void apply(StateVector<Scalar>& state, const Gate& gate) {
  const auto angle = static_cast<Scalar>(gate.angle);
  switch (gate.kind) {
    case GateKind::RotY:
      apply_rotation(state, gate.targets[0], 'Y', angle);
      break;
    case GateKind::RotZ:
      apply_rotation(state, gate.targets[0], 'Z', angle);
      break;
    case GateKind::Hadamard:
      apply_hadamard(state, gate.targets[0]);
      break;
    case GateKind::CZ:
      apply_cz(state, gate.targets[0], gate.targets[1]);
      break;
    case GateKind::ZZRot:
      apply_zz_rotation(state, gate.targets[0], gate.targets[1], angle);
      break;
  }
}

template <typename Scalar>
void apply(StateVector<Scalar>& state, const std::vector<Gate>& gates) {
  for (const auto& g : gates) apply(state, g);
}

inline State init_zero_state(int n_qubits) { return State(n_qubits); }

/// Loads real amplitudes; `values[i]` becomes the amplitude of basis |i>.
template <typename Derived>
State load_amplitudes(const Eigen::MatrixBase<Derived>& values) {
  const Eigen::Index len = values.size();
  int n = 0;
  while ((Eigen::Index{1} << n) < len) ++n;
  if (len < 2 || len > 256 || (Eigen::Index{1} << n) != len) {
    throw ShapeError("amplitude vector length " + std::to_string(len) +
                     " is not a power of two in [2, 256]");
  }
  const double norm = values.template cast<double>().norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw NormalizationError("amplitude vector has norm " +
                             std::to_string(norm));
  }
  State state(n);
  for (Eigen::Index i = 0; i < len; ++i) {
    state[i] = std::complex<double>(static_cast<double>(values[i]), 0.0);
  }
  return state;
}

/// <Z_q> = sum_i |a_i|^2 (+1 if bit q of i is 0, else -1).
template <typename Scalar>
Scalar expectation_z(const StateVector<Scalar>& state, int qubit) {
  detail::check_qubit(state.num_qubits(), qubit);
  const Eigen::Index m = state.mask(qubit);
  Scalar plus(0), minus(0);
  const auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    (i & m ? minus : plus) += std::norm(amp[i]);
  }
  return plus - minus;
}

/// All single-qubit Z expectations in one pass over the amplitudes.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expectation_z_all(
    const StateVector<Scalar>& state) {
  const int n = state.num_qubits();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  const auto& amp = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dimension(); ++i) {
    const Scalar p = std::norm(amp[i]);
    for (int q = 0; q < n; ++q) {
      z[q] += (i & state.mask(q)) ? -p : p;
    }
  }
  return z;
}

/// |<b|a>|^2.
template <typename Scalar>
Scalar overlap_sq(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw ShapeError("overlap of states on " + std::to_string(a.num_qubits()) +
                     " and " + std::to_string(b.num_qubits()) + " qubits");
  }
  return std::norm(b.amplitudes().dot(a.amplitudes()));
}

}  // namespace qlr::qsim
