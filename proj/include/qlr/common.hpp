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
 * @file common.hpp
 * Shared Eigen aliases and the exception hierarchy used across qlrkit.
 */
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace qlr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = Eigen::VectorXi;

using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using LabelsRef = Eigen::Ref<const Eigen::VectorXi>;

/// Number of HTRU-2 input features.
inline constexpr int kNumFeatures = 8;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range sizes, depths or option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid or coinciding qubit indices.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Length or dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot support the requested operation (one class, NaN, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A QLR record has no baseline partner for the same seed.
class PairingError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlr
