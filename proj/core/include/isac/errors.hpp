// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// Invalid configuration (bad config file, out-of-range settings).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate bistatic geometry (coincident nodes, impossible ellipse).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Estimation cannot proceed (e.g. empty measurement mask).
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be invertible is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isac
