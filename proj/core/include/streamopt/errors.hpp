#pragma once

#include <stdexcept>
#include <string>

namespace streamopt {

// All library failures derive from std::runtime_error so callers can catch
// one base type; the concrete type names the contract that was violated.

struct DegenerateUpdate : std::runtime_error {
  explicit DegenerateUpdate(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSchedule : std::runtime_error {
  explicit InvalidSchedule(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteIterate : std::runtime_error {
  explicit NonFiniteIterate(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidLabel : std::runtime_error {
  explicit InvalidLabel(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace streamopt
