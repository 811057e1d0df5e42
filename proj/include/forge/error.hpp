#ifndef FORGE_ERROR_HPP
#define FORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace forge {

/// Malformed input (bad literal, bad JSON shape). CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition of an operation does not hold. CLI exit code 2.
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

class DimensionMismatch : public PreconditionError {
 public:
  explicit DimensionMismatch(const std::string& what) : PreconditionError(what) {}
};

class BasisMismatch : public PreconditionError {
 public:
  explicit BasisMismatch(const std::string& what = "elements belong to different bases")
      : PreconditionError(what) {}
};

/// An iteration or enumeration cap was hit before the computation finished.
class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace forge

#endif  // FORGE_ERROR_HPP
