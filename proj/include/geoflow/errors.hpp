#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

/// Raised when a 3-form fails the positivity test that defines a G2-structure.
class NotAG2Structure : public std::runtime_error {
 public:
  explicit NotAG2Structure(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a warped-product state loses positivity of ell or G.
class PositivityLost : public std::runtime_error {
 public:
  explicit PositivityLost(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an Einstein-ray Ricci flow is evaluated at or past its extinction time.
class ExtinctError : public std::runtime_error {
 public:
  explicit ExtinctError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed configurations and inputs that violate a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace geoflow
