#pragma once

#include <stdexcept>
#include <string>

namespace liouplan {

/// Malformed input: bad syntax, unknown names, invalid configuration.
/// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric failure while evaluating or integrating (exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural property the user asserted does not hold (exit code 1).
class StructureError : public std::runtime_error {
 public:
  enum class Kind { NotChain, NotLinear, AffineOffset, OpenSubsystem };

  StructureError(Kind kind, std::string var, std::string reason);

  Kind kind() const noexcept { return kind_; }
  const std::string& var() const noexcept { return var_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  Kind kind_;
  std::string var_;
  std::string reason_;
};

const char* to_string(StructureError::Kind kind);

class ParseError : public InputError {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& detail);

  std::size_t offset() const noexcept { return offset_; }
  /// Human-readable set of tokens that would have been accepted.
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnboundVariable : public InputError {
 public:
  explicit UnboundVariable(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DomainError : public NumericError {
 public:
  DomainError(std::string node, double value, std::string context = {});
  const std::string& node() const noexcept { return node_; }
  double value() const noexcept { return value_; }

 private:
  std::string node_;
  double value_;
};

class TruncationExceeded : public InputError {
 public:
  using InputError::InputError;
};

class ZeroAlpha : public InputError {
 public:
  using InputError::InputError;
};

class ZeroSurfaceFactor : public InputError {
 public:
  using InputError::InputError;
};

class SingularFit : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteSample : public NumericError {
 public:
  explicit NonFiniteSample(std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ExpOverflow : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteState : public NumericError {
 public:
  explicit NonFiniteState(double t);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Plate-ball trajectory left the region where the half-angle map is valid.
class DomainExit : public NumericError {
 public:
  DomainExit(double t, const std::string& what);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace liouplan
