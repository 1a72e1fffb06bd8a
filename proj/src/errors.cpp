#include "liouplan/errors.hpp"

#include <sstream>

namespace liouplan {

namespace {

std::string structure_message(StructureError::Kind kind, const std::string& var,
                              const std::string& reason) {
  return std::string(to_string(kind)) + "(" + var + "): " + reason;
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(StructureError::Kind kind) {
  switch (kind) {
    case StructureError::Kind::NotChain: return "NotChain";
    case StructureError::Kind::NotLinear: return "NotLinear";
    case StructureError::Kind::AffineOffset: return "AffineOffset";
    case StructureError::Kind::OpenSubsystem: return "OpenSubsystem";
  }
  return "Unknown";
}

StructureError::StructureError(Kind kind, std::string var, std::string reason)
    : std::runtime_error(structure_message(kind, var, reason)),
      kind_(kind),
      var_(std::move(var)),
      reason_(std::move(reason)) {}

ParseError::ParseError(std::size_t offset, std::string expected, const std::string& detail)
    : InputError("syntax error at offset " + std::to_string(offset) + ": " + detail +
                 (expected.empty() ? std::string() : " (expected " + expected + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

UnboundVariable::UnboundVariable(std::string name)
    : InputError("unbound variable '" + name + "'"), name_(std::move(name)) {}

DomainError::DomainError(std::string node, double value, std::string context)
    : NumericError("domain error in " + node + " at value " + format_value(value) +
                   (context.empty() ? std::string() : " [" + context + "]")),
      node_(std::move(node)),
      value_(value) {}

NonFiniteSample::NonFiniteSample(std::size_t index)
    : NumericError("non-finite integrand sample at index " + std::to_string(index)),
      index_(index) {}

NonFiniteState::NonFiniteState(double t)
    : NumericError("non-finite state at t = " + format_value(t)), t_(t) {}

DomainExit::DomainExit(double t, const std::string& what)
    : NumericError("trajectory left the half-angle domain at t = " + format_value(t) + ": " +
                   what),
      t_(t) {}

}  // namespace liouplan
