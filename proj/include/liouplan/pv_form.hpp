#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "liouplan/expr.hpp"

namespace liouplan {

/// Settings for deciding "identically zero" by random refutation.
struct ProbeOptions {
  std::uint64_t seed = 0x5eed;
  int samples = 64;
  double threshold = 1e-9;
  /// Default sampling interval for every variable.
  double lo = -1.5;
  double hi = 1.5;
  /// Per-variable intervals overriding [lo, hi].
  std::map<std::string, std::pair<double, double>, std::less<>> ranges;
};

/// True if `e` simplifies to the constant 0, or if no sample point refutes
/// |e| <= threshold. Sample points where `e` is undefined are redrawn; an
/// expression that cannot be evaluated anywhere is reported nonzero.
bool probably_zero(const Expr& e, const ProbeOptions& opts = {});
bool probably_one(const Expr& e, const ProbeOptions& opts = {});

enum class MatrixClass { UnitLowerTriangular, LowerTriangular, General };
const char* to_string(MatrixClass c);

/// The d x d matrix A(eta, u) of a linear extension d(xi)/dt = A xi,
/// with the extension-state names that index its rows and columns.
class PVForm {
 public:
  PVForm(std::vector<std::string> xi_names, std::vector<std::vector<Expr>> entries,
         ProbeOptions probe = {});

  std::size_t size() const noexcept { return xi_.size(); }
  const std::vector<std::string>& xi_names() const noexcept { return xi_; }
  const Expr& entry(std::size_t row, std::size_t col) const { return a_.at(row).at(col); }
  const ProbeOptions& probe() const noexcept { return probe_; }

  /// Recomputed from the entries on every call.
  MatrixClass classification() const;

 private:
  std::vector<std::string> xi_;
  std::vector<std::vector<Expr>> a_;
  ProbeOptions probe_;
};

MatrixClass classify_matrix(const PVForm& pv);

}  // namespace liouplan
