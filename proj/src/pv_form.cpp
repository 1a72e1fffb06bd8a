#include "liouplan/pv_form.hpp"

#include <cmath>
#include <random>

#include "liouplan/errors.hpp"

namespace liouplan {

bool probably_zero(const Expr& e, const ProbeOptions& opts) {
  const Expr s = simplify(e);
  if (s.is_constant()) return s.value() == 0.0;

  const auto names = variables(s);
  std::mt19937_64 rng(opts.seed);
  Binding point;
  int accepted = 0;
  const int max_draws = opts.samples * 16;
  for (int draw = 0; draw < max_draws && accepted < opts.samples; ++draw) {
    for (const auto& n : names) {
      auto it = opts.ranges.find(n);
      const double lo = it == opts.ranges.end() ? opts.lo : it->second.first;
      const double hi = it == opts.ranges.end() ? opts.hi : it->second.second;
      point[n] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double v = 0.0;
    try {
      v = evaluate(s, point);
    } catch (const DomainError&) {
      continue;
    }
    if (std::fabs(v) > opts.threshold) return false;
    ++accepted;
  }
  return accepted > 0;
}

bool probably_one(const Expr& e, const ProbeOptions& opts) {
  return probably_zero(e - Expr::constant(1.0), opts);
}

const char* to_string(MatrixClass c) {
  switch (c) {
    case MatrixClass::UnitLowerTriangular: return "UnitLowerTriangular";
    case MatrixClass::LowerTriangular: return "LowerTriangular";
    case MatrixClass::General: return "General";
  }
  return "General";
}

PVForm::PVForm(std::vector<std::string> xi_names, std::vector<std::vector<Expr>> entries,
               ProbeOptions probe)
    : xi_(std::move(xi_names)), a_(std::move(entries)), probe_(std::move(probe)) {
  if (a_.size() != xi_.size()) throw InputError("PV matrix row count does not match xi");
  for (const auto& row : a_) {
    if (row.size() != xi_.size()) throw InputError("PV matrix must be square");
    for (const auto& entry : row) {
      for (const auto& x : xi_) {
        if (mentions(entry, x)) {
          throw InputError("PV matrix entry '" + to_string(entry) + "' mentions extension state '" +
                           x + "'");
        }
      }
    }
  }
}

MatrixClass PVForm::classification() const { return classify_matrix(*this); }

MatrixClass classify_matrix(const PVForm& pv) {
  const std::size_t d = pv.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (!probably_zero(pv.entry(i, j), pv.probe())) return MatrixClass::General;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!probably_one(pv.entry(i, i), pv.probe())) return MatrixClass::LowerTriangular;
  }
  return MatrixClass::UnitLowerTriangular;
}

}  // namespace liouplan
