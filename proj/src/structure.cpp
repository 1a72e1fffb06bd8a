#include "liouplan/structure.hpp"

#include <algorithm>
#include <set>

#include "liouplan/errors.hpp"

namespace liouplan {

namespace {

using Kind = StructureError::Kind;

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string item(text.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

// Checks the flat subsystem does not see any extension state.
void require_closed_eta(const SystemModel& sys, const Partition& part, const ProbeOptions& probe) {
  for (const auto& x : part.xi) {
    for (const auto& e : part.eta) {
      const Expr& f = sys.rhs_of(e);
      if (mentions(f, x) && !probably_zero(partial_derivative(f, x), probe)) {
        throw StructureError(Kind::NotChain, x,
                             "flat-subsystem state " + e + " depends on " + x);
      }
    }
  }
}

bool depends_on(const Expr& f, const std::string& var, const ProbeOptions& probe) {
  return mentions(f, var) && !probably_zero(partial_derivative(f, var), probe);
}

}  // namespace

void Partition::validate(const SystemModel& sys) const {
  std::set<std::string> seen;
  for (const auto* group : {&eta, &xi}) {
    for (const auto& n : *group) {
      if (!sys.is_state(n)) throw InputError("partition names unknown state '" + n + "'");
      if (!seen.insert(n).second) throw InputError("partition lists '" + n + "' twice");
    }
  }
  if (seen.size() != sys.states.size()) {
    for (const auto& s : sys.states) {
      if (!seen.count(s)) throw InputError("partition does not cover state '" + s + "'");
    }
  }
}

Partition parse_partition(std::string_view text) {
  Partition part;
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ';', ',');
  std::vector<std::string>* current = nullptr;
  bool saw_eta = false;
  bool saw_xi = false;
  for (auto& item : split_list(normalized)) {
    auto eq = item.find('=');
    if (eq != std::string::npos) {
      const std::string key = item.substr(0, eq);
      if (key == "eta") {
        current = &part.eta;
        saw_eta = true;
      } else if (key == "xi") {
        current = &part.xi;
        saw_xi = true;
      } else {
        throw InputError("partition key must be 'eta' or 'xi', got '" + key + "'");
      }
      item = item.substr(eq + 1);
      if (item.empty()) continue;
    }
    if (current == nullptr) throw InputError("partition must start with 'eta=' or 'xi='");
    current->push_back(item);
  }
  if (!saw_eta && !saw_xi) throw InputError("partition text names neither eta nor xi");
  return part;
}

const char* to_string(ExtensionKind kind) {
  return kind == ExtensionKind::Integral ? "Integral" : "Exponential";
}

ExtensionChain check_chain_structure(const SystemModel& sys, const Partition& part,
                                     const ProbeOptions& probe) {
  part.validate(sys);
  require_closed_eta(sys, part, probe);

  ExtensionChain chain;
  for (std::size_t j = 0; j < part.xi.size(); ++j) {
    const std::string& var = part.xi[j];
    const Expr f = simplify(sys.rhs_of(var));

    for (std::size_t k = j + 1; k < part.xi.size(); ++k) {
      if (depends_on(f, part.xi[k], probe)) {
        throw StructureError(Kind::NotChain, var,
                             "depends on later extension state " + part.xi[k]);
      }
    }

    if (!depends_on(f, var, probe)) {
      for (std::size_t k = j; k < part.xi.size(); ++k) {
        if (mentions(f, part.xi[k])) {
          throw StructureError(Kind::NotChain, var,
                               "integrand mentions " + part.xi[k] + " (cancels only numerically)");
        }
      }
      chain.steps.push_back({var, ExtensionKind::Integral, f});
      continue;
    }

    const Expr alpha = partial_derivative(f, var);
    if (depends_on(alpha, var, probe)) {
      throw StructureError(Kind::NotChain, var, "nonlinear in " + var);
    }
    for (std::size_t k = j; k < part.xi.size(); ++k) {
      if (mentions(alpha, part.xi[k])) {
        throw StructureError(Kind::NotChain, var,
                             "growth rate mentions " + part.xi[k] + " (cancels only numerically)");
      }
    }
    if (!probably_zero(f - alpha * Expr::variable(var), probe)) {
      throw StructureError(Kind::NotChain, var,
                           "affine in " + var + " with a nonzero offset; neither integral nor exponential");
    }
    chain.steps.push_back({var, ExtensionKind::Exponential, alpha});
  }
  return chain;
}

std::optional<std::pair<Partition, ExtensionChain>> search_chain_order(
    const SystemModel& sys, const Partition& part, const ProbeOptions& probe) {
  if (part.xi.size() > 6) throw InputError("ordering search is limited to at most 6 extension states");
  part.validate(sys);
  Partition candidate = part;
  std::sort(candidate.xi.begin(), candidate.xi.end());
  do {
    try {
      auto chain = check_chain_structure(sys, candidate, probe);
      return std::make_pair(candidate, std::move(chain));
    } catch (const StructureError&) {
    }
  } while (std::next_permutation(candidate.xi.begin(), candidate.xi.end()));
  return std::nullopt;
}

bool is_prefix_closed(const ExtensionChain& chain, const Partition& part, const ProbeOptions& probe) {
  if (chain.steps.size() != part.xi.size()) return false;
  for (std::size_t j = 0; j < part.xi.size(); ++j) {
    const auto& step = chain.steps[j];
    if (step.var != part.xi[j]) return false;
    for (std::size_t k = j; k < part.xi.size(); ++k) {
      if (mentions(step.alpha, part.xi[k])) return false;
      if (!probably_zero(partial_derivative(step.alpha, part.xi[k]), probe)) return false;
    }
  }
  return true;
}

PVForm extract_pv_form(const SystemModel& sys, const Partition& part, const ProbeOptions& probe) {
  part.validate(sys);
  for (const auto& x : part.xi) {
    for (const auto& e : part.eta) {
      if (depends_on(sys.rhs_of(e), x, probe)) {
        throw StructureError(Kind::OpenSubsystem, x,
                             "flat-subsystem state " + e + " depends on " + x);
      }
    }
  }

  const std::size_t d = part.xi.size();
  std::vector<std::vector<Expr>> a(d, std::vector<Expr>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const std::string& var = part.xi[j];
    const Expr f = simplify(sys.rhs_of(var));
    Expr linear_part = Expr::constant(0.0);
    for (std::size_t k = 0; k < d; ++k) {
      Expr entry = partial_derivative(f, part.xi[k]);
      for (const auto& x : part.xi) {
        if (mentions(entry, x)) {
          if (depends_on(entry, x, probe)) {
            throw StructureError(Kind::NotLinear, var,
                                 "coefficient of " + part.xi[k] + " depends on " + x);
          }
          throw StructureError(Kind::NotLinear, var,
                               "coefficient of " + part.xi[k] + " mentions " + x +
                                   " (cancels only numerically)");
        }
      }
      linear_part = linear_part + entry * Expr::variable(part.xi[k]);
      a[j][k] = entry;
    }
    if (!probably_zero(f - linear_part, probe)) {
      throw StructureError(Kind::AffineOffset, var, "rhs does not vanish at xi = 0");
    }
  }
  return PVForm(part.xi, std::move(a), probe);
}

SystemModel rebuild_from_chain(const SystemModel& sys, const Partition& part,
                               const ExtensionChain& chain) {
  part.validate(sys);
  SystemModel out = sys;
  out.name = sys.name + "/chain";
  for (const auto& step : chain.steps) {
    out.rhs[step.var] = step.kind == ExtensionKind::Integral
                            ? step.alpha
                            : step.alpha * Expr::variable(step.var);
  }
  return out;
}

}  // namespace liouplan
