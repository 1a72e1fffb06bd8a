#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liouplan/expr.hpp"
#include "liouplan/pv_form.hpp"
#include "liouplan/system_model.hpp"

namespace liouplan {

/// Split of the states into the flat subsystem (eta) and the extension
/// states (xi). The order of `xi` is the chain / triangular order.
struct Partition {
  std::vector<std::string> eta;
  std::vector<std::string> xi;

  void validate(const SystemModel& sys) const;
};

/// Parses "eta=a,b,xi=c" (also accepts ';' between groups, and empty groups).
Partition parse_partition(std::string_view text);

enum class ExtensionKind { Integral, Exponential };
const char* to_string(ExtensionKind kind);

/// Integral: d(xi)/dt = alpha.  Exponential: d(xi)/dt = alpha * xi.
struct ExtensionStep {
  std::string var;
  ExtensionKind kind = ExtensionKind::Integral;
  Expr alpha;
};

struct ExtensionChain {
  std::vector<ExtensionStep> steps;

  bool empty() const noexcept { return steps.empty(); }
};

/// Decides, state by state in `part.xi` order, whether each extension state is
/// an integral or an exponential of an integral over everything before it.
/// Also requires the eta subsystem to be closed (free of all xi).
/// Throws StructureError (NotChain) naming the first offending state.
ExtensionChain check_chain_structure(const SystemModel& sys, const Partition& part,
                                     const ProbeOptions& probe = {});

/// Tries every ordering of `part.xi` (d <= 6) and returns the first that forms
/// a chain, together with the accepted order.
std::optional<std::pair<Partition, ExtensionChain>> search_chain_order(
    const SystemModel& sys, const Partition& part, const ProbeOptions& probe = {});

/// Independent re-check that step j's alpha references no xi_k with k >= j.
bool is_prefix_closed(const ExtensionChain& chain, const Partition& part,
                      const ProbeOptions& probe = {});

/// Extracts A with rhs_xi = A(eta, u) xi. Throws StructureError
/// (OpenSubsystem, NotLinear, AffineOffset).
PVForm extract_pv_form(const SystemModel& sys, const Partition& part,
                       const ProbeOptions& probe = {});

/// The system with every xi equation replaced by its chain form.
SystemModel rebuild_from_chain(const SystemModel& sys, const Partition& part,
                               const ExtensionChain& chain);

}  // namespace liouplan
