#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inlm/model.hpp"
#include "inlm/solver.hpp"

namespace inlm {

struct IdentityCheck {
  std::string name;
  bool pass = true;
  double max_violation = 0.0;  // worst relative violation over all checked k
  int worst_k = -1;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  // True when the trace was produced with truncated inner CG; the step
  // identities are not expected to hold in that regime.
  bool cg_mode_mismatch = false;
  bool gain_checked = false;

  bool all_pass() const;
  const IdentityCheck* find(const std::string& name) const;
};

/// Re-evaluates the per-iteration identities and inequalities of the inLM
/// step on a recorded trace (requires keep_iterates):
///   extrapolation  ||w_k - x||^2 expansion against a probe point,
///   residual_defect   (A A* + lambda I) D_k = lambda (F(w_k) - y),
///   step_identity     w_k - x_{k+1} = lambda^-1 A* D_k,
///   defect_bounds     q ||F(w_k)-y|| <= ||D_k|| <= ||F(w_k)-y||,
///   residual_decay    (1-eta)||F(x_{k+1})-y|| <= (1+eta)||F(w_k)-y||,
///   gain              squared-distance gain vs a known solution.
/// The gain check is skipped when known_solution is absent.
IdentityReport verify_iteration_identities(
    const ForwardModel& model, const RunTrace& trace, const Vector& y,
    const SolverConfig& cfg,
    const std::optional<Vector>& known_solution = std::nullopt);

}  // namespace inlm
