#pragma once

#include "inlm/model.hpp"
#include "inlm/vec.hpp"

namespace inlm {

enum class CgMode {
  Truncated,    // run exactly max_iters direction updates (early exit on exact solve)
  ToTolerance,  // stop when ||(A*A+lambda I)s - A*r|| <= rel_tol * ||A*r||
};

struct CgConfig {
  int max_iters = 2;
  double rel_tol = 1e-12;
  CgMode mode = CgMode::Truncated;
};

struct CgReport {
  int iterations_used = 0;
  double final_normal_residual = 0.0;
  bool breakdown = false;
};

/// Solves (A*A + lambda I) s = A* residual with A = F'(lin_point), using only
/// the model's jacobian/adjoint actions. CG starts at s = 0. One "step" is one
/// search-direction update. Deterministic for fixed inputs.
std::pair<Vector, CgReport> cg_normal_solve(const ForwardModel& model,
                                            const Vector& lin_point,
                                            const Vector& residual,
                                            double lambda, const CgConfig& cfg);

}  // namespace inlm
