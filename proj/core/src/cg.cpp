#include "inlm/cg.hpp"

#include <cmath>
#include <stdexcept>

namespace inlm {

std::pair<Vector, CgReport> cg_normal_solve(const ForwardModel& model,
                                            const Vector& lin_point,
                                            const Vector& residual,
                                            double lambda,
                                            const CgConfig& cfg) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("cg_normal_solve: lambda must be positive");
  }
  require_dim(lin_point, model.domain_dim(), "cg_normal_solve lin_point");
  require_dim(residual, model.range_dim(), "cg_normal_solve residual");

  const auto normal_apply = [&](const Vector& p) {
    Vector q = model.adjoint_apply(lin_point, model.jacobian_apply(lin_point, p));
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += lambda * p[i];
    return q;
  };

  const Vector b = model.adjoint_apply(lin_point, residual);
  require_finite(b, "cg_normal_solve rhs");

  Vector s(model.domain_dim(), 0.0);
  Vector r = b;
  double rr = inner(r, r);
  CgReport report;
  if (rr == 0.0) {
    return {s, report};  // zero right-hand side: s = 0 exactly
  }
  const double bnorm = std::sqrt(rr);
  Vector p = r;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector q = normal_apply(p);
    const double pq = inner(p, q);
    if (!(pq > 1e-300) || !std::isfinite(pq)) {
      report.breakdown = true;
      break;
    }
    const double step = rr / pq;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += step * p[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= step * q[i];
    const double rr_next = inner(r, r);
    ++report.iterations_used;
    rr = rr_next;
    if (rr == 0.0) break;  // exact solve, both modes
    if (cfg.mode == CgMode::ToTolerance &&
        std::sqrt(rr) <= cfg.rel_tol * bnorm) {
      break;
    }
    const double beta = rr_next / (pq * step);  // == rr_next / rr_prev
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  require_finite(s, "cg_normal_solve iterate");
  report.final_normal_residual = std::sqrt(rr);
  return {s, report};
}

}  // namespace inlm
