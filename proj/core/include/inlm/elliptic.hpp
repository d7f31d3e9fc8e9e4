#pragma once

#include <cstdint>
#include <memory>

#include "inlm/model.hpp"
#include "inlm/vec.hpp"

namespace inlm {

/// Coefficient-identification benchmark F(c) = (-Laplace_n + diag(c))^-1 z on
/// the unit square. Grid: n x n interior nodes at (i/(n+1), j/(n+1)),
/// i,j = 1..n, spacing h = 1/(n+1), homogeneous Dirichlet data eliminated
/// into the five-point stencil, row-wise flattening.
struct EllipticProblem {
  int n = 0;
  double h = 0.0;
  Vector z;                      // discretized right-hand side, length n^2
  double solve_tol = 1e-10;      // relative tolerance of the forward solve
  int solve_iter_cap_factor = 10;  // iteration cap = factor * n^2

  static EllipticProblem make(int n, Vector z, double solve_tol = 1e-10);
};

struct Phantom {
  Vector c_true;  // two smoothed bumps, >= 0
  Vector u_true;  // forward solution at c_true
  Vector g_grid;  // source term sampled on the grid
};

/// (-Laplace_n + diag(c)) v with homogeneous Dirichlet padding.
Vector stencil_apply(int n, const Vector& c, const Vector& v);

/// Solves (-Laplace_n + diag(c)) u = z by CG to the problem's relative
/// tolerance. Throws if the operator loses positive definiteness or the
/// tolerance is not reached within the iteration cap.
Vector forward_solve(const EllipticProblem& prob, const Vector& c);

/// F'(c) h = -L_c^-1 (h .* u) with u = F(c) passed in as u_cache.
Vector pde_jacobian_apply(const EllipticProblem& prob, const Vector& c,
                          const Vector& u_cache, const Vector& hdir);

/// F'(c)* r = -u .* L_c^-1 r (L_c is symmetric).
Vector pde_adjoint_apply(const EllipticProblem& prob, const Vector& c,
                         const Vector& u_cache, const Vector& r);

/// Gaussian source g(x,y) = 200 exp(-10(x-1/2)^2 - 10(y-1/2)^2), two disks of
/// height 10 and radius 1/10 centered at (0.25, 0.5) and (0.75, 0.5),
/// smoothed by a unit-mass grid Gaussian of standard deviation 0.05.
Phantom make_phantom(int n, double solve_tol = 1e-10);

/// c = (g + Laplace_n u) / u entrywise; throws when any |u_i| underflows.
Vector naive_reconstruction(int n, const Vector& u, const Vector& g_grid);

/// Adds a seeded spherical perturbation of exact norm delta = pct * ||u_true||.
std::pair<Vector, double> add_relative_noise(const Vector& u_true, double pct,
                                             std::uint64_t seed);

/// ForwardModel adapter. Caches the forward solution at the most recent
/// linearization point, so repeated jacobian/adjoint actions at one point
/// (the inner CG) trigger a single forward solve.
class EllipticModel : public ForwardModel {
 public:
  explicit EllipticModel(EllipticProblem prob) : prob_(std::move(prob)) {}

  std::size_t domain_dim() const override;
  std::size_t range_dim() const override;
  Vector apply(const Vector& c) const override;
  Vector jacobian_apply(const Vector& c, const Vector& h) const override;
  Vector adjoint_apply(const Vector& c, const Vector& r) const override;

  const EllipticProblem& problem() const { return prob_; }

 private:
  const Vector& cached_solution(const Vector& c) const;

  EllipticProblem prob_;
  mutable Vector cache_c_;
  mutable Vector cache_u_;
};

}  // namespace inlm
