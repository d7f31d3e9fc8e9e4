#include "inlm/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "inlm/rng.hpp"

namespace inlm {

EllipticProblem EllipticProblem::make(int n, Vector z, double solve_tol) {
  if (n < 1) throw std::invalid_argument("EllipticProblem: n must be >= 1");
  EllipticProblem p;
  p.n = n;
  p.h = 1.0 / (n + 1);
  require_dim(z, static_cast<std::size_t>(n) * n, "EllipticProblem z");
  p.z = std::move(z);
  p.solve_tol = solve_tol;
  return p;
}

Vector stencil_apply(int n, const Vector& c, const Vector& v) {
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  require_dim(c, dim, "stencil_apply c");
  require_dim(v, dim, "stencil_apply v");
  const double h = 1.0 / (n + 1);
  const double inv_h2 = 1.0 / (h * h);
  Vector out(dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      double s = 4.0 * v[idx];
      if (i > 0) s -= v[idx - n];
      if (i < n - 1) s -= v[idx + n];
      if (j > 0) s -= v[idx - 1];
      if (j < n - 1) s -= v[idx + 1];
      out[idx] = inv_h2 * s + c[idx] * v[idx];
    }
  }
  return out;
}

// CG for the SPD stencil system L_c u = b.
static Vector stencil_solve(const EllipticProblem& prob, const Vector& c,
                            const Vector& b) {
  const std::size_t dim = static_cast<std::size_t>(prob.n) * prob.n;
  require_dim(c, dim, "stencil_solve c");
  require_dim(b, dim, "stencil_solve b");

  Vector u(dim, 0.0);
  Vector r = b;
  double rr = inner(r, r);
  if (rr == 0.0) return u;
  const double target = prob.solve_tol * std::sqrt(rr);
  Vector p = r;
  const long cap = static_cast<long>(prob.solve_iter_cap_factor) * dim;
  for (long it = 0; it < cap; ++it) {
    const Vector q = stencil_apply(prob.n, c, p);
    const double pq = inner(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      throw std::runtime_error(
          "forward_solve: stencil operator is not positive definite "
          "(coefficient too negative?)");
    }
    const double step = rr / pq;
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] += step * p[i];
      r[i] -= step * q[i];
    }
    const double rr_next = inner(r, r);
    if (std::sqrt(rr_next) <= target) return u;
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < dim; ++i) p[i] = r[i] + beta * p[i];
  }
  throw std::runtime_error("forward_solve: tolerance not reached within " +
                           std::to_string(cap) + " iterations");
}

Vector forward_solve(const EllipticProblem& prob, const Vector& c) {
  return stencil_solve(prob, c, prob.z);
}

Vector pde_jacobian_apply(const EllipticProblem& prob, const Vector& c,
                          const Vector& u_cache, const Vector& hdir) {
  Vector rhs(u_cache.size());
  require_dim(hdir, u_cache.size(), "pde_jacobian_apply hdir");
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = hdir[i] * u_cache[i];
  return scaled(-1.0, stencil_solve(prob, c, rhs));
}

Vector pde_adjoint_apply(const EllipticProblem& prob, const Vector& c,
                         const Vector& u_cache, const Vector& r) {
  const Vector w = stencil_solve(prob, c, r);
  Vector out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -u_cache[i] * w[i];
  return out;
}

Phantom make_phantom(int n, double solve_tol) {
  if (n < 4) throw std::invalid_argument("make_phantom: n must be >= 4");
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  const double h = 1.0 / (n + 1);

  Phantom ph;
  ph.g_grid.resize(dim);
  Vector c0(dim);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 1) * h;
    for (int j = 0; j < n; ++j) {
      const double y = (j + 1) * h;
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      ph.g_grid[idx] =
          200.0 * std::exp(-10.0 * (x - 0.5) * (x - 0.5) -
                           10.0 * (y - 0.5) * (y - 0.5));
      const double d1 = std::hypot(x - 0.25, y - 0.5);
      const double d2 = std::hypot(x - 0.75, y - 0.5);
      c0[idx] = (std::min(d1, d2) < 0.1) ? 10.0 : 0.0;
    }
  }

  // Smooth the indicator with a unit-mass Gaussian kernel, sigma = 0.05 in
  // domain units, truncated at 3 sigma, zero-padded at the boundary.
  const double sigma = 0.05;
  const int rad = static_cast<int>(std::ceil(3.0 * sigma / h));
  const int ksize = 2 * rad + 1;
  std::vector<double> kernel(static_cast<std::size_t>(ksize) * ksize);
  double mass = 0.0;
  for (int di = -rad; di <= rad; ++di) {
    for (int dj = -rad; dj <= rad; ++dj) {
      const double r2 = (di * di + dj * dj) * h * h;
      const double v = std::exp(-r2 / (2.0 * sigma * sigma));
      kernel[static_cast<std::size_t>(di + rad) * ksize + (dj + rad)] = v;
      mass += v;
    }
  }
  for (auto& v : kernel) v /= mass;

  ph.c_true.assign(dim, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int di = -rad; di <= rad; ++di) {
        const int si = i + di;
        if (si < 0 || si >= n) continue;
        for (int dj = -rad; dj <= rad; ++dj) {
          const int sj = j + dj;
          if (sj < 0 || sj >= n) continue;
          acc += kernel[static_cast<std::size_t>(di + rad) * ksize + (dj + rad)] *
                 c0[static_cast<std::size_t>(si) * n + sj];
        }
      }
      ph.c_true[static_cast<std::size_t>(i) * n + j] = acc;
    }
  }

  const EllipticProblem prob = EllipticProblem::make(n, ph.g_grid, solve_tol);
  ph.u_true = forward_solve(prob, ph.c_true);
  return ph;
}

Vector naive_reconstruction(int n, const Vector& u, const Vector& g_grid) {
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  require_dim(u, dim, "naive_reconstruction u");
  require_dim(g_grid, dim, "naive_reconstruction g");
  const Vector zeros(dim, 0.0);
  const Vector neg_lap_u = stencil_apply(n, zeros, u);  // -Laplace_n u
  Vector c(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (std::abs(u[i]) < 1e-300) {
      throw std::runtime_error("naive_reconstruction: |u| underflow at node " +
                               std::to_string(i));
    }
    c[i] = (g_grid[i] - neg_lap_u[i]) / u[i];
  }
  return c;
}

std::pair<Vector, double> add_relative_noise(const Vector& u_true, double pct,
                                             std::uint64_t seed) {
  if (pct < 0.0) throw std::invalid_argument("add_relative_noise: pct < 0");
  const double delta = pct * norm(u_true);
  if (delta == 0.0) return {u_true, 0.0};
  Rng rng(seed);
  Vector e = rng.normal_vector(u_true.size());
  double en = norm(e);
  while (en == 0.0) {  // probability-zero draw, guarded anyway
    e = rng.normal_vector(u_true.size());
    en = norm(e);
  }
  return {axpy(u_true, delta / en, e), delta};
}

std::size_t EllipticModel::domain_dim() const {
  return static_cast<std::size_t>(prob_.n) * prob_.n;
}
std::size_t EllipticModel::range_dim() const { return domain_dim(); }

const Vector& EllipticModel::cached_solution(const Vector& c) const {
  if (cache_c_ != c) {
    cache_u_ = forward_solve(prob_, c);
    cache_c_ = c;
  }
  return cache_u_;
}

Vector EllipticModel::apply(const Vector& c) const { return cached_solution(c); }

Vector EllipticModel::jacobian_apply(const Vector& c, const Vector& h) const {
  return pde_jacobian_apply(prob_, c, cached_solution(c), h);
}

Vector EllipticModel::adjoint_apply(const Vector& c, const Vector& r) const {
  return pde_adjoint_apply(prob_, c, cached_solution(c), r);
}

}  // namespace inlm
