#pragma once

#include <cstdint>
#include <vector>

#include "inlm/vec.hpp"

namespace inlm {

/// Abstract nonlinear forward operator F: R^domain_dim -> R^range_dim with
/// matrix-free linearization and adjoint actions. Implementations must be
/// deterministic pure functions of their inputs and satisfy the adjoint
/// identity <F'(x)h, r> = <h, F'(x)*r>.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::size_t domain_dim() const = 0;
  virtual std::size_t range_dim() const = 0;

  virtual Vector apply(const Vector& x) const = 0;
  virtual Vector jacobian_apply(const Vector& x, const Vector& h) const = 0;
  virtual Vector adjoint_apply(const Vector& x, const Vector& r) const = 0;
};

/// F(x) = M x with M given dense row-major. The adjoint is the transpose.
/// Used by the scalar/linear verification problems and as a test fixture.
class LinearModel : public ForwardModel {
 public:
  LinearModel(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  /// 1x1 model F(x) = m*x.
  static LinearModel scalar(double m);

  std::size_t domain_dim() const override { return cols_; }
  std::size_t range_dim() const override { return rows_; }
  Vector apply(const Vector& x) const override;
  Vector jacobian_apply(const Vector& x, const Vector& h) const override;
  Vector adjoint_apply(const Vector& x, const Vector& r) const override;

  /// Spectral-norm upper bound via the Frobenius norm (used for (A4) checks).
  double frobenius_norm() const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> m_;  // row-major
};

/// Max relative adjoint discrepancy over `trials` random (h, r) pairs at x.
/// Throws on non-finite intermediates.
double check_adjoint(const ForwardModel& model, const Vector& x, int trials,
                     std::uint64_t seed);

/// One-sided finite-difference errors ||(F(x+t h) - F(x))/t - F'(x)h|| /
/// max(||F'(x)h||, eps) for each step t.
std::vector<double> check_jacobian_fd(const ForwardModel& model,
                                      const Vector& x, const Vector& h,
                                      const std::vector<double>& steps);

}  // namespace inlm
