#include "inlm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "inlm/rng.hpp"

namespace inlm {

LinearModel::LinearModel(std::size_t rows, std::size_t cols,
                         std::vector<double> row_major)
    : rows_(rows), cols_(cols), m_(std::move(row_major)) {
  if (m_.size() != rows_ * cols_) {
    throw std::invalid_argument("LinearModel: matrix size mismatch");
  }
}

LinearModel LinearModel::scalar(double m) { return LinearModel(1, 1, {m}); }

Vector LinearModel::apply(const Vector& x) const {
  require_dim(x, cols_, "LinearModel::apply");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += m_[i * cols_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector LinearModel::jacobian_apply(const Vector&, const Vector& h) const {
  return apply(h);
}

Vector LinearModel::adjoint_apply(const Vector&, const Vector& r) const {
  require_dim(r, rows_, "LinearModel::adjoint_apply");
  Vector y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) y[j] += m_[i * cols_ + j] * r[i];
  }
  return y;
}

double LinearModel::frobenius_norm() const {
  double s = 0.0;
  for (double v : m_) s += v * v;
  return std::sqrt(s);
}

double check_adjoint(const ForwardModel& model, const Vector& x, int trials,
                     std::uint64_t seed) {
  require_dim(x, model.domain_dim(), "check_adjoint");
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector h = rng.normal_vector(model.domain_dim());
    const Vector r = rng.normal_vector(model.range_dim());
    const Vector ah = model.jacobian_apply(x, h);
    const Vector atr = model.adjoint_apply(x, r);
    require_finite(ah, "jacobian_apply");
    require_finite(atr, "adjoint_apply");
    const double lhs = inner(ah, r);
    const double rhs = inner(h, atr);
    const double scale =
        norm(ah) * norm(r) + std::numeric_limits<double>::epsilon();
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

std::vector<double> check_jacobian_fd(const ForwardModel& model,
                                      const Vector& x, const Vector& h,
                                      const std::vector<double>& steps) {
  const Vector fx = model.apply(x);
  const Vector jh = model.jacobian_apply(x, h);
  const double scale =
      std::max(norm(jh), std::numeric_limits<double>::epsilon());
  std::vector<double> errs;
  errs.reserve(steps.size());
  for (double t : steps) {
    const Vector fxt = model.apply(axpy(x, t, h));
    const Vector fd = scaled(1.0 / t, sub(fxt, fx));
    errs.push_back(norm(sub(fd, jh)) / scale);
  }
  return errs;
}

}  // namespace inlm
