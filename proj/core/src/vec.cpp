#include "inlm/vec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace inlm {

static void check_dims(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("vector dimension mismatch: " +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()));
  }
}

double inner(const Vector& u, const Vector& v) {
  check_dims(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm(const Vector& u) { return std::sqrt(inner(u, u)); }

Vector axpy(const Vector& u, double s, const Vector& v) {
  check_dims(u, v);
  Vector r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + s * v[i];
  return r;
}

Vector add(const Vector& u, const Vector& v) { return axpy(u, 1.0, v); }
Vector sub(const Vector& u, const Vector& v) { return axpy(u, -1.0, v); }

Vector scaled(double s, const Vector& u) {
  Vector r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = s * u[i];
  return r;
}

bool all_finite(const Vector& u) {
  for (double x : u) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_finite(const Vector& u, const char* what) {
  if (!all_finite(u)) {
    throw std::runtime_error(std::string("non-finite entries in ") + what);
  }
}

void require_dim(const Vector& u, std::size_t dim, const char* what) {
  if (u.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(u.size()));
  }
}

}  // namespace inlm
