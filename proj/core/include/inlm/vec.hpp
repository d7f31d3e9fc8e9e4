#pragma once

#include <cstddef>
#include <vector>

namespace inlm {

/// Dense real coordinate vector with the Euclidean inner product.
using Vector = std::vector<double>;

/// Euclidean inner product; throws std::invalid_argument on dimension mismatch.
double inner(const Vector& u, const Vector& v);

/// Euclidean norm.
double norm(const Vector& u);

/// u + s*v, dimension-checked.
Vector axpy(const Vector& u, double s, const Vector& v);

Vector add(const Vector& u, const Vector& v);
Vector sub(const Vector& u, const Vector& v);
Vector scaled(double s, const Vector& u);

/// True iff every entry is finite.
bool all_finite(const Vector& u);

/// Throws std::runtime_error if any entry is non-finite.
void require_finite(const Vector& u, const char* what);

void require_dim(const Vector& u, std::size_t dim, const char* what);

}  // namespace inlm
