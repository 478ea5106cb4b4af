#pragma once

#include <cstddef>
#include <vector>

#include "dse/base.hpp"

namespace dse::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Construction rejects non-finite
/// entries; in-place mutation is allowed in hot paths and revalidated at
/// module boundaries via is_finite().
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool is_finite() const;
  bool is_symmetric(double tol) const;
  double trace() const;
  double frobenius_norm() const;

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;

  /// y = M x
  Vector apply(const Vector& x) const;

  Vector diagonal() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigenpairs of a symmetric matrix: eigenvalues sorted descending,
/// eigenvector k in column k of `eigenvectors`. Signs are fixed so the
/// largest-magnitude component of each vector is positive.
struct SymmetricEigenResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Cyclic Jacobi eigendecomposition. Input must be square and symmetric
/// within 1e-10. Converges when the off-diagonal Frobenius norm drops
/// below 1e-12 or after 100 sweeps.
SymmetricEigenResult sym_eigen(const Matrix& m);

/// d x d rotation by `alpha` in the (i, j) coordinate plane: identity
/// outside the 2x2 block [cos -sin; sin cos] on rows/cols (i, j).
Matrix rotation_in_plane(std::size_t d, std::size_t i, std::size_t j, double alpha);

/// Rank-1 matrix u v^T.
Matrix outer_product(const Vector& u, const Vector& v);

// Small vector helpers.
double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
Vector normalized(const Vector& v);
Vector subtract(const Vector& a, const Vector& b);

} // namespace dse::linalg
