#include "dse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dse::linalg {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix entries length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
  if (!is_finite()) {
    throw NumericError("matrix construction with non-finite entries");
  }
}

Matrix Matrix::identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    }
  }
  return true;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) {
    throw DimensionError("matrix product dimension mismatch");
  }
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      double v = (*this)(i, k);
      if (v == 0.0) continue;
      const double* rrow = rhs.row(k);
      double* orow = out.row(i);
      for (std::size_t j = 0; j < rhs.cols_; ++j) orow[j] += v * rrow[j];
    }
  }
  return out;
}

Vector Matrix::apply(const Vector& x) const {
  if (x.size() != cols_) {
    throw DimensionError("matrix-vector dimension mismatch");
  }
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector Matrix::diagonal() const {
  std::size_t n = std::min(rows_, cols_);
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
  return d;
}

namespace {

double off_diagonal_frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

} // namespace

SymmetricEigenResult sym_eigen(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("sym_eigen requires a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.is_symmetric(1e-10)) {
    throw DimensionError("sym_eigen requires a symmetric matrix (tolerance 1e-10)");
  }

  const std::size_t n = m.rows();
  Matrix a = m;
  // Symmetrize exactly so rounding asymmetries cannot accumulate.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  constexpr double kOffTol = 1e-12;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_frobenius(a) < kOffTol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // Sort eigenpairs descending; ties keep the lower original index first.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigenResult res;
  res.eigenvalues.resize(n);
  res.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t src = order[k];
    res.eigenvalues[k] = a(src, src);
    // Sign convention: largest-magnitude component positive.
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mag = std::abs(v(i, src));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = sign * v(i, src);
  }
  return res;
}

Matrix rotation_in_plane(std::size_t d, std::size_t i, std::size_t j, double alpha) {
  if (i == j) {
    throw DimensionError("rotation_in_plane requires two distinct axes");
  }
  if (i >= d || j >= d) {
    throw DimensionError("rotation axis out of range for dimension " + std::to_string(d));
  }
  Matrix r = Matrix::identity(d);
  double c = std::cos(alpha), s = std::sin(alpha);
  r(i, i) = c;
  r(j, j) = c;
  r(i, j) = -s;
  r(j, i) = s;
  return r;
}

Matrix outer_product(const Vector& u, const Vector& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double ui = u[i];
    double* row = m.row(i);
    for (std::size_t j = 0; j < v.size(); ++j) row[j] = ui * v[j];
  }
  return m;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot product dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

Vector normalized(const Vector& v) {
  double n = norm(v);
  if (n == 0.0) {
    throw NumericError("cannot normalize a zero vector");
  }
  Vector out(v);
  for (double& x : out) x /= n;
  return out;
}

Vector subtract(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector subtraction dimension mismatch");
  }
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

} // namespace dse::linalg
