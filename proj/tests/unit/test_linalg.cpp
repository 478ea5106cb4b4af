#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dse/base.hpp"
#include "dse/linalg.hpp"

using namespace dse;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix random_symmetric(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.next_gaussian();
  return m;
}

double frob_diff(const Matrix& a, const Matrix& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double diff = a(i, j) - b(i, j);
      s += diff * diff;
    }
  return std::sqrt(s);
}

} // namespace

TEST_CASE("eigendecomposition of diag(3,1)") {
  Matrix m(2, 2);
  m(0, 0) = 3;
  m(1, 1) = 1;
  const auto r = linalg::sym_eigen(m);
  CHECK(r.eigenvalues[0] == doctest::Approx(3).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(1).epsilon(1e-12));
  CHECK(std::fabs(r.eigenvectors(0, 0)) == doctest::Approx(1));
  CHECK(std::fabs(r.eigenvectors(1, 1)) == doctest::Approx(1));
}

TEST_CASE("eigendecomposition of the identity") {
  const auto r = linalg::sym_eigen(Matrix::identity(4));
  for (int k = 0; k < 4; ++k)
    CHECK(r.eigenvalues[k] == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("eigendecomposition of [[2,1],[1,2]]") {
  Matrix m(2, 2);
  m(0, 0) = 2;
  m(0, 1) = 1;
  m(1, 0) = 1;
  m(1, 1) = 2;
  const auto r = linalg::sym_eigen(m);
  CHECK(r.eigenvalues[0] == doctest::Approx(3).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(1).epsilon(1e-12));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(r.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
  CHECK(r.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
  CHECK(std::fabs(r.eigenvectors(0, 1)) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
  CHECK(r.eigenvectors(0, 1) * r.eigenvectors(1, 1) < 0);
}

TEST_CASE("eigendecomposition reconstructs random symmetric matrices") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t d = 3 + seed * 3;
    const Matrix m = random_symmetric(d, seed);
    const auto r = linalg::sym_eigen(m);

    Matrix recon(d, d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          recon(i, j) += r.eigenvalues[k] * r.eigenvectors(i, k) * r.eigenvectors(j, k);
    CHECK(frob_diff(recon, m) < 1e-8);

    const Matrix vtv = r.eigenvectors.transposed() * r.eigenvectors;
    CHECK(frob_diff(vtv, Matrix::identity(d)) < 1e-10);

    double eig_sum = 0;
    for (std::size_t k = 0; k < d; ++k) {
      eig_sum += r.eigenvalues[k];
      if (k > 0) CHECK(r.eigenvalues[k - 1] >= r.eigenvalues[k]);
    }
    CHECK(eig_sum == doctest::Approx(m.trace()).epsilon(1e-10));
  }
}

TEST_CASE("eigendecomposition rejects bad shapes") {
  CHECK_THROWS_AS(linalg::sym_eigen(Matrix(2, 3)), DimensionError);
  Matrix skew(2, 2);
  skew(0, 1) = 1;
  skew(1, 0) = -1;
  CHECK_THROWS_AS(linalg::sym_eigen(skew), DataError);
}

TEST_CASE("plane rotation basics") {
  CHECK(frob_diff(linalg::rotation_in_plane(3, 0, 1, 0.0), Matrix::identity(3)) <
        1e-15);

  const Matrix q = linalg::rotation_in_plane(2, 0, 1, std::numbers::pi / 2);
  const Vector e1{1.0, 0.0};
  const Vector rotated = q.apply(e1);
  CHECK(rotated[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(rotated[1] == doctest::Approx(1).epsilon(1e-12));

  const Matrix q17 = linalg::rotation_in_plane(17, 0, 1, std::numbers::pi / 4);
  Vector e17(17, 0.0);
  e17[0] = 1.0;
  const Vector r17 = q17.apply(e17);
  CHECK(r17[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(r17[1] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  for (std::size_t j = 2; j < 17; ++j) CHECK(r17[j] == 0.0);
}

TEST_CASE("plane rotations are orthogonal with unit determinant") {
  for (const double alpha : {0.3, 1.1, 1.5707}) {
    const Matrix q = linalg::rotation_in_plane(5, 1, 3, alpha);
    CHECK(frob_diff(q.transposed() * q, Matrix::identity(5)) < 1e-12);
    // Determinant via the 2x2 block; all other axes are untouched.
    const double det_block = q(1, 1) * q(3, 3) - q(1, 3) * q(3, 1);
    CHECK(det_block == doctest::Approx(1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(linalg::rotation_in_plane(4, 2, 2, 0.5), DataError);
  CHECK_THROWS_AS(linalg::rotation_in_plane(4, 0, 5, 0.5), DataError);
}

TEST_CASE("outer products") {
  const Matrix e11 = linalg::outer_product(Vector{1, 0, 0}, Vector{1, 0, 0});
  CHECK(e11(0, 0) == 1.0);
  CHECK(e11.frobenius_norm() == doctest::Approx(1));

  const Matrix m = linalg::outer_product(Vector{1, 2}, Vector{3, 4});
  CHECK(m(0, 0) == 3.0);
  CHECK(m(0, 1) == 4.0);
  CHECK(m(1, 0) == 6.0);
  CHECK(m(1, 1) == 8.0);

  const Matrix z = linalg::outer_product(Vector{0, 0}, Vector{5, -2});
  CHECK(z.frobenius_norm() == 0.0);
}

TEST_CASE("vector helpers") {
  CHECK(linalg::dot(Vector{1, 2, 3}, Vector{4, 5, 6}) == doctest::Approx(32));
  CHECK(linalg::norm(Vector{3, 4}) == doctest::Approx(5));
  const Vector u = linalg::normalized(Vector{3, 4});
  CHECK(u[0] == doctest::Approx(0.6));
  CHECK(u[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(linalg::normalized(Vector{0, 0}), NumericError);
  const Vector diff = linalg::subtract(Vector{5, 1}, Vector{2, 3});
  CHECK(diff[0] == 3.0);
  CHECK(diff[1] == -2.0);
}

TEST_CASE("matrix products and transposes agree with hand values") {
  Matrix a(2, 3);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(0, 2) = 3;
  a(1, 0) = 4;
  a(1, 1) = 5;
  a(1, 2) = 6;
  const Matrix at = a.transposed();
  CHECK(at.rows() == 3);
  CHECK(at(2, 1) == 6.0);
  const Matrix ata = at * a;
  CHECK(ata(0, 0) == doctest::Approx(17));
  CHECK(ata(1, 2) == doctest::Approx(2 * 3 + 5 * 6));
  CHECK(ata.is_symmetric(1e-14));
}
