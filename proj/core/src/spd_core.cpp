#include "rsc/spd_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rsc {

namespace {

void check_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
}

void check_same_dim(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrices have different dimensions");
}

}  // namespace

LowerFactor cholesky(const Matrix& m) {
  check_square(m);
  const int p = static_cast<int>(m.rows());
  Matrix c = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    double d = m(j, j) - c.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) throw NotPositiveDefinite();
    c(j, j) = std::sqrt(d);
    for (int i = j + 1; i < p; ++i) {
      double s = m(i, j) - c.row(i).head(j).dot(c.row(j).head(j));
      c(i, j) = s / c(j, j);
    }
  }
  return LowerFactor{std::move(c), std::nullopt};
}

Matrix sym_power(const Matrix& m, double t) {
  check_square(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    double v = std::max(ev[i], 1e-14);
    ev[i] = std::pow(v, t);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix geodesic_point(const Matrix& a, const Matrix& b, double t) {
  check_same_dim(a, b);
  Matrix a_half = sym_power(a, 0.5);
  Matrix a_neg_half = sym_power(a, -0.5);
  Matrix inner = a_neg_half * b * a_neg_half;
  inner = 0.5 * (inner + inner.transpose());
  Matrix result = a_half * sym_power(inner, t) * a_half;
  return 0.5 * (result + result.transpose());
}

Matrix spd_inverse(const Matrix& m) {
  check_square(m);
  LowerFactor c = cholesky(m);
  const int p = c.dim();
  Matrix inv = c.mat.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  inv = c.mat.transpose().triangularView<Eigen::Upper>().solve(inv);
  return 0.5 * (inv + inv.transpose());
}

double log_det(const Matrix& m) {
  LowerFactor c = cholesky(m);
  return 2.0 * c.mat.diagonal().array().log().sum();
}

double normalized_sq_frobenius_error(const Matrix& est, const Matrix& truth) {
  check_same_dim(est, truth);
  return (est - truth).squaredNorm() / truth.squaredNorm();
}

}  // namespace rsc
